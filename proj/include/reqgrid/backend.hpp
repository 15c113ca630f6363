#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "reqgrid/zsl.hpp"

namespace reqgrid {

enum class ScoreNormalize { MeanLogProb, SumLogProb };

struct ScoreRequest {
  std::string context;
  std::vector<std::string> continuations;
  ScoreNormalize normalize = ScoreNormalize::MeanLogProb;
};

struct ScoreResponse {
  std::vector<double> scores;  // aligned index-for-index with continuations
};

struct EmbedRequest {
  std::vector<std::string> texts;
};

struct EmbedResponse {
  std::vector<std::vector<double>> vectors;  // equal dimension
};

// Wire protocol: UTF-8 JSON bodies, POST /v1/score and /v1/embed.
std::string serialize_score_request(const ScoreRequest& req);
ScoreRequest parse_score_request(const std::string& body);
std::string serialize_score_response(const ScoreResponse& resp);
ScoreResponse parse_score_response(const std::string& body, std::size_t expected);
std::string serialize_embed_request(const EmbedRequest& req);
EmbedRequest parse_embed_request(const std::string& body);
std::string serialize_embed_response(const EmbedResponse& resp);
EmbedResponse parse_embed_response(const std::string& body, std::size_t expected);

// Deterministic stand-in for a hosted model: lexicon token overlap plus an
// FNV-1a hash tiebreak. Pure function of its inputs.
double mock_score(const std::string& context, const std::string& continuation,
                  const LabelLexicon& lexicons);

// Hashed bag-of-words embedding, L2-normalized.
std::vector<double> mock_embed(const std::string& text, std::size_t dim = 256);

class ScoringBackend {
 public:
  virtual ~ScoringBackend() = default;
  virtual ScoreResponse score(const ScoreRequest& req) = 0;
  virtual EmbedResponse embed(const EmbedRequest& req) = 0;
};

class MockBackend : public ScoringBackend {
 public:
  explicit MockBackend(LabelLexicon lexicons, std::size_t embed_dim = 256)
      : lexicons_(std::move(lexicons)), embed_dim_(embed_dim) {}

  ScoreResponse score(const ScoreRequest& req) override;
  EmbedResponse embed(const EmbedRequest& req) override;

  const LabelLexicon& lexicons() const { return lexicons_; }
  std::size_t embed_dim() const { return embed_dim_; }

 private:
  LabelLexicon lexicons_;
  std::size_t embed_dim_;
};

// HTTP/1.1 client with bounded retries and exponential backoff.
class HttpBackend : public ScoringBackend {
 public:
  HttpBackend(std::string base_url, int retries = 2, int backoff_initial_ms = 100);

  ScoreResponse score(const ScoreRequest& req) override;
  EmbedResponse embed(const EmbedRequest& req) override;

 private:
  std::string post_with_retries(const std::string& path, const std::string& body);

  std::string host_;
  int port_ = 80;
  int retries_;
  int backoff_initial_ms_;
};

// Test hook: throws backend_error once `limit` calls have been served.
class FaultInjectingBackend : public ScoringBackend {
 public:
  FaultInjectingBackend(ScoringBackend& inner, std::size_t limit)
      : inner_(inner), limit_(limit) {}

  ScoreResponse score(const ScoreRequest& req) override;
  EmbedResponse embed(const EmbedRequest& req) override;
  std::size_t calls() const { return calls_.load(); }

 private:
  void check_budget();
  ScoringBackend& inner_;
  std::size_t limit_;
  std::atomic<std::size_t> calls_{0};
};

// Runs `fn` over [0, count) with up to `parallelism` workers; results are
// stored by index so concurrency never changes downstream ordering. The
// first exception wins and is rethrown after all workers stop.
void parallel_for_indexed(std::size_t count, int parallelism,
                          const std::function<void(std::size_t)>& fn);

// Blocking mock HTTP server for `reqgrid mock-serve` and tests.
// Returns once the server stops (via stop_handle).
class MockServer {
 public:
  MockServer(LabelLexicon lexicons, std::size_t embed_dim = 256);
  ~MockServer();

  // Binds to 127.0.0.1:port (port 0 picks a free port). Starts serving on a
  // background thread and returns the bound port.
  int start(int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace reqgrid

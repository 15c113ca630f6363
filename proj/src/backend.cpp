#include "reqgrid/backend.hpp"

#include <chrono>
#include <cmath>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"

#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

namespace reqgrid {

using nlohmann::json;

namespace {

std::string normalize_name(ScoreNormalize n) {
  return n == ScoreNormalize::MeanLogProb ? "mean" : "sum";
}

ScoreNormalize normalize_from(const std::string& s) {
  if (s == "mean") return ScoreNormalize::MeanLogProb;
  if (s == "sum") return ScoreNormalize::SumLogProb;
  throw backend_error("protocol: unknown normalize mode '" + s + "'");
}

json parse_json_body(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) throw backend_error("protocol: malformed JSON body");
  return j;
}

// json type errors (wrong field types, nulls) become protocol errors
template <typename T>
T field_as(const json& j, const char* key) {
  try {
    return j.at(key).template get<T>();
  } catch (const json::exception& e) {
    throw backend_error("protocol: bad field '" + std::string(key) + "': " + e.what());
  }
}

}  // namespace

std::string serialize_score_request(const ScoreRequest& req) {
  json j;
  j["context"] = req.context;
  j["continuations"] = req.continuations;
  j["normalize"] = normalize_name(req.normalize);
  return j.dump();
}

ScoreRequest parse_score_request(const std::string& body) {
  json j = parse_json_body(body);
  if (!j.contains("context") || !j.contains("continuations") || !j.contains("normalize"))
    throw backend_error("protocol: score request needs context, continuations, normalize");
  ScoreRequest req;
  req.context = field_as<std::string>(j, "context");
  req.continuations = field_as<std::vector<std::string>>(j, "continuations");
  req.normalize = normalize_from(field_as<std::string>(j, "normalize"));
  if (req.context.empty()) throw backend_error("protocol: empty context");
  if (req.continuations.empty()) throw backend_error("protocol: empty continuation list");
  for (const auto& c : req.continuations)
    if (c.empty()) throw backend_error("protocol: empty continuation");
  return req;
}

std::string serialize_score_response(const ScoreResponse& resp) {
  json j;
  j["scores"] = resp.scores;
  return j.dump();
}

ScoreResponse parse_score_response(const std::string& body, std::size_t expected) {
  json j = parse_json_body(body);
  if (!j.contains("scores")) throw backend_error("protocol: score response lacks scores");
  ScoreResponse resp;
  resp.scores = field_as<std::vector<double>>(j, "scores");
  if (resp.scores.size() != expected)
    throw backend_error("protocol: got " + std::to_string(resp.scores.size()) +
                        " scores, expected " + std::to_string(expected));
  for (double s : resp.scores)
    if (!std::isfinite(s)) throw backend_error("protocol: non-finite score");
  return resp;
}

std::string serialize_embed_request(const EmbedRequest& req) {
  json j;
  j["texts"] = req.texts;
  return j.dump();
}

EmbedRequest parse_embed_request(const std::string& body) {
  json j = parse_json_body(body);
  if (!j.contains("texts")) throw backend_error("protocol: embed request lacks texts");
  EmbedRequest req;
  req.texts = field_as<std::vector<std::string>>(j, "texts");
  if (req.texts.empty()) throw backend_error("protocol: empty text list");
  for (const auto& t : req.texts)
    if (t.empty()) throw backend_error("protocol: empty text");
  return req;
}

std::string serialize_embed_response(const EmbedResponse& resp) {
  json j;
  j["vectors"] = resp.vectors;
  return j.dump();
}

EmbedResponse parse_embed_response(const std::string& body, std::size_t expected) {
  json j = parse_json_body(body);
  if (!j.contains("vectors")) throw backend_error("protocol: embed response lacks vectors");
  EmbedResponse resp;
  resp.vectors = field_as<std::vector<std::vector<double>>>(j, "vectors");
  if (resp.vectors.size() != expected)
    throw backend_error("protocol: got " + std::to_string(resp.vectors.size()) +
                        " vectors, expected " + std::to_string(expected));
  std::size_t dim = resp.vectors.empty() ? 0 : resp.vectors.front().size();
  for (const auto& v : resp.vectors) {
    if (v.size() != dim || dim == 0) throw backend_error("protocol: inconsistent vector dimensions");
    for (double c : v)
      if (!std::isfinite(c)) throw backend_error("protocol: non-finite vector component");
  }
  return resp;
}

double mock_score(const std::string& context, const std::string& continuation,
                  const LabelLexicon& lexicons) {
  if (context.empty() || continuation.empty())
    throw backend_error("mock_score: empty input");

  // The continuation is a display label ("usability.", "USABILITY.") or the
  // QA answer token; strip the trailing period before the lexicon lookup.
  std::string key = trim(continuation);
  if (!key.empty() && key.back() == '.') key.pop_back();

  std::vector<std::string> lexicon_tokens;
  if (const auto* terms = lexicons.terms_for(key)) {
    for (const auto& term : *terms)
      for (auto& tok : tokenize(term)) lexicon_tokens.push_back(std::move(tok));
  } else {
    lexicon_tokens = tokenize(continuation);
  }

  std::set<std::string> context_tokens;
  for (auto& tok : tokenize(context)) context_tokens.insert(std::move(tok));
  std::set<std::string> overlap_set;
  for (const auto& tok : lexicon_tokens)
    if (context_tokens.count(tok)) overlap_set.insert(tok);

  std::uint64_t h = fnv1a64(context);
  h = fnv1a64(std::string(1, '\x1f'), h);
  h = fnv1a64(continuation, h);
  double tiebreak = static_cast<double>(h % 1000) / 1e6;
  return static_cast<double>(overlap_set.size()) + tiebreak;
}

std::vector<double> mock_embed(const std::string& text, std::size_t dim) {
  if (dim == 0) throw backend_error("mock_embed: dim must be positive");
  std::vector<std::string> tokens = tokenize(text);
  if (tokens.empty()) throw backend_error("mock_embed: text has no tokens: '" + text + "'");
  std::vector<double> vec(dim, 0.0);
  for (const auto& tok : tokens) vec[fnv1a64(tok) % dim] += 1.0;
  double norm = 0.0;
  for (double c : vec) norm += c * c;
  norm = std::sqrt(norm);
  for (double& c : vec) c /= norm;
  return vec;
}

ScoreResponse MockBackend::score(const ScoreRequest& req) {
  if (req.context.empty()) throw backend_error("mock: empty context");
  if (req.continuations.empty()) throw backend_error("mock: empty continuation list");
  ScoreResponse resp;
  resp.scores.reserve(req.continuations.size());
  for (const auto& c : req.continuations) resp.scores.push_back(mock_score(req.context, c, lexicons_));
  return resp;
}

EmbedResponse MockBackend::embed(const EmbedRequest& req) {
  if (req.texts.empty()) throw backend_error("mock: empty text list");
  EmbedResponse resp;
  resp.vectors.reserve(req.texts.size());
  for (const auto& t : req.texts) resp.vectors.push_back(mock_embed(t, embed_dim_));
  return resp;
}

ScoreResponse FaultInjectingBackend::score(const ScoreRequest& req) {
  check_budget();
  return inner_.score(req);
}

EmbedResponse FaultInjectingBackend::embed(const EmbedRequest& req) {
  check_budget();
  return inner_.embed(req);
}

void FaultInjectingBackend::check_budget() {
  if (calls_.fetch_add(1) >= limit_)
    throw backend_error("injected fault: backend call budget exhausted");
}

void parallel_for_indexed(std::size_t count, int parallelism,
                          const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  int workers = std::max(1, parallelism);
  if (static_cast<std::size_t>(workers) > count) workers = static_cast<int>(count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      while (!failed.load()) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          break;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace reqgrid

#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "reqgrid/backend.hpp"
#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

namespace reqgrid {

namespace {

void split_url(const std::string& url, std::string& host, int& port) {
  std::string rest = url;
  if (starts_with(rest, "http://")) rest = rest.substr(7);
  else if (starts_with(rest, "https://"))
    throw config_error("backend url: only http:// endpoints are supported: " + url);
  std::size_t slash = rest.find('/');
  if (slash != std::string::npos) rest = rest.substr(0, slash);
  std::size_t colon = rest.find(':');
  if (colon == std::string::npos) {
    host = rest;
    port = 80;
  } else {
    host = rest.substr(0, colon);
    port = std::stoi(rest.substr(colon + 1));
  }
  if (host.empty()) throw config_error("backend url: missing host in " + url);
}

}  // namespace

HttpBackend::HttpBackend(std::string base_url, int retries, int backoff_initial_ms)
    : retries_(retries), backoff_initial_ms_(backoff_initial_ms) {
  split_url(base_url, host_, port_);
}

std::string HttpBackend::post_with_retries(const std::string& path, const std::string& body) {
  std::string last_error;
  for (int attempt = 0; attempt <= retries_; ++attempt) {
    if (attempt > 0) {
      auto delay = std::chrono::milliseconds(backoff_initial_ms_ << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }
    httplib::Client client(host_, port_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(60, 0);
    auto res = client.Post(path.c_str(), body, "application/json");
    if (!res) {
      last_error = "connection failed (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status == 200) return res->body;
    if (res->status == 400) {
      // client error: the server rejected the request, retrying cannot help
      auto j = nlohmann::json::parse(res->body, nullptr, false);
      std::string msg = (!j.is_discarded() && j.contains("error"))
                            ? j["error"].get<std::string>()
                            : res->body;
      throw backend_error("backend rejected request: " + msg);
    }
    last_error = "HTTP status " + std::to_string(res->status);
  }
  throw backend_error("backend unavailable after " + std::to_string(retries_ + 1) +
                      " attempts: " + last_error);
}

ScoreResponse HttpBackend::score(const ScoreRequest& req) {
  std::string body = post_with_retries("/v1/score", serialize_score_request(req));
  return parse_score_response(body, req.continuations.size());
}

EmbedResponse HttpBackend::embed(const EmbedRequest& req) {
  std::string body = post_with_retries("/v1/embed", serialize_embed_request(req));
  return parse_embed_response(body, req.texts.size());
}

struct MockServer::Impl {
  MockBackend backend;
  httplib::Server server;
  std::thread thread;

  explicit Impl(LabelLexicon lexicons, std::size_t embed_dim)
      : backend(std::move(lexicons), embed_dim) {}
};

MockServer::MockServer(LabelLexicon lexicons, std::size_t embed_dim)
    : impl_(std::make_unique<Impl>(std::move(lexicons), embed_dim)) {
  auto* impl = impl_.get();
  auto fail = [](httplib::Response& res, const std::string& message) {
    nlohmann::json j;
    j["error"] = message;
    res.status = 400;
    res.set_content(j.dump(), "application/json");
  };
  impl->server.Post("/v1/score", [impl, fail](const httplib::Request& req, httplib::Response& res) {
    try {
      ScoreRequest sr = parse_score_request(req.body);
      res.set_content(serialize_score_response(impl->backend.score(sr)), "application/json");
    } catch (const std::exception& e) {
      fail(res, e.what());
    }
  });
  impl->server.Post("/v1/embed", [impl, fail](const httplib::Request& req, httplib::Response& res) {
    try {
      EmbedRequest er = parse_embed_request(req.body);
      res.set_content(serialize_embed_response(impl->backend.embed(er)), "application/json");
    } catch (const std::exception& e) {
      fail(res, e.what());
    }
  });
}

MockServer::~MockServer() { stop(); }

int MockServer::start(int port) {
  auto* impl = impl_.get();
  int bound = port;
  if (port == 0) {
    bound = impl->server.bind_to_any_port("127.0.0.1");
    if (bound <= 0) throw backend_error("mock server: failed to bind to a free port");
  } else {
    if (!impl->server.bind_to_port("127.0.0.1", port))
      throw backend_error("mock server: failed to bind to port " + std::to_string(port));
  }
  impl->thread = std::thread([impl] { impl->server.listen_after_bind(); });
  impl->server.wait_until_ready();
  return bound;
}

void MockServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace reqgrid

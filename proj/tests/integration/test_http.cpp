#include "doctest.h"

#include "reqgrid/backend.hpp"
#include "reqgrid/config.hpp"
#include "reqgrid/error.hpp"

using namespace reqgrid;

TEST_SUITE_BEGIN("http");

TEST_CASE("score and embed round-trip through the wire protocol") {
  MockServer server(default_label_lexicons());
  int port = server.start(0);
  HttpBackend client("http://127.0.0.1:" + std::to_string(port), 2, 10);

  ScoreRequest req;
  req.context = "The system shall encrypt all customer records";
  req.continuations = {"sec.", "nonsec."};
  ScoreResponse resp = client.score(req);
  REQUIRE(resp.scores.size() == 2);

  // the HTTP path must agree exactly with the in-process mock
  MockBackend local(default_label_lexicons());
  ScoreResponse direct = local.score(req);
  CHECK(resp.scores == direct.scores);

  EmbedRequest er;
  er.texts = {"alpha beta", "gamma"};
  EmbedResponse ev = client.embed(er);
  REQUIRE(ev.vectors.size() == 2);
  CHECK(ev.vectors == local.embed(er).vectors);

  server.stop();
}

TEST_CASE("malformed request bodies get HTTP 400 with an error payload") {
  MockServer server(default_label_lexicons());
  int port = server.start(0);
  HttpBackend client("http://127.0.0.1:" + std::to_string(port), 0, 10);

  // empty continuation list violates the protocol; client raises without retrying
  ScoreRequest bad;
  bad.context = "ctx";
  bad.continuations = {};
  CHECK_THROWS_AS(client.score(bad), backend_error);

  server.stop();
}

TEST_CASE("unreachable endpoint fails after the configured retries") {
  // nothing listens on this port; 2 retries = 3 attempts
  HttpBackend client("http://127.0.0.1:1", 2, 1);
  ScoreRequest req;
  req.context = "ctx";
  req.continuations = {"a"};
  CHECK_THROWS_WITH_AS(client.score(req), doctest::Contains("3 attempts"), backend_error);
}

TEST_CASE("identical requests give bitwise-identical responses over HTTP") {
  MockServer server(default_label_lexicons());
  int port = server.start(0);
  HttpBackend client("http://127.0.0.1:" + std::to_string(port), 1, 10);

  ScoreRequest req;
  req.context = "The interface shall be easy to learn for a new user";
  req.continuations = {"Usability.", "Security.", "Operational."};
  ScoreResponse a = client.score(req);
  ScoreResponse b = client.score(req);
  CHECK(a.scores == b.scores);

  server.stop();
}

TEST_SUITE_END();

#include <cmath>
#include <set>

#include "doctest.h"

#include "reqgrid/backend.hpp"
#include "reqgrid/config.hpp"
#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

using namespace reqgrid;

TEST_SUITE_BEGIN("backend");

TEST_CASE("protocol round-trip on golden messages") {
  // serialize(parse(m)) == m for canonical wire messages
  const std::string score_req =
      R"({"context":"This requirement: \"x\" is about ","continuations":["usability.","security."],"normalize":"mean"})";
  CHECK(serialize_score_request(parse_score_request(score_req)) == score_req);

  const std::string score_resp = R"({"scores":[-1.25,0.5]})";
  CHECK(serialize_score_response(parse_score_response(score_resp, 2)) == score_resp);

  const std::string embed_req = R"({"texts":["alpha","beta gamma"]})";
  CHECK(serialize_embed_request(parse_embed_request(embed_req)) == embed_req);

  const std::string embed_resp = R"({"vectors":[[0.0,1.0],[0.5,0.5]]})";
  CHECK(serialize_embed_response(parse_embed_response(embed_resp, 2)) == embed_resp);
}

TEST_CASE("protocol validation errors") {
  CHECK_THROWS_AS(parse_score_request("{not json"), backend_error);
  CHECK_THROWS_AS(parse_score_request(R"({"context":"c","continuations":[],"normalize":"mean"})"),
                  backend_error);
  CHECK_THROWS_AS(parse_score_request(R"({"context":"c","continuations":["x"],"normalize":"q"})"),
                  backend_error);
  CHECK_THROWS_AS(parse_score_response(R"({"scores":[1.0]})", 2), backend_error);
  CHECK_THROWS_AS(parse_score_response(R"({"scores":[null]})", 1), backend_error);
  CHECK_THROWS_AS(parse_embed_response(R"({"vectors":[[1.0],[1.0,2.0]]})", 2), backend_error);
}

TEST_CASE("mock_score: lexicon overlap dominates, hash breaks ties") {
  LabelLexicon lex = default_label_lexicons();
  double hit = mock_score("The system shall encrypt all records to keep them secure",
                          "sec.", lex);
  CHECK(hit >= 2.0);  // "encrypt" and "secure" both overlap

  double near_miss = mock_score("The report shall list totals", "sec.", lex);
  CHECK(near_miss < 0.001);
  CHECK(near_miss >= 0.0);

  // disjoint token sets with no lexicon entry: overlap 0, tiebreak only
  LabelLexicon empty;
  double tiny = mock_score("alpha beta", "gamma", empty);
  CHECK(tiny >= 0.0);
  CHECK(tiny < 0.001);
}

TEST_CASE("mock_score is a pure function of its inputs") {
  LabelLexicon lex = default_label_lexicons();
  for (int i = 0; i < 10; ++i)
    CHECK(mock_score("context words here", "usability.", lex) ==
          mock_score("context words here", "usability.", lex));
  // the tiebreak distinguishes contexts even with identical overlap
  CHECK(mock_score("alpha beta", "gamma", lex) != mock_score("alpha betb", "gamma", lex));
}

TEST_CASE("mock_score matches the documented tiebreak formula") {
  LabelLexicon empty;
  std::string context = "first words";
  std::string continuation = "other";
  std::uint64_t h = fnv1a64(context + std::string(1, '\x1f') + continuation);
  double expected = double(h % 1000) / 1e6;
  CHECK(mock_score(context, continuation, empty) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("mock_embed: unit norm, direction invariance, disjoint orthogonality") {
  auto v = mock_embed("any text at all", 256);
  double norm = 0.0;
  for (double c : v) norm += c * c;
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-12));

  // repeated token: same direction
  auto once = mock_embed("alpha", 64);
  auto twice = mock_embed("alpha alpha", 64);
  double dot = 0.0;
  for (std::size_t i = 0; i < once.size(); ++i) dot += once[i] * twice[i];
  CHECK(dot == doctest::Approx(1.0).epsilon(1e-12));

  // token-disjoint texts at a huge dimension: no collision, cosine 0
  auto a = mock_embed("alpha beta", 1 << 20);
  auto b = mock_embed("gamma delta", 1 << 20);
  double cross = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) cross += a[i] * b[i];
  CHECK(cross == doctest::Approx(0.0).epsilon(1e-15));

  CHECK_THROWS_AS(mock_embed("...", 16), backend_error);
}

TEST_CASE("MockBackend keeps score alignment with continuations") {
  MockBackend backend(default_label_lexicons());
  ScoreRequest req;
  req.context = "The interface shall be easy for a new user to learn";
  req.continuations = {"Usability.", "Security.", "Performance.", "Legal."};
  ScoreResponse resp = backend.score(req);
  REQUIRE(resp.scores.size() == 4);
  // 4 continuations -> 4 scores; the usability candidate overlaps most
  for (std::size_t i = 1; i < resp.scores.size(); ++i)
    CHECK(resp.scores[0] > resp.scores[i]);

  ScoreResponse again = backend.score(req);
  CHECK(resp.scores == again.scores);
}

TEST_CASE("fault injection trips after the call budget") {
  MockBackend inner(default_label_lexicons());
  FaultInjectingBackend flaky(inner, 2);
  ScoreRequest req;
  req.context = "ctx";
  req.continuations = {"a"};
  CHECK_NOTHROW(flaky.score(req));
  CHECK_NOTHROW(flaky.score(req));
  CHECK_THROWS_AS(flaky.score(req), backend_error);
}

TEST_CASE("parallel_for_indexed preserves per-index results and reports errors") {
  std::vector<int> out(500, 0);
  parallel_for_indexed(500, 8, [&](std::size_t i) { out[i] = int(i) * 3; });
  for (int i = 0; i < 500; ++i) CHECK(out[i] == i * 3);

  CHECK_THROWS_AS(parallel_for_indexed(100, 4,
                                       [&](std::size_t i) {
                                         if (i == 37) throw backend_error("boom");
                                       }),
                  backend_error);
}

TEST_SUITE_END();

#include <fstream>
#include <sstream>

#include "doctest.h"

#include "reqgrid/config.hpp"
#include "reqgrid/error.hpp"
#include "reqgrid/prompts.hpp"

using namespace reqgrid;

TEST_SUITE_BEGIN("prompts");

namespace {

const std::string kText = "The system shall allow users to reset their password";

std::string golden_serialize(const RenderedPrompt& p) {
  std::ostringstream out;
  out << "context: " << p.context << "\n";
  out << "continuation: " << p.continuation << "\n";
  out << "answer_mode: " << (p.answer_mode == AnswerMode::YesToken ? "yes" : "span") << "\n";
  out << "full: " << p.context << p.continuation << "\n";
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

TEST_CASE("all six canonical patterns render byte-identically to golden files") {
  DefinitionLexicon defs = default_definitions();
  for (const auto& pattern : canonical_patterns()) {
    CAPTURE(pattern.id());
    RenderedPrompt rendered = render_prompt(pattern, kText, "usability", &defs);
    std::string golden =
        read_file(std::string(REQGRID_GOLDEN_DIR) + "/prompt_" + pattern.id() + ".txt");
    CHECK(golden_serialize(rendered) == golden);
  }
}

TEST_CASE("is-about assertion splits at the label boundary") {
  RenderedPrompt r = render_prompt(canonical_pattern(Relation::IsAbout, PromptFamily::Assertion),
                                   kText, "usability");
  CHECK(r.context == "This requirement: \"" + kText + "\" is about ");
  CHECK(r.continuation == "usability.");
  CHECK(r.answer_mode == AnswerMode::SpanLikelihood);
}

TEST_CASE("belongs-to QA scores the literal Yes token") {
  RenderedPrompt r = render_prompt(canonical_pattern(Relation::BelongsTo, PromptFamily::QA),
                                   kText, "usability");
  CHECK(r.context == "Does this requirement: \"" + kText + "\" belong to usability? Answer: ");
  CHECK(r.continuation == "Yes");
  CHECK(r.answer_mode == AnswerMode::YesToken);
}

TEST_CASE("definition family prefixes the lexicon sentence") {
  DefinitionLexicon defs = default_definitions();
  RenderedPrompt r = render_prompt(canonical_pattern(Relation::IsAbout, PromptFamily::Definition),
                                   kText, "usability", &defs);
  CHECK(r.context.rfind("Usability requirements are quality requirements", 0) == 0);
  CHECK(r.context.find("Therefore, this requirement: \"" + kText + "\" is about ") !=
        std::string::npos);
  CHECK(r.continuation == "usability.");
}

TEST_CASE("context + continuation reproduces the full template instantiation") {
  DefinitionLexicon defs = default_definitions();
  for (const auto& pattern : canonical_patterns()) {
    RenderedPrompt r = render_prompt(pattern, kText, "usability", &defs);
    std::string expected = pattern.template_text;
    auto sub = [&](const std::string& ph, const std::string& val) {
      std::size_t pos = expected.find(ph);
      if (pos != std::string::npos) expected.replace(pos, ph.size(), val);
    };
    sub("{definition}", defs.definition_for("usability"));
    sub("{text}", kText);
    sub("{label}", "usability");
    CHECK(r.context + r.continuation == expected);
  }
}

TEST_CASE("rendering is deterministic") {
  DefinitionLexicon defs = default_definitions();
  for (const auto& pattern : canonical_patterns()) {
    RenderedPrompt a = render_prompt(pattern, kText, "usability", &defs);
    RenderedPrompt b = render_prompt(pattern, kText, "usability", &defs);
    CHECK(a == b);
  }
}

TEST_CASE("missing definition and bad templates are rejected") {
  DefinitionLexicon defs;
  defs.entries["other"] = "Something else.";
  CHECK_THROWS_AS(render_prompt(canonical_pattern(Relation::IsAbout, PromptFamily::Definition),
                                kText, "usability", &defs),
                  config_error);
  CHECK_THROWS_AS(render_prompt(canonical_pattern(Relation::IsAbout, PromptFamily::Definition),
                                kText, "usability", nullptr),
                  config_error);

  PromptPattern broken{Relation::IsAbout, PromptFamily::Assertion, "no placeholders at all."};
  CHECK_THROWS_AS(broken.validate(), config_error);
  PromptPattern twice{Relation::IsAbout, PromptFamily::Assertion,
                      "{text} {label} and {label}."};
  CHECK_THROWS_AS(twice.validate(), config_error);
  PromptPattern tail{Relation::IsAbout, PromptFamily::Assertion,
                     "This {text} is about {label} maybe."};
  CHECK_THROWS_AS(tail.validate(), config_error);
}

TEST_CASE("candidate_prompts follows roster order and keeps class identity") {
  std::vector<Requirement> reqs;
  for (const auto& cls : {"Usability", "Security", "Operational", "Performance"}) {
    Requirement r;
    r.id = std::string("R-") + cls;
    r.text = "The interface shall be simple";
    r.labels["promise"] = cls;
    reqs.push_back(r);
  }
  TaskSpec spec;
  spec.name = "NFR-Top4";
  spec.kind = TaskKind::Multiclass;
  spec.labeling_scheme = "promise";
  spec.classes = {"Usability", "Security", "Operational", "Performance"};
  TaskInstance task = materialize_task(reqs, spec);

  auto plain = candidate_prompts(task, reqs[0],
                                 canonical_pattern(Relation::IsAbout, PromptFamily::Assertion));
  REQUIRE(plain.size() == 4);
  CHECK(plain[0].first == "Usability");
  CHECK(plain[3].first == "Performance");

  auto upper = candidate_prompts(task, reqs[0],
                                 canonical_pattern(Relation::IsAbout, PromptFamily::Assertion),
                                 VariationKind::LabelUpper);
  CHECK(upper[0].first == "Usability");             // identity untouched
  CHECK(upper[0].second.continuation == "USABILITY.");  // display transformed
}

TEST_CASE("binary roster yields two candidates, positive first when listed first") {
  std::vector<Requirement> reqs(1);
  reqs[0].id = "R1";
  reqs[0].text = "The system shall encrypt data";
  reqs[0].labels["secreq"] = "sec";
  TaskSpec spec;
  spec.name = "Security";
  spec.kind = TaskKind::Binary;
  spec.labeling_scheme = "secreq";
  spec.classes = {"sec", "nonsec"};
  spec.positive_class = "sec";
  TaskInstance task = materialize_task(reqs, spec);
  auto cands = candidate_prompts(task, reqs[0],
                                 canonical_pattern(Relation::BelongsTo, PromptFamily::Assertion));
  REQUIRE(cands.size() == 2);
  CHECK(cands[0].first == "sec");
  CHECK(cands[1].first == "nonsec");
}

TEST_SUITE_END();

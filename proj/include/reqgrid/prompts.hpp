#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reqgrid/corpus.hpp"
#include "reqgrid/variations.hpp"

namespace reqgrid {

enum class Relation { IsAbout, BelongsTo };
enum class PromptFamily { Assertion, Definition, QA };
enum class AnswerMode { SpanLikelihood, YesToken };

// A reusable prompt template with {text}, {label} and (Definition family)
// {definition} placeholders. Span-scored templates must end with "{label}.";
// QA templates must end with the literal answer token "Yes" so the rendered
// string splits cleanly into (context, continuation).
struct PromptPattern {
  Relation relation = Relation::IsAbout;
  PromptFamily family = PromptFamily::Assertion;
  std::string template_text;

  std::string id() const;  // e.g. "is-about-assertion"
  void validate() const;
};

// One-sentence class definitions used by the Definition family.
struct DefinitionLexicon {
  std::map<std::string, std::string> entries;

  const std::string& definition_for(const std::string& class_name) const;
};

struct RenderedPrompt {
  std::string context;       // everything the backend conditions on
  std::string continuation;  // candidate span to be scored
  AnswerMode answer_mode = AnswerMode::SpanLikelihood;

  bool operator==(const RenderedPrompt&) const = default;
};

const PromptPattern& canonical_pattern(Relation relation, PromptFamily family);
const std::vector<PromptPattern>& canonical_patterns();  // the six, fixed order
std::optional<PromptPattern> pattern_from_id(const std::string& id);

std::string relation_name(Relation r);
std::string family_name(PromptFamily f);

RenderedPrompt render_prompt(const PromptPattern& pattern, const std::string& req_text,
                             const std::string& display_label,
                             const DefinitionLexicon* lexicon = nullptr);

// One candidate per roster class, in roster order. Display labels pass
// through the active label variation; the class-name field stays untouched.
std::vector<std::pair<std::string, RenderedPrompt>> candidate_prompts(
    const TaskInstance& task, const Requirement& req, const PromptPattern& pattern,
    std::optional<VariationKind> label_variation = std::nullopt,
    const DefinitionLexicon* lexicon = nullptr);

}  // namespace reqgrid

#include "reqgrid/prompts.hpp"

#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

namespace reqgrid {

namespace {

std::size_t count_occurrences(const std::string& s, const std::string& needle) {
  std::size_t count = 0;
  std::size_t pos = 0;
  while ((pos = s.find(needle, pos)) != std::string::npos) {
    ++count;
    pos += needle.size();
  }
  return count;
}

std::string replace_once(std::string s, const std::string& placeholder, const std::string& value) {
  std::size_t pos = s.find(placeholder);
  if (pos != std::string::npos) s.replace(pos, placeholder.size(), value);
  return s;
}

}  // namespace

std::string relation_name(Relation r) {
  return r == Relation::IsAbout ? "is-about" : "belongs-to";
}

std::string family_name(PromptFamily f) {
  switch (f) {
    case PromptFamily::Assertion: return "assertion";
    case PromptFamily::Definition: return "definition";
    case PromptFamily::QA: return "qa";
  }
  return "unknown";
}

std::string PromptPattern::id() const {
  return relation_name(relation) + "-" + family_name(family);
}

void PromptPattern::validate() const {
  if (count_occurrences(template_text, "{text}") != 1)
    throw config_error("pattern " + id() + ": template must contain {text} exactly once");
  if (count_occurrences(template_text, "{label}") != 1)
    throw config_error("pattern " + id() + ": template must contain {label} exactly once");
  if (family == PromptFamily::Definition) {
    if (template_text.find("{definition}") == std::string::npos)
      throw config_error("pattern " + id() + ": definition template must contain {definition}");
  } else if (template_text.find("{definition}") != std::string::npos) {
    throw config_error("pattern " + id() + ": {definition} is only valid in the definition family");
  }
  if (family == PromptFamily::QA) {
    if (!ends_with(template_text, "Yes"))
      throw config_error("pattern " + id() + ": QA template must end with the answer token 'Yes'");
  } else {
    if (!ends_with(template_text, "{label}."))
      throw config_error("pattern " + id() + ": span-scored template must end with \"{label}.\"");
  }
}

const std::vector<PromptPattern>& canonical_patterns() {
  static const std::vector<PromptPattern> patterns = {
      {Relation::IsAbout, PromptFamily::Assertion,
       "This requirement: \"{text}\" is about {label}."},
      {Relation::IsAbout, PromptFamily::Definition,
       "{definition} Therefore, this requirement: \"{text}\" is about {label}."},
      {Relation::IsAbout, PromptFamily::QA,
       "Is this requirement: \"{text}\" about {label}? Answer: Yes"},
      {Relation::BelongsTo, PromptFamily::Assertion,
       "This requirement: \"{text}\" belongs to {label}."},
      {Relation::BelongsTo, PromptFamily::Definition,
       "{definition} Therefore, this requirement: \"{text}\" belongs to {label}."},
      {Relation::BelongsTo, PromptFamily::QA,
       "Does this requirement: \"{text}\" belong to {label}? Answer: Yes"},
  };
  return patterns;
}

const PromptPattern& canonical_pattern(Relation relation, PromptFamily family) {
  for (const auto& p : canonical_patterns())
    if (p.relation == relation && p.family == family) return p;
  throw config_error("no canonical pattern for relation/family");
}

std::optional<PromptPattern> pattern_from_id(const std::string& id) {
  for (const auto& p : canonical_patterns())
    if (p.id() == id) return p;
  return std::nullopt;
}

const std::string& DefinitionLexicon::definition_for(const std::string& class_name) const {
  auto it = entries.find(class_name);
  if (it != entries.end()) return it->second;
  // Label variations only change case, so a case-insensitive match still
  // resolves the class identity.
  const std::string wanted = to_lower(class_name);
  for (const auto& [key, value] : entries)
    if (to_lower(key) == wanted) return value;
  throw config_error("definition lexicon has no entry for class '" + class_name + "'");
}

RenderedPrompt render_prompt(const PromptPattern& pattern, const std::string& req_text,
                             const std::string& display_label, const DefinitionLexicon* lexicon) {
  pattern.validate();
  if (trim(req_text).empty()) throw config_error("render_prompt: empty requirement text");
  if (trim(display_label).empty()) throw config_error("render_prompt: empty display label");

  std::string rendered = pattern.template_text;
  if (pattern.family == PromptFamily::Definition) {
    if (lexicon == nullptr)
      throw config_error("pattern " + pattern.id() + " requires a definition lexicon");
    rendered = replace_once(rendered, "{definition}", lexicon->definition_for(display_label));
  }
  rendered = replace_once(rendered, "{text}", req_text);

  RenderedPrompt out;
  if (pattern.family == PromptFamily::QA) {
    // Question plus "Answer: " is the context; the scored token is "Yes".
    rendered = replace_once(rendered, "{label}", display_label);
    out.context = rendered.substr(0, rendered.size() - 3);
    out.continuation = "Yes";
    out.answer_mode = AnswerMode::YesToken;
  } else {
    std::size_t label_pos = rendered.find("{label}");
    out.context = rendered.substr(0, label_pos);
    out.continuation = display_label + ".";
    out.answer_mode = AnswerMode::SpanLikelihood;
  }
  if (out.context.find('{') != std::string::npos &&
      (out.context.find("{text}") != std::string::npos ||
       out.context.find("{label}") != std::string::npos ||
       out.context.find("{definition}") != std::string::npos))
    throw config_error("pattern " + pattern.id() + ": unsubstituted placeholder in render");
  return out;
}

std::vector<std::pair<std::string, RenderedPrompt>> candidate_prompts(
    const TaskInstance& task, const Requirement& req, const PromptPattern& pattern,
    std::optional<VariationKind> label_variation, const DefinitionLexicon* lexicon) {
  std::vector<std::pair<std::string, RenderedPrompt>> out;
  out.reserve(task.spec.classes.size());
  for (const auto& cls : task.spec.classes) {
    std::string display = cls;
    if (label_variation && is_label_variation(*label_variation))
      display = apply_label_variation(display, *label_variation);
    out.emplace_back(cls, render_prompt(pattern, req.text, display, lexicon));
  }
  return out;
}

}  // namespace reqgrid

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace reqgrid {

// The five dataset variations. The first two transform requirement text,
// the remaining three transform the class label shown to the classifier.
enum class VariationKind {
  PunctStrip,
  SentenceComplete,
  LabelLower,
  LabelUpper,
  LabelCapitalized,
};

bool is_text_variation(VariationKind kind);
bool is_label_variation(VariationKind kind);

std::string variation_name(VariationKind kind);
std::optional<VariationKind> variation_from_name(const std::string& name);
const std::vector<VariationKind>& all_variations();

// Punctuation stripped by PunctStrip; overridable via config key
// variations.punct_chars. Entries are UTF-8 strings (the em dash is
// multi-byte).
const std::vector<std::string>& default_punct_chars();

// PunctStrip: remove punctuation, collapse space runs, trim. Throws if the
// text was punctuation only. SentenceComplete: trim trailing whitespace and
// append "." unless already terminated by . ! or ?.
std::string apply_text_variation(const std::string& text, VariationKind kind,
                                 const std::vector<std::string>& punct_chars = default_punct_chars());

// ASCII case transforms; label identity is tracked separately by callers so
// these only ever touch the display string.
std::string apply_label_variation(const std::string& label, VariationKind kind);

}  // namespace reqgrid

#include "reqgrid/variations.hpp"

#include <cctype>

#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

namespace reqgrid {

bool is_text_variation(VariationKind kind) {
  return kind == VariationKind::PunctStrip || kind == VariationKind::SentenceComplete;
}

bool is_label_variation(VariationKind kind) { return !is_text_variation(kind); }

std::string variation_name(VariationKind kind) {
  switch (kind) {
    case VariationKind::PunctStrip: return "punct-strip";
    case VariationKind::SentenceComplete: return "sentence-complete";
    case VariationKind::LabelLower: return "label-lower";
    case VariationKind::LabelUpper: return "label-upper";
    case VariationKind::LabelCapitalized: return "label-capitalized";
  }
  return "unknown";
}

std::optional<VariationKind> variation_from_name(const std::string& name) {
  for (VariationKind k : all_variations())
    if (variation_name(k) == name) return k;
  return std::nullopt;
}

const std::vector<VariationKind>& all_variations() {
  static const std::vector<VariationKind> kinds = {
      VariationKind::PunctStrip,       VariationKind::SentenceComplete,
      VariationKind::LabelLower,       VariationKind::LabelUpper,
      VariationKind::LabelCapitalized,
  };
  return kinds;
}

const std::vector<std::string>& default_punct_chars() {
  static const std::vector<std::string> chars = {
      ".", ",", ";", ":", "!", "?", "\"", "'", "(", ")", "[", "]", "—",
  };
  return chars;
}

namespace {

std::string strip_punctuation(const std::string& text, const std::vector<std::string>& punct) {
  std::string out = text;
  for (const auto& p : punct) {
    if (p.empty()) continue;
    std::string next;
    next.reserve(out.size());
    std::size_t pos = 0;
    while (pos < out.size()) {
      if (out.compare(pos, p.size(), p) == 0) {
        pos += p.size();
      } else {
        next.push_back(out[pos]);
        ++pos;
      }
    }
    out = std::move(next);
  }
  // collapse space runs left behind by removed tokens
  std::string collapsed;
  collapsed.reserve(out.size());
  bool prev_space = false;
  for (char c : out) {
    if (c == ' ') {
      if (!prev_space) collapsed.push_back(c);
      prev_space = true;
    } else {
      collapsed.push_back(c);
      prev_space = false;
    }
  }
  return trim(collapsed);
}

}  // namespace

std::string apply_text_variation(const std::string& text, VariationKind kind,
                                 const std::vector<std::string>& punct_chars) {
  if (!is_text_variation(kind))
    throw config_error("apply_text_variation called with label variation " + variation_name(kind));
  if (kind == VariationKind::PunctStrip) {
    std::string out = strip_punctuation(text, punct_chars);
    if (out.empty())
      throw config_error("punct-strip produced empty text (input was all punctuation): '" + text + "'");
    return out;
  }
  // SentenceComplete
  std::string out = rtrim(text);
  if (out.empty() || (out.back() != '.' && out.back() != '!' && out.back() != '?')) out += '.';
  return out;
}

std::string apply_label_variation(const std::string& label, VariationKind kind) {
  if (!is_label_variation(kind))
    throw config_error("apply_label_variation called with text variation " + variation_name(kind));
  switch (kind) {
    case VariationKind::LabelLower: return to_lower(label);
    case VariationKind::LabelUpper: return to_upper(label);
    default: break;
  }
  // LabelCapitalized: first letter of each whitespace-separated word upper,
  // rest lower. Non-letter leading characters pass through toupper untouched.
  std::string out = label;
  bool word_start = true;
  for (char& c : out) {
    unsigned char uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      word_start = true;
    } else {
      c = static_cast<char>(word_start ? std::toupper(uc) : std::tolower(uc));
      word_start = false;
    }
  }
  return out;
}

}  // namespace reqgrid

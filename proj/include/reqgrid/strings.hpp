#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace reqgrid {

std::string trim(std::string_view s);
std::string rtrim(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

// Lowercased tokens split on every non-alphanumeric ASCII byte.
std::vector<std::string> tokenize(std::string_view s);

std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed);

// Shortest round-trippable decimal form; the single formatter behind every
// CSV/report number so identical values always print identically.
std::string format_double(double v);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

}  // namespace reqgrid

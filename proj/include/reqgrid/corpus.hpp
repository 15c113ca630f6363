#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reqgrid {

// One natural-language requirement statement with its gold labels, one per
// labeling scheme (column) in the source file.
struct Requirement {
  std::string id;
  std::string project;
  std::string text;
  std::map<std::string, std::string> labels;  // scheme name -> class name

  const std::string& label(const std::string& scheme) const;
};

enum class TaskKind { Binary, Multiclass };

struct TaskSpec {
  std::string name;
  TaskKind kind = TaskKind::Binary;
  std::string labeling_scheme;
  std::vector<std::string> classes;  // roster order is significant
  std::optional<std::string> positive_class;

  // Throws config_error if the roster violates the kind's shape.
  void validate() const;
  int class_index(const std::string& cls) const;  // -1 when absent
};

// A task roster applied to a concrete requirement list, in file order.
struct TaskInstance {
  TaskSpec spec;
  std::vector<Requirement> requirements;
  std::map<std::string, std::size_t> class_supports;
  std::vector<std::string> warnings;

  std::size_t size() const { return requirements.size(); }
  const std::string& gold(std::size_t i) const;
};

// Canonical dataset CSV: header `id,project,text,<scheme...>`, RFC-4180.
// Every row must carry all expected schemes; rows come back in file order.
std::vector<Requirement> load_dataset(const std::string& path,
                                      const std::vector<std::string>& expected_schemes);

// Inverse of load_dataset for the given scheme columns (round-trip exact).
std::string serialize_dataset(const std::vector<Requirement>& reqs,
                              const std::vector<std::string>& schemes);

// Keeps only requirements whose gold label is on the roster and tallies
// supports. Empty result is a configuration error; a binary class with zero
// support is recorded as a warning on the instance.
TaskInstance materialize_task(const std::vector<Requirement>& reqs, const TaskSpec& spec);

}  // namespace reqgrid

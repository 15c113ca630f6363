#include "reqgrid/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "reqgrid/csv.hpp"
#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

namespace reqgrid {

const std::string& Requirement::label(const std::string& scheme) const {
  auto it = labels.find(scheme);
  if (it == labels.end())
    throw config_error("requirement " + id + " has no label under scheme '" + scheme + "'");
  return it->second;
}

void TaskSpec::validate() const {
  if (name.empty()) throw config_error("task has no name");
  if (labeling_scheme.empty())
    throw config_error("task " + name + ": labeling_scheme is empty");
  std::set<std::string> seen(classes.begin(), classes.end());
  if (seen.size() != classes.size())
    throw config_error("task " + name + ": duplicate class names in roster");
  if (kind == TaskKind::Binary) {
    if (classes.size() != 2)
      throw config_error("task " + name + ": binary task needs exactly 2 classes, got " +
                         std::to_string(classes.size()));
    if (!positive_class || class_index(*positive_class) < 0)
      throw config_error("task " + name + ": binary task needs positive_class from the roster");
  } else {
    if (classes.size() < 3)
      throw config_error("task " + name + ": multiclass task needs >= 3 classes, got " +
                         std::to_string(classes.size()));
  }
}

int TaskSpec::class_index(const std::string& cls) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i] == cls) return static_cast<int>(i);
  return -1;
}

const std::string& TaskInstance::gold(std::size_t i) const {
  return requirements.at(i).label(spec.labeling_scheme);
}

std::vector<Requirement> load_dataset(const std::string& path,
                                      const std::vector<std::string>& expected_schemes) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open dataset file: " + path);

  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.read_record(header)) throw io_error("dataset file is empty: " + path);

  if (header.size() < 3 || header[0] != "id" || header[1] != "project" || header[2] != "text")
    throw config_error(path + ": header must start with id,project,text");

  std::vector<std::string> schemes(header.begin() + 3, header.end());
  for (const auto& want : expected_schemes) {
    bool found = false;
    for (const auto& have : schemes)
      if (have == want) found = true;
    if (!found) throw config_error(path + ": missing labeling-scheme column '" + want + "'");
  }

  std::vector<Requirement> reqs;
  std::set<std::string> ids;
  std::vector<std::string> fields;
  std::size_t row = 0;
  while (reader.read_record(fields)) {
    ++row;
    if (fields.size() != header.size())
      throw io_error(path + ": row " + std::to_string(row) + " has " +
                     std::to_string(fields.size()) + " fields, expected " +
                     std::to_string(header.size()));
    Requirement r;
    r.id = trim(fields[0]);
    r.project = fields[1];
    r.text = fields[2];
    if (trim(r.text).empty())
      throw io_error(path + ": row " + std::to_string(row) + " has empty text");
    if (r.id.empty())
      throw io_error(path + ": row " + std::to_string(row) + " has empty id");
    if (!ids.insert(r.id).second)
      throw io_error(path + ": duplicate requirement id '" + r.id + "' at row " +
                     std::to_string(row));
    for (std::size_t s = 0; s < schemes.size(); ++s)
      r.labels[schemes[s]] = trim(fields[3 + s]);
    reqs.push_back(std::move(r));
  }
  return reqs;
}

std::string serialize_dataset(const std::vector<Requirement>& reqs,
                              const std::vector<std::string>& schemes) {
  std::ostringstream out;
  std::vector<std::string> fields = {"id", "project", "text"};
  fields.insert(fields.end(), schemes.begin(), schemes.end());
  out << csv_join(fields) << "\n";
  for (const auto& r : reqs) {
    fields = {r.id, r.project, r.text};
    for (const auto& s : schemes) fields.push_back(r.label(s));
    out << csv_join(fields) << "\n";
  }
  return out.str();
}

TaskInstance materialize_task(const std::vector<Requirement>& reqs, const TaskSpec& spec) {
  spec.validate();
  TaskInstance inst;
  inst.spec = spec;
  for (const auto& cls : spec.classes) inst.class_supports[cls] = 0;
  for (const auto& r : reqs) {
    const std::string& gold = r.label(spec.labeling_scheme);
    if (spec.class_index(gold) < 0) continue;
    inst.requirements.push_back(r);
    inst.class_supports[gold] += 1;
  }
  if (inst.requirements.empty())
    throw config_error("task " + spec.name + ": no requirement carries a roster class under scheme '" +
                       spec.labeling_scheme + "'");
  if (spec.kind == TaskKind::Binary) {
    for (const auto& cls : spec.classes)
      if (inst.class_supports[cls] == 0)
        inst.warnings.push_back("binary class '" + cls + "' has zero support");
  }
  return inst;
}

}  // namespace reqgrid

#include "reqgrid/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "reqgrid/error.hpp"

namespace reqgrid {

using nlohmann::json;

const TaskConfig& RunConfig::task(const std::string& name) const {
  for (const auto& t : tasks)
    if (t.spec.name == name) return t;
  throw config_error("unknown task '" + name + "'");
}

const DatasetConfig& RunConfig::dataset(const std::string& name) const {
  for (const auto& d : datasets)
    if (d.name == name) return d;
  throw config_error("unknown dataset '" + name + "'");
}

std::string RunConfig::endpoint_for(const ModelConfig& model) const {
  if (!model.backend.empty()) return model.backend;
  if (!default_backend_url.empty()) return default_backend_url;
  throw config_error("model '" + model.alias + "' has no backend and backend.url is not set");
}

void RunConfig::validate() const {
  if (datasets.empty()) throw config_error("config: no datasets");
  if (tasks.empty()) throw config_error("config: no tasks");
  std::set<std::string> names;
  for (const auto& d : datasets)
    if (!names.insert(d.name).second) throw config_error("config: duplicate dataset " + d.name);
  names.clear();
  for (const auto& t : tasks) {
    t.spec.validate();
    if (!names.insert(t.spec.name).second)
      throw config_error("config: duplicate task " + t.spec.name);
    dataset(t.dataset);  // must resolve
  }
  for (const auto& p : patterns) p.validate();
  names.clear();
  for (const auto& m : models) {
    if (!names.insert(m.alias).second) throw config_error("config: duplicate model alias " + m.alias);
    endpoint_for(m);  // must resolve to mock or a url
  }
  for (const auto& m : embedding_models) {
    if (!names.insert(m.alias).second) throw config_error("config: duplicate model alias " + m.alias);
    endpoint_for(m);
  }
  if (retries < 0) throw config_error("config: retries must be >= 0");
  if (parallelism < 1) throw config_error("config: parallelism must be >= 1");

  for (const auto& [cls, definition] : definitions.entries)
    if (definition.empty() || definition.back() != '.')
      throw config_error("config: definition for '" + cls + "' must end with a period");
  bool uses_definitions = false;
  for (const auto& p : patterns) uses_definitions |= p.family == PromptFamily::Definition;
  if (uses_definitions) {
    for (const auto& t : tasks)
      for (const auto& cls : t.spec.classes) definitions.definition_for(cls);
  }
}

namespace {

TaskKind task_kind_from(const std::string& s) {
  if (s == "binary") return TaskKind::Binary;
  if (s == "multiclass") return TaskKind::Multiclass;
  throw config_error("config: unknown task kind '" + s + "'");
}

std::string task_kind_name(TaskKind k) {
  return k == TaskKind::Binary ? "binary" : "multiclass";
}

json config_json(const RunConfig& c) {
  json j;
  for (const auto& d : c.datasets)
    j["datasets"].push_back({{"name", d.name}, {"path", d.path}, {"schemes", d.schemes}});
  for (const auto& t : c.tasks) {
    json tj = {{"name", t.spec.name},
               {"dataset", t.dataset},
               {"kind", task_kind_name(t.spec.kind)},
               {"scheme", t.spec.labeling_scheme},
               {"classes", t.spec.classes}};
    if (t.spec.positive_class) tj["positive_class"] = *t.spec.positive_class;
    j["tasks"].push_back(tj);
  }
  for (const auto& p : c.patterns)
    j["patterns"].push_back({{"id", p.id()}, {"template", p.template_text}});
  for (VariationKind v : c.variations) j["variations"].push_back(variation_name(v));
  for (const auto& m : c.models)
    j["models"].push_back({{"alias", m.alias}, {"backend", m.backend}});
  for (const auto& m : c.embedding_models)
    j["embedding_models"].push_back(
        {{"alias", m.alias}, {"backend", m.backend}, {"embed_dim", m.embed_dim}});
  j["definitions"] = c.definitions.entries;
  j["lexicons"] = c.lexicons.entries;
  j["variations_config"] = {{"punct_chars", c.punct_chars}};
  j["backend"] = {{"retries", c.retries},
                  {"parallelism", c.parallelism},
                  {"normalize", c.normalize == ScoreNormalize::MeanLogProb ? "mean" : "sum"}};
  if (!c.default_backend_url.empty()) j["backend"]["url"] = c.default_backend_url;
  if (c.mock_seed) j["mock"] = {{"seed", *c.mock_seed}};
  j["embedding"] = {{"mode", c.embedding_mode == EmbeddingMode::Argmax ? "argmax" : "threshold"},
                    {"threshold", c.embedding_threshold}};
  return j;
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.patterns.clear();
  c.variations.clear();
  if (!j.contains("datasets") || !j.contains("tasks"))
    throw config_error("config: datasets and tasks sections are required");
  for (const auto& dj : j.at("datasets")) {
    DatasetConfig d;
    d.name = dj.at("name").get<std::string>();
    d.path = dj.at("path").get<std::string>();
    d.schemes = dj.at("schemes").get<std::vector<std::string>>();
    c.datasets.push_back(std::move(d));
  }
  for (const auto& tj : j.at("tasks")) {
    TaskConfig t;
    t.spec.name = tj.at("name").get<std::string>();
    t.dataset = tj.at("dataset").get<std::string>();
    t.spec.kind = task_kind_from(tj.at("kind").get<std::string>());
    t.spec.labeling_scheme = tj.at("scheme").get<std::string>();
    t.spec.classes = tj.at("classes").get<std::vector<std::string>>();
    if (tj.contains("positive_class"))
      t.spec.positive_class = tj.at("positive_class").get<std::string>();
    c.tasks.push_back(std::move(t));
  }
  if (j.contains("patterns")) {
    for (const auto& pj : j.at("patterns")) {
      std::string id = pj.at("id").get<std::string>();
      auto base = pattern_from_id(id);
      if (!base) throw config_error("config: unknown pattern id '" + id + "'");
      if (pj.contains("template")) base->template_text = pj.at("template").get<std::string>();
      base->validate();
      c.patterns.push_back(*base);
    }
  } else {
    c.patterns = canonical_patterns();
  }
  if (j.contains("variations")) {
    for (const auto& vj : j.at("variations")) {
      auto v = variation_from_name(vj.get<std::string>());
      if (!v) throw config_error("config: unknown variation '" + vj.get<std::string>() + "'");
      c.variations.push_back(*v);
    }
  } else {
    c.variations = all_variations();
  }
  if (j.contains("models")) {
    for (const auto& mj : j.at("models")) {
      ModelConfig m;
      m.alias = mj.at("alias").get<std::string>();
      if (mj.contains("backend")) m.backend = mj.at("backend").get<std::string>();
      c.models.push_back(std::move(m));
    }
  }
  if (j.contains("embedding_models")) {
    for (const auto& mj : j.at("embedding_models")) {
      ModelConfig m;
      m.alias = mj.at("alias").get<std::string>();
      if (mj.contains("backend")) m.backend = mj.at("backend").get<std::string>();
      if (mj.contains("embed_dim")) m.embed_dim = mj.at("embed_dim").get<std::size_t>();
      c.embedding_models.push_back(std::move(m));
    }
  }
  if (j.contains("definitions"))
    c.definitions.entries = j.at("definitions").get<std::map<std::string, std::string>>();
  else
    c.definitions = default_definitions();
  if (j.contains("lexicons"))
    c.lexicons.entries = j.at("lexicons").get<std::map<std::string, std::vector<std::string>>>();
  else
    c.lexicons = default_label_lexicons();
  if (j.contains("variations_config") && j.at("variations_config").contains("punct_chars"))
    c.punct_chars = j.at("variations_config").at("punct_chars").get<std::vector<std::string>>();
  if (j.contains("backend")) {
    const auto& bj = j.at("backend");
    if (bj.contains("url")) c.default_backend_url = bj.at("url").get<std::string>();
    if (bj.contains("retries")) c.retries = bj.at("retries").get<int>();
    if (bj.contains("parallelism")) c.parallelism = bj.at("parallelism").get<int>();
    if (bj.contains("normalize")) {
      std::string n = bj.at("normalize").get<std::string>();
      if (n == "mean") c.normalize = ScoreNormalize::MeanLogProb;
      else if (n == "sum") c.normalize = ScoreNormalize::SumLogProb;
      else throw config_error("config: unknown normalize '" + n + "'");
    }
  }
  if (j.contains("mock") && j.at("mock").contains("seed"))
    c.mock_seed = j.at("mock").at("seed").get<std::uint64_t>();
  if (j.contains("embedding")) {
    const auto& ej = j.at("embedding");
    if (ej.contains("mode")) {
      std::string m = ej.at("mode").get<std::string>();
      if (m == "argmax") c.embedding_mode = EmbeddingMode::Argmax;
      else if (m == "threshold") c.embedding_mode = EmbeddingMode::Threshold;
      else throw config_error("config: unknown embedding mode '" + m + "'");
    }
    if (ej.contains("threshold")) c.embedding_threshold = ej.at("threshold").get<double>();
  }
  c.validate();
  return c;
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw config_error("config: malformed JSON in " + path);
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw config_error("config: " + std::string(e.what()));
  }
}

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(2); }

void save_config(const RunConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write config file: " + path);
  out << config_to_json(config) << "\n";
}

DefinitionLexicon default_definitions() {
  DefinitionLexicon lex;
  lex.entries = {
      {"Usability",
       "Usability requirements are quality requirements that define what a system must do to "
       "support users' task performance."},
      {"Security",
       "Security requirements are quality requirements that define what a system must do to "
       "protect data and resist unauthorised access."},
      {"Operational",
       "Operational requirements are quality requirements that define the environments and "
       "conditions under which a system must run."},
      {"Performance",
       "Performance requirements are quality requirements that define how fast and how "
       "efficiently a system must respond under load."},
      {"Look & feel",
       "Look and feel requirements are quality requirements that define the intended appearance "
       "and style of a system's interface."},
      {"Availability",
       "Availability requirements are quality requirements that define when and how reliably a "
       "system must be accessible to its users."},
      {"Scalability",
       "Scalability requirements are quality requirements that define how a system must handle "
       "growth in load, data, or users."},
      {"Maintainability",
       "Maintainability requirements are quality requirements that define how easily a system "
       "must be corrected, updated, or extended."},
      {"Legal",
       "Legal requirements are quality requirements that define the laws, regulations, and "
       "standards a system must comply with."},
      {"Fault tolerance",
       "Fault tolerance requirements are quality requirements that define how a system must keep "
       "operating when components fail."},
      {"Functional",
       "Functional requirements define the behaviour a system must exhibit, that is, what the "
       "system shall do."},
      {"NonFunctional",
       "Non-functional requirements define the qualities and constraints a system must satisfy "
       "rather than specific behaviour."},
      {"Quality",
       "Quality requirements define the properties a system must have, such as performance, "
       "reliability, and efficiency."},
      {"NonQuality",
       "Non-quality requirements describe system behaviour and functions rather than quality "
       "properties."},
      {"sec",
       "Security-related requirements define what a system must do to protect assets, data, and "
       "communication from attacks."},
      {"nonsec",
       "Non-security requirements describe general system behaviour and qualities unrelated to "
       "protection against attacks."},
  };
  return lex;
}

LabelLexicon default_label_lexicons() {
  LabelLexicon lex;
  lex.entries = {
      {"Functional", {"functional", "system", "behavior", "shall", "must"}},
      {"Quality", {"quality", "performance", "efficiency", "reliability"}},
      {"NonFunctional", {"nonfunctional", "quality", "constraint", "property"}},
      {"NonQuality", {"functional", "behavior", "feature", "function"}},
      {"sec", {"security", "secure", "encrypt", "authentication", "access", "protect"}},
      {"nonsec", {"general", "display", "provide", "user", "order"}},
      {"Usability", {"usability", "user", "ease", "learn", "intuitive"}},
      {"Security", {"security", "secure", "encrypt", "authentication", "protect"}},
      {"Operational", {"operational", "environment", "platform", "integrate", "interface"}},
      {"Performance", {"performance", "fast", "response", "seconds", "throughput"}},
      {"Look & feel", {"appearance", "look", "feel", "style", "attractive"}},
      {"Availability", {"availability", "available", "uptime", "accessible"}},
      {"Scalability", {"scalability", "scale", "capacity", "growth"}},
      {"Maintainability", {"maintainability", "maintain", "update", "modify"}},
      {"Legal", {"legal", "comply", "regulation", "law", "standard"}},
      {"Fault tolerance", {"fault", "tolerance", "failure", "recover"}},
      {"Portability", {"portability", "portable", "ported"}},
  };
  return lex;
}

RunConfig canonical_mock_config(const std::string& data_dir) {
  RunConfig c;
  std::string prefix = data_dir.empty() ? "" : data_dir + "/";
  c.datasets = {
      {"promise", prefix + "promise.csv", {"promise"}},
      {"functional_quality", prefix + "functional_quality.csv", {"functional", "quality"}},
      {"secreq", prefix + "secreq.csv", {"secreq"}},
  };

  TaskConfig functional;
  functional.spec.name = "Functional";
  functional.spec.kind = TaskKind::Binary;
  functional.spec.labeling_scheme = "functional";
  functional.spec.classes = {"Functional", "NonFunctional"};
  functional.spec.positive_class = "Functional";
  functional.dataset = "functional_quality";

  TaskConfig quality;
  quality.spec.name = "Quality";
  quality.spec.kind = TaskKind::Binary;
  quality.spec.labeling_scheme = "quality";
  quality.spec.classes = {"Quality", "NonQuality"};
  quality.spec.positive_class = "Quality";
  quality.dataset = "functional_quality";

  TaskConfig security;
  security.spec.name = "Security";
  security.spec.kind = TaskKind::Binary;
  security.spec.labeling_scheme = "secreq";
  security.spec.classes = {"sec", "nonsec"};
  security.spec.positive_class = "sec";
  security.dataset = "secreq";

  TaskConfig nfr;
  nfr.spec.name = "NFR";
  nfr.spec.kind = TaskKind::Multiclass;
  nfr.spec.labeling_scheme = "promise";
  // Portability (support 1) is dropped from the roster, not from the file.
  nfr.spec.classes = {"Usability",    "Security",        "Operational", "Performance",
                      "Look & feel",  "Availability",    "Scalability", "Maintainability",
                      "Legal",        "Fault tolerance"};
  nfr.dataset = "promise";

  TaskConfig top4;
  top4.spec.name = "NFR-Top4";
  top4.spec.kind = TaskKind::Multiclass;
  top4.spec.labeling_scheme = "promise";
  top4.spec.classes = {"Usability", "Security", "Operational", "Performance"};
  top4.dataset = "promise";

  c.tasks = {functional, quality, security, nfr, top4};
  c.patterns = canonical_patterns();
  c.variations = all_variations();
  c.models = {{"mock-a", "mock"}, {"mock-b", "mock"}, {"mock-c", "mock"}};
  c.embedding_models = {{"mock-embed", "mock", 256}};
  c.definitions = default_definitions();
  c.lexicons = default_label_lexicons();
  c.validate();
  return c;
}

}  // namespace reqgrid

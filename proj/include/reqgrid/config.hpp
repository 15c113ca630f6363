#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reqgrid/backend.hpp"
#include "reqgrid/corpus.hpp"
#include "reqgrid/prompts.hpp"
#include "reqgrid/variations.hpp"
#include "reqgrid/zsl.hpp"

namespace reqgrid {

struct DatasetConfig {
  std::string name;
  std::string path;
  std::vector<std::string> schemes;
};

struct ModelConfig {
  std::string alias;
  std::string backend;  // "mock" or an http:// base url
  std::size_t embed_dim = 256;

  bool is_mock() const { return backend == "mock"; }
};

struct TaskConfig {
  TaskSpec spec;
  std::string dataset;
};

// The single structured config file behind `reqgrid run`; JSON on disk
// (see README for the schema).
struct RunConfig {
  std::vector<DatasetConfig> datasets;
  std::vector<TaskConfig> tasks;
  std::vector<PromptPattern> patterns;
  std::vector<VariationKind> variations;
  std::vector<ModelConfig> models;            // inference (prompt-scored) endpoints
  std::vector<ModelConfig> embedding_models;  // embedding endpoints
  DefinitionLexicon definitions;
  LabelLexicon lexicons;
  std::vector<std::string> punct_chars = default_punct_chars();
  std::string default_backend_url;  // backend.url: endpoint for model entries without one
  int retries = 2;
  int parallelism = 4;
  ScoreNormalize normalize = ScoreNormalize::MeanLogProb;
  EmbeddingMode embedding_mode = EmbeddingMode::Argmax;
  double embedding_threshold = 0.5;
  std::optional<std::uint64_t> mock_seed;  // reserved: the mock is seedless-deterministic

  // endpoint string for a model entry, falling back to backend.url
  std::string endpoint_for(const ModelConfig& model) const;

  const TaskConfig& task(const std::string& name) const;
  const DatasetConfig& dataset(const std::string& name) const;
  void validate() const;
};

RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

// The full factorial setup (5 tasks, 6 patterns, 5 variations, 3 inference
// aliases and 1 embedding alias on the deterministic mock backend) with
// dataset paths under `data_dir`.
RunConfig canonical_mock_config(const std::string& data_dir);

// Default per-class one-sentence definitions and expert-curated term lists
// for every class used by the canonical tasks.
DefinitionLexicon default_definitions();
LabelLexicon default_label_lexicons();

}  // namespace reqgrid

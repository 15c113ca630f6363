#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "reqgrid/backend.hpp"
#include "reqgrid/config.hpp"
#include "reqgrid/metrics.hpp"
#include "reqgrid/stats.hpp"

namespace reqgrid {

enum class Factor { Model, Pattern, Variation, Task };

std::string factor_name(Factor f);
std::optional<Factor> factor_from_name(const std::string& name);
const std::vector<Factor>& all_factors();

struct ExperimentSetting {
  std::string model_id;
  Pipeline pipeline = Pipeline::Inference;
  std::string task;
  std::optional<std::string> pattern_id;   // inference only
  std::optional<VariationKind> variation;  // absent for embedding settings
  TaskKind family = TaskKind::Binary;

  std::string id() const;  // filesystem-safe, unique within a plan
  std::string level(Factor f) const;
};

struct ExperimentResult {
  ExperimentSetting setting;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::string predictions_path;
  std::size_t backend_calls = 0;
  double wall_time_seconds = 0.0;

  double measure(const std::string& name) const;  // "wP" | "wR" | "wF1"
};

struct FactorLevelSummary {
  std::string level;
  double avg = 0.0;
  double max = 0.0;
  int times_best = 0;
};

struct FactorSummary {
  Factor factor = Factor::Model;
  std::string measure;
  TaskKind family = TaskKind::Binary;
  std::vector<FactorLevelSummary> levels;
  int contexts = 0;
  std::vector<std::string> notes;
};

// Cartesian plan: per inference model, tasks x patterns x variations within
// each family; embedding models contribute one setting per task.
std::vector<ExperimentSetting> plan_grid(const RunConfig& config,
                                         std::optional<TaskKind> family = std::nullopt,
                                         std::optional<Pipeline> pipeline = std::nullopt);

// Per-level average/maximum of a measure plus how often the level is the
// strict best across contexts (fixings of all other factors). Ties credit
// every tied level and leave a note.
FactorSummary summarize_factor(const std::vector<ExperimentResult>& results, Factor factor,
                               const std::string& measure, TaskKind family);

// Blocks (rows) are complete combinations of the non-target factors within
// one family; columns are the target factor's levels.
std::vector<std::vector<double>> pivot_for_friedman(const std::vector<ExperimentResult>& results,
                                                    Factor factor, const std::string& measure,
                                                    TaskKind family,
                                                    std::vector<std::string>* level_names = nullptr);

struct ComparisonRow {
  std::string measure = "wF1";
  std::string task;
  std::string pair;
  StatTestResult test;
  std::vector<int> group_sizes;
};

// Wilcoxon comparison of two prediction sets over identical {3,4}-groups.
ComparisonRow compare_predictions(const std::vector<std::string>& preds_a,
                                  const std::vector<std::string>& preds_b,
                                  const std::vector<std::string>& golds,
                                  const std::vector<std::string>& roster,
                                  const std::string& task_name, const std::string& pair_label);

// Picks the best-wF1 setting for `task` in each results directory and runs
// the grouped Wilcoxon comparison on their persisted predictions.
ComparisonRow compare_best(const std::string& results_dir_a, const std::string& results_dir_b,
                           const std::string& task_name);

class GridRunner {
 public:
  GridRunner(RunConfig config, std::string out_dir);

  // Test hook behind `--max-backend-calls`: the shared backend throws once
  // this many calls have been served, leaving checkpoints behind.
  void set_backend_call_limit(std::size_t limit) { call_limit_ = limit; }

  // Runs the plan and writes results.csv, per-factor summaries, stats CSVs
  // and report.md. With resume=true, completed settings are loaded from
  // their predictions files and partial settings continue from their
  // checkpoint.
  std::vector<ExperimentResult> run(std::optional<TaskKind> family = std::nullopt,
                                    std::optional<Pipeline> pipeline = std::nullopt,
                                    bool resume = false);

  const RunConfig& config() const { return config_; }

 private:
  ExperimentResult run_setting(const ExperimentSetting& setting, ScoringBackend& backend);

  RunConfig config_;
  std::string out_dir_;
  std::optional<std::size_t> call_limit_;
  std::map<std::string, TaskInstance> task_cache_;
  std::map<std::string, std::vector<Requirement>> dataset_cache_;
};

// Emits results.csv, summary_<factor>.csv, stats_friedman.csv,
// stats_wilcoxon.csv and report.md; byte-deterministic for identical inputs.
void emit_report(const std::vector<ExperimentResult>& results,
                 const std::vector<ComparisonRow>& comparisons, const std::string& out_dir);

// Reads results.csv (weighted measures only) back into result records.
std::vector<ExperimentResult> load_results(const std::string& out_dir);

// Reads a predictions file back as (golds, preds) pairs in row order.
void load_predictions(const std::string& path, std::vector<std::string>& golds,
                      std::vector<std::string>& preds);

// Recomputes every weighted measure in results.csv from the persisted
// predictions and returns mismatch descriptions (empty = clean audit).
std::vector<std::string> audit_results(const std::string& out_dir, const RunConfig& config);

}  // namespace reqgrid

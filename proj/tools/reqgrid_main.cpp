#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"

#include "reqgrid/config.hpp"
#include "reqgrid/datagen.hpp"
#include "reqgrid/error.hpp"
#include "reqgrid/runner.hpp"
#include "reqgrid/strings.hpp"

namespace {

using namespace reqgrid;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBackend = 2;
constexpr int kExitIo = 3;

std::optional<TaskKind> parse_family(const std::string& family) {
  if (family == "all") return std::nullopt;
  if (family == "binary") return TaskKind::Binary;
  if (family == "multiclass") return TaskKind::Multiclass;
  throw config_error("unknown family '" + family + "' (binary|multiclass|all)");
}

std::optional<Pipeline> parse_pipeline(const std::string& pipeline) {
  if (pipeline == "all") return std::nullopt;
  if (pipeline == "inference") return Pipeline::Inference;
  if (pipeline == "embedding") return Pipeline::Embedding;
  throw config_error("unknown pipeline '" + pipeline + "' (inference|embedding|all)");
}

struct RunOverrides {
  std::string pattern;         // restrict the grid to one prompt pattern
  std::string embedding_mode;  // argmax|threshold
  double threshold = -1.0;     // cosine threshold when >= 0
};

int run_command(const std::string& config_path, const std::string& out_dir,
                const std::string& family, const std::string& pipeline, bool resume,
                long long max_backend_calls, const RunOverrides& overrides) {
  RunConfig config = load_config(config_path);
  if (!overrides.pattern.empty()) {
    std::vector<PromptPattern> kept;
    for (const auto& p : config.patterns)
      if (p.id() == overrides.pattern) kept.push_back(p);
    if (kept.empty())
      throw config_error("unknown pattern '" + overrides.pattern +
                         "' ({is-about|belongs-to}-{assertion|definition|qa})");
    config.patterns = kept;
  }
  if (!overrides.embedding_mode.empty()) {
    if (overrides.embedding_mode == "argmax") config.embedding_mode = EmbeddingMode::Argmax;
    else if (overrides.embedding_mode == "threshold")
      config.embedding_mode = EmbeddingMode::Threshold;
    else throw config_error("unknown embedding mode '" + overrides.embedding_mode + "'");
  }
  if (overrides.threshold >= 0.0) config.embedding_threshold = overrides.threshold;

  GridRunner runner(config, out_dir);
  if (max_backend_calls >= 0)
    runner.set_backend_call_limit(static_cast<std::size_t>(max_backend_calls));
  auto results = runner.run(parse_family(family), parse_pipeline(pipeline), resume);
  std::cout << "completed " << results.size() << " settings; outputs in " << out_dir << "\n";
  return kExitOk;
}

int stats_command(const std::string& results_dir, const std::string& factor_arg,
                  const std::string& measure, const std::string& family) {
  auto factor = factor_from_name(factor_arg);
  if (!factor) throw config_error("unknown factor '" + factor_arg + "' (model|pattern|variation|task)");
  if (measure != "wP" && measure != "wR" && measure != "wF1")
    throw config_error("unknown measure '" + measure + "' (wP|wR|wF1)");
  auto results = load_results(results_dir);

  std::vector<TaskKind> families;
  if (family == "all") families = {TaskKind::Binary, TaskKind::Multiclass};
  else if (auto f = parse_family(family)) families = {*f};

  std::cout << "measure,factor,family,method,statistic,df,p_value,n,significant\n";
  for (TaskKind fam : families) {
    std::vector<std::string> levels;
    std::vector<std::vector<double>> matrix;
    try {
      matrix = pivot_for_friedman(results, *factor, measure, fam, &levels);
    } catch (const config_error&) {
      continue;  // family absent from this results set
    }
    if (levels.size() < 2) continue;
    StatTestResult t = friedman_test(matrix);
    std::cout << measure << "," << factor_name(*factor) << ","
              << (fam == TaskKind::Binary ? "binary" : "multiclass") << ","
              << stat_method_name(t.method) << "," << format_double(t.statistic) << ","
              << (t.df ? std::to_string(*t.df) : "") << "," << format_double(t.p_value) << ","
              << t.n_effective << "," << (t.p_value < 0.05 ? "*" : "") << "\n";
  }
  return kExitOk;
}

int compare_command(const std::string& dir_a, const std::string& dir_b, const std::string& task) {
  ComparisonRow row = compare_best(dir_a, dir_b, task);
  std::cout << "measure,task,pair,method,statistic,df,p_value,n,significant\n";
  std::cout << row.measure << "," << row.task << "," << row.pair << ","
            << stat_method_name(row.test.method) << "," << format_double(row.test.statistic)
            << ",," << format_double(row.test.p_value) << "," << row.test.n_effective << ","
            << (row.test.p_value < 0.05 ? "*" : "") << "\n";
  return kExitOk;
}

int mock_serve_command(int port, const std::string& config_path) {
  LabelLexicon lexicons =
      config_path.empty() ? default_label_lexicons() : load_config(config_path).lexicons;
  MockServer server(lexicons);
  int bound = server.start(port);
  std::cout << "mock backend listening on http://127.0.0.1:" << bound << "\n";
  std::cout << "POST /v1/score and /v1/embed; Ctrl-C to stop\n";
  // serve until killed
  while (true) std::this_thread::sleep_for(std::chrono::seconds(3600));
  return kExitOk;
}

int audit_command(const std::string& results_dir, const std::string& config_path) {
  RunConfig config = load_config(config_path);
  auto mismatches = audit_results(results_dir, config);
  if (mismatches.empty()) {
    std::cout << "audit clean: every weighted score matches its predictions file\n";
    return kExitOk;
  }
  for (const auto& m : mismatches) std::cerr << "MISMATCH " << m << "\n";
  return kExitConfig;
}

int make_sample_command(const std::string& out_dir) {
  write_sample_data(out_dir + "/data");
  RunConfig config = canonical_mock_config(out_dir + "/data");
  save_config(config, out_dir + "/config.json");
  std::cout << "wrote sample datasets to " << out_dir << "/data and config to " << out_dir
            << "/config.json\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reqgrid: zero-shot requirements-classification experiment grid"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", family = "all", pipeline = "all";
  bool resume = false;
  long long max_backend_calls = -1;
  RunOverrides overrides;
  auto* run = app.add_subcommand("run", "execute the experiment grid");
  run->add_option("--config", config_path, "config file (JSON)")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--family", family, "binary|multiclass|all");
  run->add_option("--pipeline", pipeline, "inference|embedding|all");
  run->add_option("--pattern", overrides.pattern,
                  "restrict to one pattern: {is-about|belongs-to}-{assertion|definition|qa}");
  run->add_option("--embedding-mode", overrides.embedding_mode, "argmax|threshold");
  run->add_option("--threshold", overrides.threshold, "cosine threshold for threshold mode");
  run->add_flag("--resume", resume, "continue from checkpoints");
  run->add_option("--max-backend-calls", max_backend_calls,
                  "abort after this many backend calls (fault-injection hook)");

  std::string results_dir, factor, measure = "wF1", stats_family = "all";
  auto* stats = app.add_subcommand("stats", "Friedman factor analysis over a results directory");
  stats->add_option("--results", results_dir, "results directory")->required();
  stats->add_option("--factor", factor, "model|pattern|variation|task")->required();
  stats->add_option("--measure", measure, "wP|wR|wF1");
  stats->add_option("--family", stats_family, "binary|multiclass|all");

  std::string dir_a, dir_b, compare_task;
  auto* compare = app.add_subcommand("compare", "Wilcoxon comparison of two result sets");
  compare->add_option("--a", dir_a, "first results directory")->required();
  compare->add_option("--b", dir_b, "second results directory")->required();
  compare->add_option("--task", compare_task, "task name")->required();

  int port = 8008;
  std::string serve_config;
  auto* serve = app.add_subcommand("mock-serve", "host the deterministic mock backend");
  serve->add_option("--port", port, "listen port");
  serve->add_option("--config", serve_config, "config file for lexicons (optional)");

  std::string audit_dir, audit_config;
  auto* audit = app.add_subcommand("audit", "recompute results.csv from persisted predictions");
  audit->add_option("--results", audit_dir, "results directory")->required();
  audit->add_option("--config", audit_config, "config file (JSON)")->required();

  std::string sample_out = ".";
  auto* sample = app.add_subcommand("make-sample", "write synthetic sample datasets and config");
  sample->add_option("--out", sample_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed())
      return run_command(config_path, out_dir, family, pipeline, resume, max_backend_calls,
                         overrides);
    if (stats->parsed()) return stats_command(results_dir, factor, measure, stats_family);
    if (compare->parsed()) return compare_command(dir_a, dir_b, compare_task);
    if (serve->parsed()) return mock_serve_command(port, serve_config);
    if (audit->parsed()) return audit_command(audit_dir, audit_config);
    if (sample->parsed()) return make_sample_command(sample_out);
  } catch (const backend_error& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}

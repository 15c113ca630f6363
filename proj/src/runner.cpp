#include "reqgrid/runner.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "reqgrid/csv.hpp"
#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

namespace fs = std::filesystem;

namespace reqgrid {

namespace {

constexpr std::size_t kChunkSize = 64;
const std::vector<std::string> kMeasures = {"wP", "wR", "wF1"};
const char* kPredictionsHeader = "index,requirement_id,gold,predicted,probabilities";

std::string pipeline_name(Pipeline p) {
  return p == Pipeline::Inference ? "inference" : "embedding";
}

std::string family_label(TaskKind k) { return k == TaskKind::Binary ? "binary" : "multiclass"; }

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') out.push_back(c);
    else out.push_back('_');
  }
  return out;
}

}  // namespace

std::string factor_name(Factor f) {
  switch (f) {
    case Factor::Model: return "model";
    case Factor::Pattern: return "pattern";
    case Factor::Variation: return "variation";
    case Factor::Task: return "task";
  }
  return "unknown";
}

std::optional<Factor> factor_from_name(const std::string& name) {
  for (Factor f : all_factors())
    if (factor_name(f) == name) return f;
  return std::nullopt;
}

const std::vector<Factor>& all_factors() {
  static const std::vector<Factor> factors = {Factor::Model, Factor::Pattern, Factor::Variation,
                                              Factor::Task};
  return factors;
}

std::string ExperimentSetting::id() const {
  std::string pattern_part = pattern_id ? *pattern_id : "embedding";
  std::string variation_part = variation ? variation_name(*variation) : "plain";
  return sanitize(model_id) + "__" + sanitize(task) + "__" + sanitize(pattern_part) + "__" +
         sanitize(variation_part);
}

std::string ExperimentSetting::level(Factor f) const {
  switch (f) {
    case Factor::Model: return model_id;
    case Factor::Pattern: return pattern_id ? *pattern_id : "";
    case Factor::Variation: return variation ? variation_name(*variation) : "";
    case Factor::Task: return task;
  }
  return "";
}

double ExperimentResult::measure(const std::string& name) const {
  if (name == "wP") return weighted_precision;
  if (name == "wR") return weighted_recall;
  if (name == "wF1") return weighted_f1;
  throw config_error("unknown measure '" + name + "'");
}

std::vector<ExperimentSetting> plan_grid(const RunConfig& config, std::optional<TaskKind> family,
                                         std::optional<Pipeline> pipeline) {
  config.validate();
  std::vector<ExperimentSetting> plan;
  bool want_inference = !pipeline || *pipeline == Pipeline::Inference;
  bool want_embedding = !pipeline || *pipeline == Pipeline::Embedding;

  if (want_inference) {
    for (const auto& model : config.models) {
      for (const auto& task : config.tasks) {
        if (family && task.spec.kind != *family) continue;
        for (const auto& pattern : config.patterns) {
          for (VariationKind variation : config.variations) {
            ExperimentSetting s;
            s.model_id = model.alias;
            s.pipeline = Pipeline::Inference;
            s.task = task.spec.name;
            s.pattern_id = pattern.id();
            s.variation = variation;
            s.family = task.spec.kind;
            plan.push_back(std::move(s));
          }
        }
      }
    }
  }
  if (want_embedding) {
    // No prompt or variation factor: one setting per task per embedding model.
    for (const auto& model : config.embedding_models) {
      for (const auto& task : config.tasks) {
        if (family && task.spec.kind != *family) continue;
        ExperimentSetting s;
        s.model_id = model.alias;
        s.pipeline = Pipeline::Embedding;
        s.task = task.spec.name;
        s.family = task.spec.kind;
        plan.push_back(std::move(s));
      }
    }
  }
  return plan;
}

// ---------------------------------------------------------------------------
// factor summaries and pivots

namespace {

std::vector<ExperimentResult> family_inference_results(const std::vector<ExperimentResult>& results,
                                                       TaskKind family) {
  std::vector<ExperimentResult> out;
  for (const auto& r : results)
    if (r.setting.family == family && r.setting.pipeline == Pipeline::Inference) out.push_back(r);
  return out;
}

std::string context_key(const ExperimentSetting& s, Factor target) {
  std::string key;
  for (Factor f : all_factors()) {
    if (f == target) continue;
    key += s.level(f);
    key += '\x1f';
  }
  return key;
}

std::vector<std::string> factor_levels(const std::vector<ExperimentResult>& results, Factor f) {
  std::vector<std::string> levels;
  for (const auto& r : results) {
    std::string level = r.setting.level(f);
    if (std::find(levels.begin(), levels.end(), level) == levels.end())
      levels.push_back(level);
  }
  return levels;
}

}  // namespace

FactorSummary summarize_factor(const std::vector<ExperimentResult>& results, Factor factor,
                               const std::string& measure, TaskKind family) {
  std::vector<ExperimentResult> pool = family_inference_results(results, family);
  if (pool.empty()) throw config_error("summarize_factor: no inference results for family");

  FactorSummary summary;
  summary.factor = factor;
  summary.measure = measure;
  summary.family = family;

  std::vector<std::string> levels = factor_levels(pool, factor);
  std::map<std::string, std::map<std::string, double>> contexts;  // ctx -> level -> value
  std::map<std::string, std::vector<double>> level_values;
  for (const auto& r : pool) {
    contexts[context_key(r.setting, factor)][r.setting.level(factor)] = r.measure(measure);
    level_values[r.setting.level(factor)].push_back(r.measure(measure));
  }

  std::vector<std::string> missing;
  for (const auto& [ctx, per_level] : contexts)
    for (const auto& level : levels)
      if (!per_level.count(level)) missing.push_back(level + " @ " + ctx);
  if (!missing.empty())
    throw config_error("summarize_factor: incomplete grid, missing cells: " + join(missing, "; "));

  std::map<std::string, int> best_counts;
  bool any_tie = false;
  for (const auto& [ctx, per_level] : contexts) {
    double best = -1.0;
    for (const auto& [level, value] : per_level) best = std::max(best, value);
    int winners = 0;
    for (const auto& [level, value] : per_level)
      if (value == best) ++winners;
    if (winners > 1) any_tie = true;
    for (const auto& [level, value] : per_level)
      if (value == best) best_counts[level] += 1;
  }
  if (any_tie)
    summary.notes.push_back("ties credited to all tied levels in at least one context");

  summary.contexts = static_cast<int>(contexts.size());
  for (const auto& level : levels) {
    FactorLevelSummary ls;
    ls.level = level;
    const auto& values = level_values[level];
    double sum = 0.0, mx = values.front();
    for (double v : values) {
      sum += v;
      mx = std::max(mx, v);
    }
    ls.avg = sum / static_cast<double>(values.size());
    ls.max = mx;
    ls.times_best = best_counts.count(level) ? best_counts[level] : 0;
    summary.levels.push_back(std::move(ls));
  }
  return summary;
}

std::vector<std::vector<double>> pivot_for_friedman(const std::vector<ExperimentResult>& results,
                                                    Factor factor, const std::string& measure,
                                                    TaskKind family,
                                                    std::vector<std::string>* level_names) {
  std::vector<ExperimentResult> pool = family_inference_results(results, family);
  if (pool.empty()) throw config_error("pivot_for_friedman: no inference results for family");

  std::vector<std::string> levels = factor_levels(pool, factor);
  if (level_names) *level_names = levels;

  std::map<std::string, std::map<std::string, double>> contexts;
  for (const auto& r : pool)
    contexts[context_key(r.setting, factor)][r.setting.level(factor)] = r.measure(measure);

  std::vector<std::vector<double>> matrix;
  std::vector<std::string> missing;
  for (const auto& [ctx, per_level] : contexts) {
    std::vector<double> row;
    for (const auto& level : levels) {
      auto it = per_level.find(level);
      if (it == per_level.end()) {
        missing.push_back(level + " @ " + ctx);
        continue;
      }
      row.push_back(it->second);
    }
    matrix.push_back(std::move(row));
  }
  if (!missing.empty())
    throw config_error("pivot_for_friedman: incomplete design, missing cells: " +
                       join(missing, "; "));
  return matrix;
}

// ---------------------------------------------------------------------------
// comparisons

ComparisonRow compare_predictions(const std::vector<std::string>& preds_a,
                                  const std::vector<std::string>& preds_b,
                                  const std::vector<std::string>& golds,
                                  const std::vector<std::string>& roster,
                                  const std::string& task_name, const std::string& pair_label) {
  if (preds_a.size() != golds.size() || preds_b.size() != golds.size())
    throw config_error("compare_predictions: prediction lists must cover the full task");
  ComparisonRow row;
  row.task = task_name;
  row.pair = pair_label;
  row.group_sizes = partition_groups(static_cast<int>(golds.size()));
  std::vector<double> wf1_a = group_wf1(preds_a, golds, row.group_sizes, roster);
  std::vector<double> wf1_b = group_wf1(preds_b, golds, row.group_sizes, roster);
  row.test = wilcoxon_signed_rank(wf1_a, wf1_b);
  return row;
}

// ---------------------------------------------------------------------------
// grid execution

GridRunner::GridRunner(RunConfig config, std::string out_dir)
    : config_(std::move(config)), out_dir_(std::move(out_dir)) {
  config_.validate();
}

namespace {

struct PendingRequest {
  std::size_t item;        // requirement index within the chunk
  std::size_t first_slot;  // slot of the first class this request covers
  ScoreRequest request;
};

std::string prediction_row(std::size_t index, const Requirement& req, const std::string& gold,
                           const Prediction& pred) {
  std::vector<std::string> probs;
  probs.reserve(pred.probabilities.size());
  for (double p : pred.probabilities) probs.push_back(format_double(p));
  return csv_join({std::to_string(index), req.id, gold,
                   pred.abstained ? std::string() : pred.predicted, join(probs, ";")});
}

// Reads a checkpoint, tolerating a torn final line from a hard kill. The
// file is rewritten without the torn tail so appending stays consistent.
std::size_t count_checkpoint_rows(const std::string& path, std::vector<std::string>& golds,
                                  std::vector<std::string>& preds) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();

  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    std::size_t nl = content.find('\n', start);
    if (nl == std::string::npos) break;  // trailing bytes without \n are a torn row
    lines.push_back(content.substr(start, nl - start));
    start = nl + 1;
  }
  bool torn = start < content.size();
  if (lines.empty()) return 0;
  if (lines.front() != kPredictionsHeader)
    throw io_error("checkpoint " + path + " has an unexpected header");

  std::size_t rows = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream line_in(lines[i]);
    CsvReader reader(line_in);
    std::vector<std::string> fields;
    if (!reader.read_record(fields) || fields.size() != 5)
      throw io_error("checkpoint " + path + " has a malformed row " + std::to_string(i));
    golds.push_back(fields[2]);
    preds.push_back(fields[3]);
    ++rows;
  }
  if (torn) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    for (const auto& line : lines) out << line << "\n";
  }
  return rows;
}

}  // namespace

ExperimentResult GridRunner::run_setting(const ExperimentSetting& setting,
                                         ScoringBackend& backend) {
  auto started = std::chrono::steady_clock::now();
  const TaskInstance& task = task_cache_.at(setting.task);
  const std::vector<std::string>& roster = task.spec.classes;
  int positive_index = task.spec.positive_class ? task.spec.class_index(*task.spec.positive_class) : 0;

  fs::create_directories(fs::path(out_dir_) / "predictions");
  std::string final_path = (fs::path(out_dir_) / "predictions" / (setting.id() + ".csv")).string();
  std::string part_path = final_path + ".part";

  ExperimentResult result;
  result.setting = setting;
  result.predictions_path = final_path;

  std::vector<std::string> golds, preds;

  if (fs::exists(final_path)) {
    // completed in a previous run; recompute the report from the file
    load_predictions(final_path, golds, preds);
    if (golds.size() != task.size())
      throw io_error("predictions file " + final_path + " has " + std::to_string(golds.size()) +
                     " rows, expected " + std::to_string(task.size()));
  } else {
    std::size_t done = count_checkpoint_rows(part_path, golds, preds);
    std::ofstream out(part_path, done > 0 ? std::ios::binary | std::ios::app : std::ios::binary);
    if (!out) throw io_error("cannot write checkpoint " + part_path);
    if (done == 0) out << kPredictionsHeader << "\n";

    std::optional<PromptPattern> pattern;
    if (setting.pipeline == Pipeline::Inference) {
      for (const auto& cp : config_.patterns)
        if (cp.id() == *setting.pattern_id) pattern = cp;
      if (!pattern) pattern = pattern_from_id(*setting.pattern_id);
      if (!pattern) throw config_error("unknown pattern '" + *setting.pattern_id + "'");
    }

    // Embedding label vectors are fixed per task; one embed call per class.
    std::vector<std::vector<double>> label_vecs;
    if (setting.pipeline == Pipeline::Embedding) {
      for (const auto& cls : roster) {
        const auto* terms = config_.lexicons.terms_for(cls);
        if (!terms) throw config_error("label lexicon has no entry for class '" + cls + "'");
        EmbedRequest er;
        er.texts = *terms;
        EmbedResponse resp = backend.embed(er);
        result.backend_calls += 1;
        std::vector<double> mean(resp.vectors.front().size(), 0.0);
        for (const auto& v : resp.vectors)
          for (std::size_t i = 0; i < v.size(); ++i) mean[i] += v[i];
        double norm = 0.0;
        for (double& c : mean) {
          c /= static_cast<double>(resp.vectors.size());
          norm += c * c;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) throw backend_error("zero label vector for class '" + cls + "'");
        for (double& c : mean) c /= norm;
        label_vecs.push_back(std::move(mean));
      }
    }

    for (std::size_t chunk_start = done; chunk_start < task.size(); chunk_start += kChunkSize) {
      std::size_t chunk_end = std::min(task.size(), chunk_start + kChunkSize);
      std::size_t chunk_len = chunk_end - chunk_start;
      std::vector<Prediction> chunk_preds(chunk_len);

      if (setting.pipeline == Pipeline::Inference) {
        // Shared-context patterns score every class in one request; the
        // definition and QA families have per-class contexts.
        std::vector<PendingRequest> requests;
        std::vector<std::vector<double>> chunk_scores(chunk_len,
                                                      std::vector<double>(roster.size(), 0.0));
        for (std::size_t i = 0; i < chunk_len; ++i) {
          const Requirement& req = task.requirements[chunk_start + i];
          std::string text = req.text;
          if (setting.variation && is_text_variation(*setting.variation))
            text = apply_text_variation(text, *setting.variation, config_.punct_chars);
          Requirement shown = req;
          shown.text = text;
          auto candidates = candidate_prompts(task, shown, *pattern, setting.variation,
                                              &config_.definitions);
          if (pattern->family == PromptFamily::Assertion) {
            PendingRequest pr;
            pr.item = i;
            pr.first_slot = 0;
            pr.request.context = candidates.front().second.context;
            pr.request.normalize = config_.normalize;
            for (const auto& [cls, rendered] : candidates)
              pr.request.continuations.push_back(rendered.continuation);
            requests.push_back(std::move(pr));
          } else {
            for (std::size_t c = 0; c < candidates.size(); ++c) {
              PendingRequest pr;
              pr.item = i;
              pr.first_slot = c;
              pr.request.context = candidates[c].second.context;
              pr.request.continuations = {candidates[c].second.continuation};
              pr.request.normalize = config_.normalize;
              requests.push_back(std::move(pr));
            }
          }
        }
        std::vector<ScoreResponse> responses(requests.size());
        parallel_for_indexed(requests.size(), config_.parallelism, [&](std::size_t r) {
          responses[r] = backend.score(requests[r].request);
        });
        result.backend_calls += requests.size();
        for (std::size_t r = 0; r < requests.size(); ++r) {
          const auto& pr = requests[r];
          for (std::size_t c = 0; c < responses[r].scores.size(); ++c)
            chunk_scores[pr.item][pr.first_slot + c] = responses[r].scores[c];
        }
        for (std::size_t i = 0; i < chunk_len; ++i) {
          chunk_preds[i] = predict_inference(task.spec.kind, roster, chunk_scores[i],
                                             positive_index);
          chunk_preds[i].requirement_id = task.requirements[chunk_start + i].id;
        }
      } else {
        EmbedRequest er;
        for (std::size_t i = 0; i < chunk_len; ++i)
          er.texts.push_back(task.requirements[chunk_start + i].text);
        EmbedResponse resp = backend.embed(er);
        result.backend_calls += 1;
        for (std::size_t i = 0; i < chunk_len; ++i) {
          chunk_preds[i] = classify_embedding(resp.vectors[i], roster, label_vecs,
                                              config_.embedding_mode, config_.embedding_threshold);
          chunk_preds[i].requirement_id = task.requirements[chunk_start + i].id;
        }
      }

      // Rows are persisted only once the whole chunk succeeded, so a resumed
      // run restarts exactly at a chunk boundary.
      for (std::size_t i = 0; i < chunk_len; ++i) {
        const Requirement& req = task.requirements[chunk_start + i];
        const std::string& gold = req.label(task.spec.labeling_scheme);
        out << prediction_row(chunk_start + i, req, gold, chunk_preds[i]) << "\n";
        golds.push_back(gold);
        preds.push_back(chunk_preds[i].abstained ? std::string() : chunk_preds[i].predicted);
      }
      out.flush();
      if (!out) throw io_error("failed writing checkpoint " + part_path);
    }

    out.close();
    fs::rename(part_path, final_path);
  }

  MetricReport report = score_predictions(preds, golds, roster);
  result.weighted_precision = report.weighted_precision;
  result.weighted_recall = report.weighted_recall;
  result.weighted_f1 = report.weighted_f1;

  fs::create_directories(fs::path(out_dir_) / "reports");
  std::ofstream rep((fs::path(out_dir_) / "reports" / (setting.id() + ".json")).string(),
                    std::ios::binary);
  rep << report_to_json(report, roster) << "\n";

  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::vector<ExperimentResult> GridRunner::run(std::optional<TaskKind> family,
                                              std::optional<Pipeline> pipeline, bool resume) {
  std::vector<ExperimentSetting> plan = plan_grid(config_, family, pipeline);
  fs::create_directories(out_dir_);

  if (!resume) {
    // stale outputs from a previous run would alias with this plan's ids
    for (const auto& setting : plan) {
      fs::remove(fs::path(out_dir_) / "predictions" / (setting.id() + ".csv"));
      fs::remove(fs::path(out_dir_) / "predictions" / (setting.id() + ".csv.part"));
    }
  }

  // One task instance per task; one shared backend per distinct endpoint.
  std::set<std::string> task_names;
  for (const auto& setting : plan) task_names.insert(setting.task);
  for (const auto& name : task_names) {
    if (task_cache_.count(name)) continue;
    const TaskConfig& tc = config_.task(name);
    const DatasetConfig& dc = config_.dataset(tc.dataset);
    if (!dataset_cache_.count(dc.name))
      dataset_cache_[dc.name] = load_dataset(dc.path, dc.schemes);
    task_cache_.emplace(name, materialize_task(dataset_cache_[dc.name], tc.spec));
  }

  std::map<std::string, std::unique_ptr<ScoringBackend>> backends;
  auto backend_for = [&](const std::string& alias) -> ScoringBackend& {
    for (const auto& models : {config_.models, config_.embedding_models}) {
      for (const auto& m : models) {
        if (m.alias != alias) continue;
        if (!backends.count(alias)) {
          std::string endpoint = config_.endpoint_for(m);
          if (endpoint == "mock")
            backends[alias] = std::make_unique<MockBackend>(config_.lexicons, m.embed_dim);
          else
            backends[alias] = std::make_unique<HttpBackend>(endpoint, config_.retries);
        }
        return *backends[alias];
      }
    }
    throw config_error("unknown model alias '" + alias + "'");
  };

  std::unique_ptr<FaultInjectingBackend> limited;
  std::vector<ExperimentResult> results;
  for (const auto& setting : plan) {
    ScoringBackend* backend = &backend_for(setting.model_id);
    if (call_limit_) {
      if (!limited) limited = std::make_unique<FaultInjectingBackend>(*backend, *call_limit_);
      backend = limited.get();
    }
    results.push_back(run_setting(setting, *backend));
  }

  std::vector<ComparisonRow> comparisons;
  // With both pipelines present, compare the best prompt-scored setting
  // against the best embedding setting per task.
  bool has_inference = false, has_embedding = false;
  for (const auto& r : results) {
    has_inference |= r.setting.pipeline == Pipeline::Inference;
    has_embedding |= r.setting.pipeline == Pipeline::Embedding;
  }
  if (has_inference && has_embedding) {
    for (const auto& task_name : task_names) {
      const ExperimentResult* best_inf = nullptr;
      const ExperimentResult* best_emb = nullptr;
      for (const auto& r : results) {
        if (r.setting.task != task_name) continue;
        if (r.setting.pipeline == Pipeline::Inference) {
          if (!best_inf || r.weighted_f1 > best_inf->weighted_f1) best_inf = &r;
        } else {
          if (!best_emb || r.weighted_f1 > best_emb->weighted_f1) best_emb = &r;
        }
      }
      if (!best_inf || !best_emb) continue;
      std::vector<std::string> golds_a, preds_a, golds_b, preds_b;
      load_predictions(best_inf->predictions_path, golds_a, preds_a);
      load_predictions(best_emb->predictions_path, golds_b, preds_b);
      std::string pair = best_inf->setting.model_id + "/" + *best_inf->setting.pattern_id +
                         " vs " + best_emb->setting.model_id;
      comparisons.push_back(compare_predictions(
          preds_a, preds_b, golds_a, task_cache_.at(task_name).spec.classes, task_name, pair));
    }
    std::sort(comparisons.begin(), comparisons.end(),
              [](const ComparisonRow& a, const ComparisonRow& b) { return a.task < b.task; });
  }

  emit_report(results, comparisons, out_dir_);
  return results;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

std::string results_csv(const std::vector<ExperimentResult>& results) {
  std::ostringstream out;
  out << "model,pipeline,family,task,pattern,variation,measure,value\n";
  for (const auto& r : results) {
    for (const auto& measure : kMeasures) {
      out << csv_join({r.setting.model_id, pipeline_name(r.setting.pipeline),
                       family_label(r.setting.family), r.setting.task,
                       r.setting.pattern_id ? *r.setting.pattern_id : "",
                       r.setting.variation ? variation_name(*r.setting.variation) : "", measure,
                       format_double(r.measure(measure))})
          << "\n";
    }
  }
  return out.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << content;
}

std::string stars(double p) { return p < 0.05 ? "*" : ""; }

}  // namespace

void emit_report(const std::vector<ExperimentResult>& results,
                 const std::vector<ComparisonRow>& comparisons, const std::string& out_dir) {
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "results.csv", results_csv(results));

  std::vector<TaskKind> families;
  for (const auto& r : results) {
    if (r.setting.pipeline != Pipeline::Inference) continue;
    if (std::find(families.begin(), families.end(), r.setting.family) == families.end())
      families.push_back(r.setting.family);
  }
  std::sort(families.begin(), families.end(), [](TaskKind a, TaskKind b) {
    return family_label(a) < family_label(b);
  });

  std::ostringstream report;
  report << "# Experiment report\n\n";
  if (results.empty()) {
    report << "## No settings run\n\nThe plan was empty; nothing to report.\n";
    write_file(fs::path(out_dir) / "report.md", report.str());
    write_file(fs::path(out_dir) / "stats_friedman.csv",
               "measure,factor,family,method,statistic,df,p_value,n,significant\n");
    write_file(fs::path(out_dir) / "stats_wilcoxon.csv",
               "measure,task,pair,method,statistic,df,p_value,n,significant\n");
    for (Factor f : all_factors())
      write_file(fs::path(out_dir) / ("summary_" + factor_name(f) + ".csv"),
                 "family,measure,level,avg,max,times_best,contexts\n");
    return;
  }

  std::size_t n_inference = 0, n_embedding = 0;
  for (const auto& r : results)
    (r.setting.pipeline == Pipeline::Inference ? n_inference : n_embedding) += 1;
  report << "Settings executed: " << results.size() << " (" << n_inference
         << " prompt-scored, " << n_embedding << " embedding).\n";

  // per-factor summaries
  std::map<Factor, std::ostringstream> summary_csv;
  for (Factor f : all_factors())
    summary_csv[f] << "family,measure,level,avg,max,times_best,contexts\n";

  for (TaskKind family : families) {
    report << "\n## Factor summaries (" << family_label(family) << ")\n";
    for (Factor f : all_factors()) {
      report << "\n### Factor: " << factor_name(f) << "\n\n";
      report << "| measure | level | avg | max | times best |\n";
      report << "|---|---|---|---|---|\n";
      for (const auto& measure : kMeasures) {
        FactorSummary s = summarize_factor(results, f, measure, family);
        for (const auto& level : s.levels) {
          summary_csv[f] << csv_join({family_label(family), measure, level.level,
                                      format_double(level.avg), format_double(level.max),
                                      std::to_string(level.times_best),
                                      std::to_string(s.contexts)})
                         << "\n";
          report << "| " << measure << " | " << level.level << " | " << format_double(level.avg)
                 << " | " << format_double(level.max) << " | " << level.times_best << " |\n";
        }
      }
    }
  }
  for (Factor f : all_factors())
    write_file(fs::path(out_dir) / ("summary_" + factor_name(f) + ".csv"), summary_csv[f].str());

  // Friedman per factor x measure x family
  std::ostringstream friedman_csv;
  friedman_csv << "measure,factor,family,method,statistic,df,p_value,n,significant\n";
  report << "\n## Friedman tests\n\n";
  report << "Cells marked by (*) reject the null hypothesis at p < 0.05.\n\n";
  report << "| family | measure | factor | statistic | df | p-value | |\n";
  report << "|---|---|---|---|---|---|---|\n";
  for (TaskKind family : families) {
    for (Factor f : all_factors()) {
      std::vector<std::string> levels;
      for (const auto& measure : kMeasures) {
        std::vector<std::vector<double>> matrix =
            pivot_for_friedman(results, f, measure, family, &levels);
        if (levels.size() < 2 || matrix.size() < 2) continue;
        StatTestResult t = friedman_test(matrix);
        friedman_csv << csv_join({measure, factor_name(f), family_label(family),
                                  stat_method_name(t.method), format_double(t.statistic),
                                  t.df ? std::to_string(*t.df) : "",
                                  format_double(t.p_value), std::to_string(t.n_effective),
                                  stars(t.p_value)})
                     << "\n";
        report << "| " << family_label(family) << " | " << measure << " | " << factor_name(f)
               << " | " << format_double(t.statistic) << " | " << (t.df ? std::to_string(*t.df) : "")
               << " | " << format_double(t.p_value) << " | " << stars(t.p_value) << " |\n";
      }
    }
  }
  write_file(fs::path(out_dir) / "stats_friedman.csv", friedman_csv.str());

  // Wilcoxon comparisons
  std::ostringstream wilcoxon_csv;
  wilcoxon_csv << "measure,task,pair,method,statistic,df,p_value,n,significant\n";
  if (!comparisons.empty()) {
    report << "\n## Wilcoxon comparisons (best prompt-scored vs best embedding)\n\n";
    report << "| measure | task | pair | statistic | p-value | |\n";
    report << "|---|---|---|---|---|---|\n";
  }
  for (const auto& c : comparisons) {
    wilcoxon_csv << csv_join({c.measure, c.task, c.pair, stat_method_name(c.test.method),
                              format_double(c.test.statistic), "",
                              format_double(c.test.p_value),
                              std::to_string(c.test.n_effective), stars(c.test.p_value)})
                 << "\n";
    report << "| " << c.measure << " | " << c.task << " | " << c.pair << " | "
           << format_double(c.test.statistic) << " | " << format_double(c.test.p_value) << " | "
           << stars(c.test.p_value) << " |\n";
  }
  write_file(fs::path(out_dir) / "stats_wilcoxon.csv", wilcoxon_csv.str());

  write_file(fs::path(out_dir) / "report.md", report.str());
}

std::vector<ExperimentResult> load_results(const std::string& out_dir) {
  std::string path = (fs::path(out_dir) / "results.csv").string();
  auto records = read_csv_file(path);
  if (records.empty()) throw io_error("results file is empty: " + path);
  const std::vector<std::string> header = {"model", "pipeline", "family", "task",
                                           "pattern", "variation", "measure", "value"};
  if (records.front() != header) throw io_error("unexpected results.csv header in " + path);

  std::vector<ExperimentResult> results;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.size() != header.size())
      throw io_error(path + ": malformed row " + std::to_string(i));
    ExperimentSetting s;
    s.model_id = rec[0];
    s.pipeline = rec[1] == "embedding" ? Pipeline::Embedding : Pipeline::Inference;
    s.family = rec[2] == "multiclass" ? TaskKind::Multiclass : TaskKind::Binary;
    s.task = rec[3];
    if (!rec[4].empty()) s.pattern_id = rec[4];
    if (!rec[5].empty()) {
      auto v = variation_from_name(rec[5]);
      if (!v) throw io_error(path + ": unknown variation '" + rec[5] + "'");
      s.variation = v;
    }
    std::string key = s.id();
    if (!index.count(key)) {
      index[key] = results.size();
      ExperimentResult r;
      r.setting = s;
      r.predictions_path = (fs::path(out_dir) / "predictions" / (s.id() + ".csv")).string();
      results.push_back(std::move(r));
    }
    ExperimentResult& r = results[index[key]];
    double value = std::stod(rec[7]);
    if (rec[6] == "wP") r.weighted_precision = value;
    else if (rec[6] == "wR") r.weighted_recall = value;
    else if (rec[6] == "wF1") r.weighted_f1 = value;
    else throw io_error(path + ": unknown measure '" + rec[6] + "'");
  }
  return results;
}

void load_predictions(const std::string& path, std::vector<std::string>& golds,
                      std::vector<std::string>& preds) {
  golds.clear();
  preds.clear();
  auto records = read_csv_file(path);
  if (records.empty() || csv_join(records.front()) != kPredictionsHeader)
    throw io_error("predictions file " + path + " has an unexpected header");
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].size() != 5)
      throw io_error("predictions file " + path + ": malformed row " + std::to_string(i));
    golds.push_back(records[i][2]);
    preds.push_back(records[i][3]);
  }
}

ComparisonRow compare_best(const std::string& results_dir_a, const std::string& results_dir_b,
                           const std::string& task_name) {
  auto pick_best = [&](const std::string& dir) {
    auto results = load_results(dir);
    const ExperimentResult* best = nullptr;
    for (const auto& r : results)
      if (r.setting.task == task_name && (!best || r.weighted_f1 > best->weighted_f1)) best = &r;
    if (!best) throw config_error("no results for task '" + task_name + "' in " + dir);
    return *best;
  };
  ExperimentResult a = pick_best(results_dir_a);
  ExperimentResult b = pick_best(results_dir_b);

  std::vector<std::string> golds_a, preds_a, golds_b, preds_b;
  load_predictions(a.predictions_path, golds_a, preds_a);
  load_predictions(b.predictions_path, golds_b, preds_b);
  if (golds_a != golds_b)
    throw config_error("compare_best: the two result sets cover different gold sequences");

  // roster = gold classes in first-appearance order plus any predicted-only
  std::vector<std::string> roster;
  auto add = [&](const std::string& cls) {
    if (!cls.empty() && std::find(roster.begin(), roster.end(), cls) == roster.end())
      roster.push_back(cls);
  };
  for (const auto& g : golds_a) add(g);
  for (const auto& p : preds_a) add(p);
  for (const auto& p : preds_b) add(p);

  std::string pair = a.setting.model_id +
                     (a.setting.pattern_id ? "/" + *a.setting.pattern_id : "") + " vs " +
                     b.setting.model_id +
                     (b.setting.pattern_id ? "/" + *b.setting.pattern_id : "");
  return compare_predictions(preds_a, preds_b, golds_a, roster, task_name, pair);
}

std::vector<std::string> audit_results(const std::string& out_dir, const RunConfig& config) {
  std::vector<std::string> mismatches;
  auto results = load_results(out_dir);
  for (const auto& r : results) {
    std::vector<std::string> golds, preds;
    load_predictions(r.predictions_path, golds, preds);
    const TaskConfig& tc = config.task(r.setting.task);
    MetricReport report = score_predictions(preds, golds, tc.spec.classes);
    auto check = [&](const std::string& measure, double stored, double recomputed) {
      if (format_double(stored) != format_double(recomputed))
        mismatches.push_back(r.setting.id() + " " + measure + ": results.csv has " +
                             format_double(stored) + ", recomputed " +
                             format_double(recomputed));
    };
    check("wP", r.weighted_precision, report.weighted_precision);
    check("wR", r.weighted_recall, report.weighted_recall);
    check("wF1", r.weighted_f1, report.weighted_f1);
  }
  return mismatches;
}

}  // namespace reqgrid

#pragma once

#include <map>
#include <string>
#include <vector>

namespace reqgrid {

// Rows are gold classes, columns are predicted classes; abstaining
// predictions land in a dedicated extra column.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  std::vector<std::vector<std::size_t>> counts;  // K x K
  std::vector<std::size_t> abstain_column;       // per gold class
  bool has_abstain = false;

  std::size_t total() const;
  std::size_t support(std::size_t gold_index) const;  // row sum incl. abstain
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct MetricReport {
  std::map<std::string, ClassMetrics> per_class;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  std::vector<std::string> flags;  // degenerate-denominator notes
};

// `preds` may contain the empty string for abstained predictions.
ConfusionMatrix confusion(const std::vector<std::string>& preds,
                          const std::vector<std::string>& golds,
                          const std::vector<std::string>& classes);

double f1_score(double precision, double recall);

// Zero-denominator cells score 0 and record a flag; never NaN, never throws.
MetricReport per_class_prf(const ConfusionMatrix& cm);

// Support-weighted means of per-class values.
void weighted_prf(MetricReport& report);
double weighted_mean(const std::vector<double>& values, const std::vector<std::size_t>& supports);

MetricReport score_predictions(const std::vector<std::string>& preds,
                               const std::vector<std::string>& golds,
                               const std::vector<std::string>& classes);

std::string report_to_csv(const MetricReport& report, const std::vector<std::string>& classes);
std::string report_to_json(const MetricReport& report, const std::vector<std::string>& classes);

}  // namespace reqgrid

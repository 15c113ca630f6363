#include "reqgrid/metrics.hpp"

#include <sstream>

#include "json.hpp"

#include "reqgrid/csv.hpp"
#include "reqgrid/error.hpp"
#include "reqgrid/strings.hpp"

namespace reqgrid {

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (const auto& row : counts)
    for (std::size_t c : row) sum += c;
  for (std::size_t c : abstain_column) sum += c;
  return sum;
}

std::size_t ConfusionMatrix::support(std::size_t gold_index) const {
  std::size_t sum = 0;
  for (std::size_t c : counts[gold_index]) sum += c;
  sum += abstain_column[gold_index];
  return sum;
}

ConfusionMatrix confusion(const std::vector<std::string>& preds,
                          const std::vector<std::string>& golds,
                          const std::vector<std::string>& classes) {
  if (preds.size() != golds.size())
    throw config_error("confusion: preds and golds have different lengths");

  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts.assign(classes.size(), std::vector<std::size_t>(classes.size(), 0));
  cm.abstain_column.assign(classes.size(), 0);

  auto index_of = [&](const std::string& cls) {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == cls) return static_cast<int>(i);
    return -1;
  };

  for (std::size_t i = 0; i < preds.size(); ++i) {
    int g = index_of(golds[i]);
    if (g < 0) throw config_error("confusion: unknown gold class '" + golds[i] + "'");
    if (preds[i].empty()) {
      cm.abstain_column[g] += 1;
      cm.has_abstain = true;
      continue;
    }
    int p = index_of(preds[i]);
    if (p < 0) throw config_error("confusion: unknown predicted class '" + preds[i] + "'");
    cm.counts[g][p] += 1;
  }
  return cm;
}

double f1_score(double precision, double recall) {
  double sum = precision + recall;
  if (sum == 0.0) return 0.0;
  return 2.0 * precision * recall / sum;
}

MetricReport per_class_prf(const ConfusionMatrix& cm) {
  MetricReport report;
  const std::size_t k = cm.classes.size();
  for (std::size_t c = 0; c < k; ++c) {
    ClassMetrics m;
    std::size_t tp = cm.counts[c][c];
    std::size_t predicted = 0;  // column sum: abstains never count here
    for (std::size_t g = 0; g < k; ++g) predicted += cm.counts[g][c];
    std::size_t support = cm.support(c);
    m.support = support;
    if (predicted == 0) {
      m.precision = 0.0;
      report.flags.push_back("class '" + cm.classes[c] + "' was never predicted (P=0)");
    } else {
      m.precision = static_cast<double>(tp) / static_cast<double>(predicted);
    }
    if (support == 0) {
      m.recall = 0.0;
      report.flags.push_back("class '" + cm.classes[c] + "' has zero support (R=0)");
    } else {
      m.recall = static_cast<double>(tp) / static_cast<double>(support);
    }
    m.f1 = f1_score(m.precision, m.recall);
    report.per_class[cm.classes[c]] = m;
  }
  weighted_prf(report);
  return report;
}

double weighted_mean(const std::vector<double>& values, const std::vector<std::size_t>& supports) {
  if (values.size() != supports.size())
    throw config_error("weighted_mean: values and supports differ in length");
  double total = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += values[i] * static_cast<double>(supports[i]);
    total += static_cast<double>(supports[i]);
  }
  if (total == 0.0) throw config_error("weighted_mean: zero total support");
  return acc / total;
}

void weighted_prf(MetricReport& report) {
  std::vector<double> ps, rs, fs;
  std::vector<std::size_t> supports;
  for (const auto& [cls, m] : report.per_class) {
    ps.push_back(m.precision);
    rs.push_back(m.recall);
    fs.push_back(m.f1);
    supports.push_back(m.support);
  }
  report.weighted_precision = weighted_mean(ps, supports);
  report.weighted_recall = weighted_mean(rs, supports);
  report.weighted_f1 = weighted_mean(fs, supports);
}

MetricReport score_predictions(const std::vector<std::string>& preds,
                               const std::vector<std::string>& golds,
                               const std::vector<std::string>& classes) {
  return per_class_prf(confusion(preds, golds, classes));
}

std::string report_to_csv(const MetricReport& report, const std::vector<std::string>& classes) {
  std::ostringstream out;
  out << "class,P,R,F1,support\n";
  for (const auto& cls : classes) {
    const auto& m = report.per_class.at(cls);
    out << csv_join({cls, format_double(m.precision), format_double(m.recall),
                     format_double(m.f1), std::to_string(m.support)})
        << "\n";
  }
  std::size_t total = 0;
  for (const auto& [cls, m] : report.per_class) total += m.support;
  out << csv_join({"__weighted__", format_double(report.weighted_precision),
                   format_double(report.weighted_recall), format_double(report.weighted_f1),
                   std::to_string(total)})
      << "\n";
  return out.str();
}

std::string report_to_json(const MetricReport& report, const std::vector<std::string>& classes) {
  nlohmann::json j;
  for (const auto& cls : classes) {
    const auto& m = report.per_class.at(cls);
    j["per_class"][cls] = {{"P", m.precision}, {"R", m.recall}, {"F1", m.f1}, {"support", m.support}};
  }
  j["weighted"] = {{"wP", report.weighted_precision},
                   {"wR", report.weighted_recall},
                   {"wF1", report.weighted_f1}};
  j["flags"] = report.flags;
  return j.dump(2);
}

}  // namespace reqgrid

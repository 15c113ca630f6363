#include "reqgrid/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "reqgrid/error.hpp"
#include "reqgrid/metrics.hpp"

namespace reqgrid {

std::string stat_method_name(StatMethod m) {
  switch (m) {
    case StatMethod::Friedman: return "friedman";
    case StatMethod::WilcoxonExact: return "wilcoxon-exact";
    case StatMethod::WilcoxonNormal: return "wilcoxon-normal";
  }
  return "unknown";
}

namespace {

// Tie-averaged ascending ranks of one row; also reports tie group sizes > 1.
std::vector<double> rank_one_row(const std::vector<double>& row, std::vector<int>* tie_sizes) {
  const std::size_t k = row.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return row[a] < row[b]; });
  std::vector<double> ranks(k, 0.0);
  std::size_t i = 0;
  while (i < k) {
    std::size_t j = i;
    while (j + 1 < k && row[order[j + 1]] == row[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    if (tie_sizes && j > i) tie_sizes->push_back(static_cast<int>(j - i + 1));
    i = j + 1;
  }
  return ranks;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Regularized lower incomplete gamma P(a, x) by series expansion (x < a+1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction
// (x >= a+1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double chi_square_sf(double x, int df) {
  if (df <= 0) throw config_error("chi_square_sf: df must be positive");
  if (x < 0.0) throw config_error("chi_square_sf: x must be non-negative");
  if (x == 0.0) return 1.0;
  double a = static_cast<double>(df) / 2.0;
  double xx = x / 2.0;
  if (xx < a + 1.0) return 1.0 - gamma_p_series(a, xx);
  return gamma_q_cf(a, xx);
}

RankMatrix rank_rows(const std::vector<std::vector<double>>& values) {
  if (values.size() < 2) throw config_error("rank_rows: need at least 2 blocks");
  const std::size_t k = values.front().size();
  if (k < 2) throw config_error("rank_rows: need at least 2 treatments");
  RankMatrix rm;
  rm.values = values;
  for (const auto& row : values) {
    if (row.size() != k) throw config_error("rank_rows: ragged matrix");
    for (double v : row)
      if (!std::isfinite(v)) throw config_error("rank_rows: non-finite entry");
    rm.ranks.push_back(rank_one_row(row, nullptr));
  }
  return rm;
}

StatTestResult friedman_test(const std::vector<std::vector<double>>& values) {
  const std::size_t n = values.size();
  if (n < 2) throw config_error("friedman_test: need at least 2 blocks");
  const std::size_t k = values.front().size();
  if (k < 2) throw config_error("friedman_test: need at least 2 treatments");

  std::vector<double> column_rank_sums(k, 0.0);
  double tie_term = 0.0;  // sum over tie groups of t^3 - t
  for (const auto& row : values) {
    if (row.size() != k) throw config_error("friedman_test: incomplete design (ragged row)");
    for (double v : row)
      if (!std::isfinite(v)) throw config_error("friedman_test: non-finite entry");
    std::vector<int> tie_sizes;
    std::vector<double> ranks = rank_one_row(row, &tie_sizes);
    for (std::size_t j = 0; j < k; ++j) column_rank_sums[j] += ranks[j];
    for (int t : tie_sizes) tie_term += static_cast<double>(t) * t * t - t;
  }

  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double r : column_rank_sums) sum_sq += r * r;
  double q_raw = 12.0 / (dn * dk * (dk + 1.0)) * sum_sq - 3.0 * dn * (dk + 1.0);
  double correction = 1.0 - tie_term / (dn * (dk * dk * dk - dk));

  StatTestResult result;
  result.method = StatMethod::Friedman;
  result.df = static_cast<int>(k) - 1;
  result.n_effective = static_cast<int>(n);
  if (correction <= 0.0) {
    // every block fully tied: no ranking signal at all
    result.statistic = 0.0;
    result.p_value = 1.0;
    result.notes.push_back("degenerate: all treatments tied in every block");
    return result;
  }
  result.statistic = q_raw / correction;
  if (result.statistic == 0.0) result.notes.push_back("no ranking signal (Q = 0)");
  result.p_value = chi_square_sf(result.statistic, static_cast<int>(k) - 1);
  return result;
}

std::vector<int> partition_groups(int n) {
  if (n < 3 || n == 5)
    throw config_error("cannot partition n=" + std::to_string(n) + " into groups of 3 and 4");
  for (int fours = n / 4; fours >= 0; --fours) {
    int rest = n - 4 * fours;
    if (rest % 3 == 0) {
      std::vector<int> sizes(static_cast<std::size_t>(fours), 4);
      sizes.insert(sizes.end(), static_cast<std::size_t>(rest / 3), 3);
      return sizes;
    }
  }
  throw config_error("cannot partition n=" + std::to_string(n) + " into groups of 3 and 4");
}

std::vector<double> group_wf1(const std::vector<std::string>& preds,
                              const std::vector<std::string>& golds,
                              const std::vector<int>& groups,
                              const std::vector<std::string>& roster) {
  if (preds.size() != golds.size())
    throw config_error("group_wf1: preds and golds differ in length");
  std::size_t total = 0;
  for (int g : groups) total += static_cast<std::size_t>(g);
  if (total != preds.size())
    throw config_error("group_wf1: group sizes do not sum to the item count");

  std::vector<double> out;
  out.reserve(groups.size());
  std::size_t offset = 0;
  for (int g : groups) {
    std::vector<std::string> gp(preds.begin() + offset, preds.begin() + offset + g);
    std::vector<std::string> gg(golds.begin() + offset, golds.begin() + offset + g);
    out.push_back(score_predictions(gp, gg, roster).weighted_f1);
    offset += static_cast<std::size_t>(g);
  }
  return out;
}

StatTestResult wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw config_error("wilcoxon_signed_rank: length mismatch");
  if (x.empty()) throw config_error("wilcoxon_signed_rank: empty input");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back(d);
  }

  StatTestResult result;
  result.n_effective = static_cast<int>(diffs.size());
  if (diffs.empty()) {
    result.method = StatMethod::WilcoxonExact;
    result.statistic = 0.0;
    result.p_value = 1.0;
    result.notes.push_back("degenerate: all differences zero");
    return result;
  }

  const std::size_t n = diffs.size();
  std::vector<double> abs_diffs(n);
  for (std::size_t i = 0; i < n; ++i) abs_diffs[i] = std::fabs(diffs[i]);
  std::vector<int> tie_sizes;
  std::vector<double> ranks = rank_one_row(abs_diffs, &tie_sizes);

  double w_pos = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (diffs[i] > 0.0) w_pos += ranks[i];
  const double rank_total = static_cast<double>(n) * (static_cast<double>(n) + 1.0) / 2.0;
  double w_neg = rank_total - w_pos;
  result.statistic = std::min(w_pos, w_neg);

  if (n <= 25) {
    result.method = StatMethod::WilcoxonExact;
    // Distribution of 2*W+ over all sign assignments; tie-averaged ranks are
    // half-integers, so doubling makes them exact integers.
    std::vector<int> r2(n);
    int s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      r2[i] = static_cast<int>(std::llround(2.0 * ranks[i]));
      s2 += r2[i];
    }
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(s2) + 1, 0);
    counts[0] = 1;
    int reached = 0;
    for (std::size_t i = 0; i < n; ++i) {
      reached += r2[i];
      for (int s = reached; s >= r2[i]; --s) counts[s] += counts[s - r2[i]];
    }
    const int w2 = static_cast<int>(std::llround(2.0 * result.statistic));
    if (2 * w2 >= s2) {
      result.p_value = 1.0;
    } else {
      std::uint64_t favorable = 0;
      for (int s = 0; s <= w2; ++s) favorable += counts[s];          // W+ <= w
      for (int s = s2 - w2; s <= s2; ++s) favorable += counts[s];    // W- <= w
      result.p_value = static_cast<double>(favorable) / std::exp2(static_cast<double>(n));
    }
  } else {
    result.method = StatMethod::WilcoxonNormal;
    const double dn = static_cast<double>(n);
    double mean = dn * (dn + 1.0) / 4.0;
    double tie_term = 0.0;
    for (int t : tie_sizes) tie_term += static_cast<double>(t) * t * t - t;
    double var = dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0;
    if (var <= 0.0) {
      result.p_value = 1.0;
      result.notes.push_back("degenerate: zero variance");
      return result;
    }
    // continuity correction toward the mean; statistic is min(W+, W-)
    double z = (result.statistic - mean + 0.5) / std::sqrt(var);
    result.p_value = std::min(1.0, 2.0 * normal_cdf(z));
  }
  return result;
}

}  // namespace reqgrid

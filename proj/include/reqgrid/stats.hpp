#pragma once

#include <optional>
#include <string>
#include <vector>

namespace reqgrid {

enum class StatMethod { Friedman, WilcoxonExact, WilcoxonNormal };

struct StatTestResult {
  StatMethod method = StatMethod::Friedman;
  double statistic = 0.0;
  std::optional<int> df;
  double p_value = 1.0;
  int n_effective = 0;
  std::vector<std::string> notes;
};

std::string stat_method_name(StatMethod m);

// Row-wise ascending ranks (largest value gets rank k); ties receive the
// average of the spanned ranks.
struct RankMatrix {
  std::vector<std::vector<double>> values;
  std::vector<std::vector<double>> ranks;
};

RankMatrix rank_rows(const std::vector<std::vector<double>>& values);

// Upper-tail chi-square probability via the regularized upper incomplete
// gamma function.
double chi_square_sf(double x, int df);

// Friedman rank test over an n-block x k-treatment matrix, with the standard
// tie correction. Fully tied data degenerates to Q=0, p=1 plus a note.
StatTestResult friedman_test(const std::vector<std::vector<double>>& values);

// Composition of n into parts of size 3 and 4 with as many 4s as possible;
// n in {1,2,5} (and 0) is infeasible.
std::vector<int> partition_groups(int n);

// Group-level weighted F1 over contiguous groups, with supports taken from
// the gold labels inside each group.
std::vector<double> group_wf1(const std::vector<std::string>& preds,
                              const std::vector<std::string>& golds,
                              const std::vector<int>& groups,
                              const std::vector<std::string>& roster);

// Paired two-sided signed-rank test. Zero differences are dropped; exact
// enumeration over sign assignments up to n_effective = 25, normal
// approximation with tie and continuity correction beyond.
StatTestResult wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace reqgrid

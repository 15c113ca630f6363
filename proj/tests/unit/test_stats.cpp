#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "reqgrid/error.hpp"
#include "reqgrid/metrics.hpp"
#include "reqgrid/stats.hpp"

using namespace reqgrid;

TEST_SUITE_BEGIN("stats");

// ---------------------------------------------------------------------------
// test-side oracles, kept independent of the library implementations

namespace {

// Friedman statistic recomputed from the plain formula on explicit ranks.
double oracle_friedman_q(const std::vector<std::vector<double>>& rank_rows_in) {
  std::size_t n = rank_rows_in.size();
  std::size_t k = rank_rows_in.front().size();
  std::vector<double> col(k, 0.0);
  for (const auto& row : rank_rows_in)
    for (std::size_t j = 0; j < k; ++j) col[j] += row[j];
  double sum_sq = 0.0;
  for (double r : col) sum_sq += r * r;
  return 12.0 / (double(n) * k * (k + 1)) * sum_sq - 3.0 * double(n) * (k + 1);
}

// Exact permutation distribution over all (k!)^n rank assignments: returns
// P(Q >= q_obs). Tie-free data only (random continuous draws).
double oracle_friedman_exact_p(double q_obs, std::size_t n, std::size_t k) {
  std::vector<std::vector<double>> perms;
  std::vector<double> base(k);
  std::iota(base.begin(), base.end(), 1.0);
  std::sort(base.begin(), base.end());
  do {
    perms.push_back(base);
  } while (std::next_permutation(base.begin(), base.end()));

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= perms.size();

  std::size_t favorable = 0;
  std::vector<std::size_t> idx(n, 0);
  std::vector<std::vector<double>> rows(n);
  for (std::size_t config = 0; config < total; ++config) {
    std::size_t rest = config;
    for (std::size_t i = 0; i < n; ++i) {
      rows[i] = perms[rest % perms.size()];
      rest /= perms.size();
    }
    if (oracle_friedman_q(rows) >= q_obs - 1e-9) ++favorable;
  }
  return double(favorable) / double(total);
}

// Wilcoxon exact oracle: literal enumeration of every sign assignment.
double oracle_wilcoxon_exact_p(const std::vector<double>& diffs) {
  std::size_t n = diffs.size();
  std::vector<double> mags(n);
  for (std::size_t i = 0; i < n; ++i) mags[i] = std::fabs(diffs[i]);
  // tie-averaged ranks of magnitudes
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return mags[a] < mags[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && mags[order[j + 1]] == mags[order[i]]) ++j;
    double avg = (double(i) + double(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  double total_rank = double(n) * (double(n) + 1.0) / 2.0;
  double w_pos = 0.0;
  for (std::size_t t = 0; t < n; ++t)
    if (diffs[t] > 0) w_pos += ranks[t];
  double w_obs = std::min(w_pos, total_rank - w_pos);

  std::size_t favorable = 0;
  std::size_t patterns = std::size_t(1) << n;
  for (std::size_t mask = 0; mask < patterns; ++mask) {
    double wp = 0.0;
    for (std::size_t t = 0; t < n; ++t)
      if (mask & (std::size_t(1) << t)) wp += ranks[t];
    double w = std::min(wp, total_rank - wp);
    if (w <= w_obs + 1e-12) ++favorable;
  }
  return double(favorable) / double(patterns);
}

}  // namespace

// ---------------------------------------------------------------------------

TEST_CASE("rank_rows assigns ascending ranks with tie averaging") {
  RankMatrix rm = rank_rows({{0.1, 0.5, 0.3}, {0.4, 0.4, 0.9}});
  CHECK(rm.ranks[0] == std::vector<double>{1.0, 3.0, 2.0});
  CHECK(rm.ranks[1] == std::vector<double>{1.5, 1.5, 3.0});
}

TEST_CASE("every rank row sums to k(k+1)/2") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t k = 2 + trial % 6;
    std::vector<std::vector<double>> values(3, std::vector<double>(k));
    for (auto& row : values)
      for (double& v : row) v = dist(rng);
    RankMatrix rm = rank_rows(values);
    for (const auto& row : rm.ranks) {
      double sum = 0.0;
      for (double r : row) sum += r;
      CHECK(sum == doctest::Approx(double(k) * (k + 1) / 2.0).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(rank_rows({{1.0, 2.0}}), config_error);
  CHECK_THROWS_AS(rank_rows({{1.0, std::nan("")}, {1.0, 2.0}}), config_error);
}

TEST_CASE("chi_square_sf fixed points") {
  CHECK(chi_square_sf(0.0, 1) == 1.0);
  CHECK(chi_square_sf(0.0, 7) == 1.0);
  CHECK(std::fabs(chi_square_sf(6.0, 2) - std::exp(-3.0)) < 1e-8);
  CHECK(std::fabs(chi_square_sf(3.841459, 1) - 0.05) < 1e-6);
  CHECK_THROWS_AS(chi_square_sf(-1.0, 2), config_error);
  CHECK_THROWS_AS(chi_square_sf(1.0, 0), config_error);
}

TEST_CASE("chi_square_sf is monotone decreasing in x") {
  for (int df : {1, 2, 5, 10, 50}) {
    double prev = 1.0 + 1e-16;
    for (int i = 0; i <= 1000; ++i) {
      double x = 200.0 * double(i) / 1000.0;
      double p = chi_square_sf(x, df);
      CHECK(p <= prev);
      CHECK(p >= 0.0);
      prev = p;
    }
  }
}

TEST_CASE("chi_square_sf df=2 closed form over a sweep") {
  for (int i = 1; i <= 100; ++i) {
    double x = 0.5 * i;
    CHECK(std::fabs(chi_square_sf(x, 2) - std::exp(-x / 2.0)) < 1e-10);
  }
}

TEST_CASE("friedman on the perfectly consistent 3x3 case: Q=6, p=e^-3") {
  std::vector<std::vector<double>> values = {{0.1, 0.2, 0.3}, {0.4, 0.5, 0.6}, {0.2, 0.4, 0.9}};
  StatTestResult r = friedman_test(values);
  CHECK(r.statistic == doctest::Approx(6.0).epsilon(1e-12));
  REQUIRE(r.df.has_value());
  CHECK(*r.df == 2);
  CHECK(std::fabs(r.p_value - std::exp(-3.0)) < 1e-8);
  CHECK(r.n_effective == 3);
}

TEST_CASE("friedman with identical columns degenerates to p=1") {
  std::vector<std::vector<double>> values = {{0.5, 0.5, 0.5}, {0.7, 0.7, 0.7}, {0.1, 0.1, 0.1}};
  StatTestResult r = friedman_test(values);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("friedman is invariant under strictly monotone cell transforms") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<double>> values(4, std::vector<double>(3));
    for (auto& row : values)
      for (double& v : row) v = dist(rng);
    StatTestResult base = friedman_test(values);
    auto transformed = values;
    for (auto& row : transformed)
      for (double& v : row) v = std::exp(3.0 * v + 1.0);
    StatTestResult after = friedman_test(transformed);
    CHECK(after.statistic == doctest::Approx(base.statistic).epsilon(1e-12));
    CHECK(after.p_value == doctest::Approx(base.p_value).epsilon(1e-12));
  }
}

TEST_CASE("friedman statistic matches the oracle formula and its exact null envelope") {
  std::mt19937 rng(20240821);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  int reject_at_05 = 0;
  int envelope_violations = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::vector<double>> values(5, std::vector<double>(3));
    for (auto& row : values)
      for (double& v : row) v = dist(rng);

    StatTestResult r = friedman_test(values);
    // statistic agrees with the straight-formula oracle on explicit ranks
    RankMatrix rm = rank_rows(values);
    CHECK(r.statistic == doctest::Approx(oracle_friedman_q(rm.ranks)).epsilon(1e-9));

    // the observed statistic sits inside the exact null's 99% envelope;
    // the support is discrete, so null data itself lands beyond the
    // envelope with probability P(Q = Q_max) = 6/7776 per draw
    double p_exact = oracle_friedman_exact_p(r.statistic, 5, 3);
    if (p_exact <= 0.005) ++envelope_violations;
    if (r.p_value <= 0.05) ++reject_at_05;
  }
  CHECK(envelope_violations <= 2);
  // calibration: chi-square rejections at 0.05 within the 99% binomial band
  // of the exact null probability P(Q >= 6.4) = 306/7776
  double p05 = oracle_friedman_exact_p(6.4, 5, 3);
  double sd = std::sqrt(p05 * (1 - p05) / 200.0);
  CHECK(double(reject_at_05) / 200.0 > p05 - 2.576 * sd - 1e-9);
  CHECK(double(reject_at_05) / 200.0 < p05 + 2.576 * sd + 1e-9);
}

TEST_CASE("friedman with k=2 agrees with a sign-test oracle") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 12;
    std::vector<std::vector<double>> values(n, std::vector<double>(2));
    for (auto& row : values)
      for (double& v : row) v = dist(rng);
    StatTestResult r = friedman_test(values);
    // with k=2 and no ties the statistic reduces to (|wins1 - wins2|)^2 / n
    std::size_t wins_first = 0;
    for (const auto& row : values)
      if (row[0] > row[1]) ++wins_first;
    double d = double(wins_first) - double(n - wins_first);
    CHECK(r.statistic == doctest::Approx(d * d / double(n)).epsilon(1e-9));
  }
}

TEST_CASE("partition_groups composes 3s and 4s, maximizing fours") {
  CHECK(partition_groups(8) == std::vector<int>{4, 4});
  CHECK(partition_groups(10) == std::vector<int>{4, 3, 3});
  CHECK(partition_groups(3) == std::vector<int>{3});
  CHECK(partition_groups(6) == std::vector<int>{3, 3});
  CHECK(partition_groups(7) == std::vector<int>{4, 3});
  CHECK(partition_groups(9) == std::vector<int>{3, 3, 3});
  CHECK_THROWS_AS(partition_groups(5), config_error);
  CHECK_THROWS_AS(partition_groups(2), config_error);
  CHECK_THROWS_AS(partition_groups(1), config_error);

  for (int n = 3; n <= 600; ++n) {
    if (n == 5) continue;
    auto sizes = partition_groups(n);
    int sum = 0, fours = 0;
    for (int s : sizes) {
      CHECK((s == 3 || s == 4));
      sum += s;
      if (s == 4) ++fours;
    }
    CHECK(sum == n);
    // no composition with more fours exists
    for (int extra = fours + 1; 4 * extra <= n; ++extra)
      CHECK((n - 4 * extra) % 3 != 0);
  }
}

TEST_CASE("group_wf1 computes the per-group weighted F1 (oracle-checked)") {
  std::vector<std::string> golds = {"A", "A", "B", "B", "A", "B", "B"};
  std::vector<std::string> preds = {"A", "B", "B", "B", "A", "B", "A"};
  std::vector<double> scores = group_wf1(preds, golds, {4, 3}, {"A", "B"});
  REQUIRE(scores.size() == 2);
  // frozen from the metrics brute-force oracle (and checked live below)
  CHECK(scores[0] == doctest::Approx(11.0 / 15.0).epsilon(1e-12));
  CHECK(scores[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  MetricReport g1 = score_predictions({"A", "B", "B", "B"}, {"A", "A", "B", "B"}, {"A", "B"});
  MetricReport g2 = score_predictions({"A", "B", "A"}, {"A", "B", "B"}, {"A", "B"});
  CHECK(scores[0] == doctest::Approx(g1.weighted_f1).epsilon(1e-15));
  CHECK(scores[1] == doctest::Approx(g2.weighted_f1).epsilon(1e-15));
}

TEST_CASE("group_wf1: perfect predictions score 1 and items commute within a group") {
  std::vector<std::string> golds = {"A", "B", "A", "B", "A", "B"};
  auto perfect = group_wf1(golds, golds, {3, 3}, {"A", "B"});
  for (double s : perfect) CHECK(s == doctest::Approx(1.0));

  std::vector<std::string> preds = {"A", "A", "B", "B", "B", "A"};
  auto base = group_wf1(preds, golds, {3, 3}, {"A", "B"});
  // permute within the first group only
  std::vector<std::string> golds2 = {"A", "A", "B", "B", "A", "B"};
  std::vector<std::string> preds2 = {"A", "B", "A", "B", "B", "A"};
  auto permuted = group_wf1(preds2, golds2, {3, 3}, {"A", "B"});
  CHECK(base[0] == doctest::Approx(permuted[0]).epsilon(1e-15));

  CHECK_THROWS_AS(group_wf1(preds, golds, {4, 3}, {"A", "B"}), config_error);
}

TEST_CASE("wilcoxon: identical lists are degenerate with p=1") {
  std::vector<double> x = {0.1, 0.4, 0.7};
  StatTestResult r = wilcoxon_signed_rank(x, x);
  CHECK(r.p_value == 1.0);
  CHECK(r.n_effective == 0);
  CHECK_FALSE(r.notes.empty());
}

TEST_CASE("wilcoxon: five positive differences of distinct magnitude give p=2/32") {
  std::vector<double> x = {1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> y = {0.9, 1.7, 2.6, 3.4, 4.0};
  StatTestResult r = wilcoxon_signed_rank(x, y);
  CHECK(r.method == StatMethod::WilcoxonExact);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(r.n_effective == 5);
}

TEST_CASE("wilcoxon exact equals the enumeration oracle for n <= 15") {
  std::mt19937 rng(20240822);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> sizes(1, 15);
  std::uniform_int_distribution<int> make_tie(0, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = sizes(rng);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = noise(rng);
      y[i] = noise(rng);
    }
    if (make_tie(rng) == 0 && n >= 2) {
      // force tied |d| magnitudes
      y[1] = x[1] - (x[0] - y[0]);
    }
    std::vector<double> diffs;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] != y[i]) diffs.push_back(x[i] - y[i]);
    if (diffs.empty()) continue;

    StatTestResult r = wilcoxon_signed_rank(x, y);
    double p_oracle = oracle_wilcoxon_exact_p(diffs);
    CHECK(std::fabs(r.p_value - p_oracle) < 1e-15);

    // exact p-values are achievable probabilities m / 2^n
    double scaled = r.p_value * std::exp2(double(diffs.size()));
    CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-9));
  }
}

TEST_CASE("wilcoxon symmetry: swapping the samples changes nothing") {
  std::mt19937 rng(5);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 4 + trial % 30;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = noise(rng);
      y[i] = noise(rng);
    }
    StatTestResult a = wilcoxon_signed_rank(x, y);
    StatTestResult b = wilcoxon_signed_rank(y, x);
    CHECK(a.statistic == doctest::Approx(b.statistic).epsilon(1e-12));
    CHECK(a.p_value == doctest::Approx(b.p_value).epsilon(1e-12));
  }
  CHECK_THROWS_AS(wilcoxon_signed_rank({1.0}, {1.0, 2.0}), config_error);
}

TEST_CASE("wilcoxon normal approximation stays within 0.02 of exact for n=26..40") {
  std::mt19937 rng(20240823);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> sizes(26, 40);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = sizes(rng);
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = noise(rng);
      y[i] = noise(rng);
    }
    StatTestResult r = wilcoxon_signed_rank(x, y);
    CHECK(r.method == StatMethod::WilcoxonNormal);

    // exact tail via the same subset-sum convolution idea, test-side
    std::vector<double> diffs;
    for (std::size_t i = 0; i < n; ++i)
      if (x[i] != y[i]) diffs.push_back(x[i] - y[i]);
    // (full 2^n enumeration is infeasible here; dynamic programming over
    //  rank sums is an exact equivalent)
    std::vector<double> mags;
    for (double d : diffs) mags.push_back(std::fabs(d));
    std::vector<std::size_t> order(mags.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return mags[a] < mags[b]; });
    std::vector<double> ranks(mags.size());
    std::size_t i = 0;
    while (i < mags.size()) {
      std::size_t j = i;
      while (j + 1 < mags.size() && mags[order[j + 1]] == mags[order[i]]) ++j;
      double avg = (double(i) + double(j)) / 2.0 + 1.0;
      for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
      i = j + 1;
    }
    std::size_t m = diffs.size();
    std::vector<int> r2(m);
    int total2 = 0;
    for (std::size_t t = 0; t < m; ++t) {
      r2[t] = int(std::llround(2 * ranks[t]));
      total2 += r2[t];
    }
    std::vector<double> dp(total2 + 1, 0.0);
    dp[0] = 1.0;
    for (std::size_t t = 0; t < m; ++t)
      for (int s = total2; s >= r2[t]; --s) dp[s] += dp[s - r2[t]];
    double wp = 0.0;
    for (std::size_t t = 0; t < m; ++t)
      if (diffs[t] > 0) wp += ranks[t];
    double rank_total = double(total2) / 2.0;
    double w_obs = std::min(wp, rank_total - wp);
    int w2 = int(std::llround(2 * w_obs));
    double exact;
    if (2 * w2 >= total2) {
      exact = 1.0;
    } else {
      double favorable = 0.0;
      for (int s = 0; s <= w2; ++s) favorable += dp[s];
      for (int s = total2 - w2; s <= total2; ++s) favorable += dp[s];
      exact = favorable / std::exp2(double(m));
    }
    CHECK(std::fabs(r.p_value - exact) < 0.02);
  }
}

TEST_SUITE_END();

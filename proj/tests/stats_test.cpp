// Copyright 2026 The Migrant Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "migrant/stats.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "migrant/distributions.hpp"
#include "migrant/error.hpp"
#include "migrant/rng.hpp"

namespace migrant::stats {
namespace {

// Raw sample with exactly the requested mean and sample sd.
std::vector<double> with_moments(int n, double m, double sd, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  const double xm = mean(x);
  const double xs = std::sqrt(sample_variance(x));
  for (auto& v : x) v = m + sd * (v - xm) / xs;
  return x;
}

// Direct sums of squares in long double.
double oracle_f(const std::vector<std::vector<double>>& groups) {
  long double grand = 0, count = 0;
  for (const auto& g : groups) {
    for (double v : g) grand += v;
    count += g.size();
  }
  grand /= count;
  long double ssb = 0, ssw = 0;
  for (const auto& g : groups) {
    long double m = 0;
    for (double v : g) m += v;
    m /= g.size();
    ssb += g.size() * (m - grand) * (m - grand);
    for (double v : g) ssw += (v - m) * (v - m);
  }
  const long double k = groups.size();
  return static_cast<double>((ssb / (k - 1)) / (ssw / (count - k)));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

// Reference values below were computed with SciPy.

TEST(Distributions, MatchReferenceValues) {
  EXPECT_NEAR(dist::student_t_two_tailed(2.0, 10), 0.07338803477074039, 1e-10);
  EXPECT_NEAR(dist::student_t_two_tailed(-2.405, 70), 0.018819951921646122, 1e-10);
  EXPECT_NEAR(dist::f_upper_tail(3.0, 3, 68), 0.036511914685818506, 1e-10);
  EXPECT_NEAR(dist::f_upper_tail(5.52, 3, 68), 0.0018799450696725234, 1e-10);
  EXPECT_NEAR(dist::incomplete_beta(0.3, 2.5, 3.5), 0.29675298929566646, 1e-10);
  EXPECT_NEAR(dist::incomplete_beta(0.9, 10, 0.5), 0.15164090963470994, 1e-10);
  EXPECT_NEAR(dist::normal_cdf(-1.5), 0.06680720126885807, 1e-12);
}

TEST(Distributions, StudentizedRangeReferenceValues) {
  struct Case {
    double q;
    int k;
    double df;
    double p;
  };
  const Case cases[] = {
      {3.74, 4, 60, 0.04975048274702765},  {3.314, 3, 0, 0.05004414040611005},
      {3.958, 4, 20, 0.050021211135152455}, {4.595, 4, 60, 0.009988728709692252},
      {2.0, 2, 5, 0.21643722926968534},    {5.0, 6, 12, 0.037158840971316276},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(dist::studentized_range_upper(c.q, c.k, c.df), c.p, 2e-5)
        << "q=" << c.q << " k=" << c.k << " df=" << c.df;
  }
}

TEST(Distributions, StudentizedRangeAgreesWithMonteCarlo) {
  Rng rng(4242);
  const int k = 4, df = 60, trials = 200000;
  int exceed = 0;
  for (int t = 0; t < trials; ++t) {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < k; ++i) {
      const double z = rng.normal();
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
    double chi2 = 0;
    for (int i = 0; i < df; ++i) {
      const double z = rng.normal();
      chi2 += z * z;
    }
    if ((hi - lo) / std::sqrt(chi2 / df) > 3.74) ++exceed;
  }
  const double p_mc = static_cast<double>(exceed) / trials;
  EXPECT_NEAR(dist::studentized_range_upper(3.74, k, df), p_mc, 0.003);
  EXPECT_NEAR(dist::studentized_range_upper(3.74, k, df), 0.05, 0.005);
}

TEST(Distributions, TwoGroupRangeIsScaledT) {
  // Q(2, df) = sqrt(2) |T(df)|.
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    EXPECT_NEAR(dist::studentized_range_upper(t * std::sqrt(2.0), 2, 15),
                dist::student_t_two_tailed(t, 15), 1e-6);
  }
}

TEST(TTest, GoldenTrustComparison) {
  const auto r = t_test_independent(GroupSummary{36, .611, .103}, GroupSummary{36, .668, .098});
  EXPECT_NEAR(r.t, -2.42, 0.05);
  EXPECT_NEAR(r.p_two_tailed, 0.018, 0.005);
  EXPECT_NEAR(r.cohen_d, 0.571, 0.02);
  EXPECT_EQ(r.df, 70);
}

TEST(TTest, GoldenTrustworthinessAndIdentity) {
  EXPECT_NEAR(t_test_independent(GroupSummary{36, .329, .168}, GroupSummary{36, .497, .209}).t,
              -3.73, 0.1);
  EXPECT_NEAR(t_test_independent(GroupSummary{36, .613, .104}, GroupSummary{36, .666, .097}).t,
              -2.24, 0.05);
}

TEST(TTest, RawAndSummaryAgree) {
  const auto a = with_moments(36, .611, .103, 1);
  const auto b = with_moments(36, .668, .098, 2);
  const auto raw = t_test_independent(a, b);
  const auto sum = t_test_independent(GroupSummary{36, .611, .103}, GroupSummary{36, .668, .098});
  EXPECT_NEAR(raw.t, sum.t, 1e-9);
  EXPECT_NEAR(raw.p_two_tailed, sum.p_two_tailed, 1e-9);
  EXPECT_NEAR(raw.cohen_d, sum.cohen_d, 1e-9);
}

TEST(TTest, ShiftAndScaleInvariant) {
  Rng rng(3);
  std::vector<double> a(20), b(25);
  for (auto& v : a) v = rng.normal();
  for (auto& v : b) v = rng.normal() + 0.4;
  const auto base = t_test_independent(a, b);
  for (auto& v : a) v = 3.0 * v - 7.0;
  for (auto& v : b) v = 3.0 * v - 7.0;
  const auto moved = t_test_independent(a, b);
  EXPECT_NEAR(base.t, moved.t, 1e-9);
  EXPECT_NEAR(base.cohen_d, moved.cohen_d, 1e-9);
}

TEST(TTest, DegenerateVariance) {
  const std::vector<double> same = {0.5, 0.5, 0.5};
  EXPECT_EQ(code_of([&] { t_test_independent(same, same); }), ErrorCode::kDegenerateVariance);
}

TEST(Anova, MatchesSumOfSquaresOracle) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<double>> groups(4, std::vector<double>(18));
    for (std::size_t g = 0; g < 4; ++g) {
      for (auto& v : groups[g]) v = rng.uniform() + 0.05 * g * rng.uniform();
    }
    const auto r = one_way_anova(groups);
    EXPECT_NEAR(r.f, oracle_f(groups), 1e-9);
    EXPECT_EQ(r.df_between, 3);
    EXPECT_EQ(r.df_within, 68);
  }
}

TEST(Anova, TwoGroupsGiveTSquared) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(10 + trial), b(14);
    for (auto& v : a) v = rng.normal();
    for (auto& v : b) v = rng.normal() + 0.3;
    const auto t = t_test_independent(a, b);
    const auto f = one_way_anova({a, b});
    EXPECT_NEAR(f.f, t.t * t.t, 1e-9);
    EXPECT_NEAR(f.p, t.p_two_tailed, 1e-9);
  }
}

TEST(Anova, IdenticalGroupsGiveFZero) {
  const std::vector<double> g = {0.1, 0.4, 0.7, 0.2};
  const auto r = one_way_anova({g, g, g, g});
  EXPECT_NEAR(r.f, 0.0, 1e-12);
  EXPECT_NEAR(r.p, 1.0, 1e-12);
  for (const auto& pair : tukey_hsd({g, g, g, g})) EXPECT_NEAR(pair.p, 1.0, 1e-9);
}

TEST(Anova, SummaryFormMatchesRaw) {
  Rng rng(12);
  std::vector<std::vector<double>> groups(4);
  std::vector<GroupSummary> summaries;
  for (std::size_t g = 0; g < 4; ++g) {
    groups[g].resize(10 + g);
    for (auto& v : groups[g]) v = rng.normal() + 0.2 * g;
    summaries.push_back(summarize(groups[g]));
  }
  EXPECT_NEAR(one_way_anova(groups).f, one_way_anova(summaries).f, 1e-9);
  const auto raw = tukey_hsd(groups);
  const auto sum = tukey_hsd(summaries);
  ASSERT_EQ(raw.size(), 6u);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    EXPECT_NEAR(raw[i].q, sum[i].q, 1e-9);
    EXPECT_NEAR(raw[i].p, sum[i].p, 1e-9);
  }
}

TEST(Tukey, QIsScaledMeanDifference) {
  Rng rng(21);
  std::vector<std::vector<double>> groups(3, std::vector<double>(12));
  for (std::size_t g = 0; g < 3; ++g) {
    for (auto& v : groups[g]) v = rng.normal() + g;
  }
  const auto anova = one_way_anova(groups);
  for (const auto& t : tukey_hsd(groups)) {
    const double diff = mean(groups[t.i]) - mean(groups[t.j]);
    EXPECT_NEAR(t.mean_diff, diff, 1e-12);
    EXPECT_NEAR(t.q, std::abs(diff) / std::sqrt(anova.ms_within / 12), 1e-9);
    EXPECT_NEAR(t.p, dist::studentized_range_upper(t.q, 3, anova.df_within), 1e-12);
  }
}

TEST(Tukey, SentimentCellsRebuiltFromMarginals) {
  const auto cells = reconstruct_cells({18, .687, .134}, {18, .501, .184}, {36, .603, .191},
                                       {36, .623, .183});
  EXPECT_NEAR(cells.info_only.mean, .519, 1e-9);
  EXPECT_NEAR(cells.identity_only.mean, .559, 1e-9);
  const std::vector<GroupSummary> groups = {cells.both, cells.info_only, cells.identity_only,
                                            cells.neither};
  const auto pairs = tukey_hsd(groups);
  const auto& both_vs_neither = pairs[2];
  ASSERT_EQ(both_vs_neither.i, 0);
  ASSERT_EQ(both_vs_neither.j, 3);
  EXPECT_NEAR(both_vs_neither.p, 0.018, 0.01);
}

TEST(Tukey, ReconstructionInvertsPooling) {
  const std::vector<double> both = with_moments(18, .7, .1, 5);
  const std::vector<double> other = with_moments(18, .55, .2, 6);
  std::vector<double> pooled = both;
  pooled.insert(pooled.end(), other.begin(), other.end());
  const auto cells = reconstruct_cells(summarize(both), summarize(other), summarize(pooled),
                                       summarize(pooled));
  EXPECT_NEAR(cells.info_only.mean, .55, 1e-9);
  EXPECT_NEAR(cells.info_only.sd, .2, 1e-9);
  EXPECT_EQ(cells.info_only.n, 18);
}

TEST(Cronbach, IndependentItemsNearZero) {
  Rng rng(31);
  std::vector<std::vector<double>> items(10000, std::vector<double>(5));
  for (auto& row : items) {
    for (auto& v : row) v = rng.normal();
  }
  EXPECT_NEAR(cronbach_alpha(items), 0.0, 0.1);
}

TEST(Cronbach, ParallelItemsMatchSpearmanBrown) {
  Rng rng(32);
  const double r = 0.5;
  std::vector<std::vector<double>> items(10000, std::vector<double>(5));
  for (auto& row : items) {
    const double common = rng.normal();
    for (auto& v : row) v = std::sqrt(r) * common + std::sqrt(1 - r) * rng.normal();
  }
  EXPECT_NEAR(cronbach_alpha(items), 5 * r / (1 + 4 * r), 0.02);
}

TEST(Cronbach, Errors) {
  EXPECT_EQ(code_of([] { cronbach_alpha({{1, 1}, {1, 1}, {1, 1}}); }),
            ErrorCode::kDegenerateVariance);
  EXPECT_EQ(code_of([] { cronbach_alpha({{1, 2}, {1}}); }), ErrorCode::kWrongArity);
}

TEST(Normalize, ScaleAndErrors) {
  const std::vector<int> items = {7, 7, 7};
  EXPECT_DOUBLE_EQ(normalize(items, 7), 1.0);
  const std::vector<int> mid = {3, 4};
  EXPECT_DOUBLE_EQ(normalize(mid, 7), 0.5);
  const std::vector<int> bad = {8};
  EXPECT_EQ(code_of([&] { normalize(bad, 7); }), ErrorCode::kOutOfScale);
  EXPECT_EQ(code_of([&] { normalize(std::span<const int>{}, 7); }), ErrorCode::kEmptyItems);
  EXPECT_EQ(code_of([&] { normalize(items, 1); }), ErrorCode::kOutOfScale);
}

TEST(Summary, JsonRoundTrip) {
  const GroupSummary g{36, .611, .103};
  const auto back = summary_from_json(to_json(g));
  EXPECT_EQ(back.n, 36);
  EXPECT_DOUBLE_EQ(back.mean, .611);
  EXPECT_DOUBLE_EQ(back.sd, .103);
}

}  // namespace
}  // namespace migrant::stats

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

#ifndef MIGRANT_STATS_HPP
#define MIGRANT_STATS_HPP

#include <span>
#include <string>
#include <vector>

#include "migrant/protocol.hpp"

namespace migrant::stats {

enum class Measure {
  kTrust,
  kTrustworthiness,
  kCompetence,
  kLikeability,
  kSocialPresence,
  kSentiment,
};

inline constexpr Measure kAllMeasures[] = {
    Measure::kTrust,       Measure::kTrustworthiness, Measure::kCompetence,
    Measure::kLikeability, Measure::kSocialPresence,  Measure::kSentiment,
};

std::string_view to_string(Measure m);

struct MeasureScore {
  std::string participant_id;
  Measure measure = Measure::kTrust;
  double value = 0.0;
};

// mean +- sd with the n-1 denominator.
struct GroupSummary {
  int n = 0;
  double mean = 0.0;
  double sd = 0.0;
};

double mean(std::span<const double> xs);
double sample_variance(std::span<const double> xs);
GroupSummary summarize(std::span<const double> xs);

Json to_json(const GroupSummary& g);
GroupSummary summary_from_json(const Json& j);

// Mean item score divided by the top of the Likert scale; lands in (0, 1].
double normalize(std::span<const int> items, int scale_max);

// Rows are participants, columns are items.
double cronbach_alpha(const std::vector<std::vector<double>>& item_matrix);

struct TTestResult {
  double t = 0.0;
  double df = 0.0;
  double p_two_tailed = 1.0;
  double cohen_d = 0.0;
};

// Student's t with pooled variance, df = n_a + n_b - 2. The sign follows
// mean_a - mean_b.
TTestResult t_test_independent(const GroupSummary& a, const GroupSummary& b);
TTestResult t_test_independent(std::span<const double> a, std::span<const double> b);

struct AnovaResult {
  double f = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p = 1.0;
  double ms_within = 0.0;
};

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups);
AnovaResult one_way_anova(std::span<const GroupSummary> groups);

struct TukeyPair {
  int i = 0;
  int j = 0;
  double mean_diff = 0.0;  // mean_i - mean_j
  double q = 0.0;
  double p = 1.0;
};

// All pairs i < j, in lexicographic order.
std::vector<TukeyPair> tukey_hsd(const std::vector<std::vector<double>>& groups);
std::vector<TukeyPair> tukey_hsd(std::span<const GroupSummary> groups);

// Summaries of the four cells of the 2x2 design. Cell "both" has information
// and identity migrated, "neither" has neither.
struct CellSummaries {
  GroupSummary both;         // INF+, ID+
  GroupSummary info_only;    // INF+, ID-
  GroupSummary identity_only;  // INF-, ID+
  GroupSummary neither;      // INF-, ID-
};

// Recovers the two off-diagonal cells from the diagonal cells and the
// INF+ and ID+ marginals by inverting the pooled mean and sum-of-squares
// decomposition. Throws kDegenerateVariance when the inputs are inconsistent.
CellSummaries reconstruct_cells(const GroupSummary& both, const GroupSummary& neither,
                                const GroupSummary& info_plus,
                                const GroupSummary& identity_plus);

}  // namespace migrant::stats

#endif  // MIGRANT_STATS_HPP

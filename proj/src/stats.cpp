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
#include <numeric>
#include <string>

#include "migrant/distributions.hpp"
#include "migrant/error.hpp"

namespace migrant::stats {
namespace {

void require_size(std::size_t n, std::size_t min, const char* what) {
  if (n < min) {
    throw Error(ErrorCode::kEmptyItems, std::string(what) + " needs at least " +
                                            std::to_string(min) + " values");
  }
}

double pooled_variance(const GroupSummary& a, const GroupSummary& b) {
  return ((a.n - 1) * a.sd * a.sd + (b.n - 1) * b.sd * b.sd) / (a.n + b.n - 2);
}

}  // namespace

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::kTrust: return "trust";
    case Measure::kTrustworthiness: return "trustworthiness";
    case Measure::kCompetence: return "competence";
    case Measure::kLikeability: return "likeability";
    case Measure::kSocialPresence: return "social_presence";
    case Measure::kSentiment: return "sentiment";
  }
  return "unknown";
}

double mean(std::span<const double> xs) {
  require_size(xs.size(), 1, "mean");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
  require_size(xs.size(), 2, "sample variance");
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return ss / static_cast<double>(xs.size() - 1);
}

GroupSummary summarize(std::span<const double> xs) {
  return {static_cast<int>(xs.size()), mean(xs), std::sqrt(sample_variance(xs))};
}

Json to_json(const GroupSummary& g) {
  Json j = Json::object();
  j["n"] = g.n;
  j["mean"] = g.mean;
  j["sd"] = g.sd;
  return j;
}

GroupSummary summary_from_json(const Json& j) {
  try {
    return {j.at("n").get<int>(), j.at("mean").get<double>(), j.at("sd").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("group summary: ") + e.what());
  }
}

double normalize(std::span<const int> items, int scale_max) {
  if (items.empty()) throw Error(ErrorCode::kEmptyItems, "no questionnaire items");
  if (scale_max < 2) {
    throw Error(ErrorCode::kOutOfScale, "scale_max " + std::to_string(scale_max));
  }
  double sum = 0.0;
  for (int item : items) {
    if (item < 1 || item > scale_max) {
      throw Error(ErrorCode::kOutOfScale, "item " + std::to_string(item) +
                                              " outside 1.." + std::to_string(scale_max));
    }
    sum += item;
  }
  return sum / static_cast<double>(items.size()) / scale_max;
}

double cronbach_alpha(const std::vector<std::vector<double>>& item_matrix) {
  require_size(item_matrix.size(), 2, "cronbach_alpha participants");
  const std::size_t k = item_matrix.front().size();
  require_size(k, 2, "cronbach_alpha items");
  for (const auto& row : item_matrix) {
    if (row.size() != k) throw Error(ErrorCode::kWrongArity, "ragged item matrix");
  }

  double item_var_sum = 0.0;
  std::vector<double> column(item_matrix.size());
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t r = 0; r < item_matrix.size(); ++r) column[r] = item_matrix[r][c];
    item_var_sum += sample_variance(column);
  }
  std::vector<double> totals;
  totals.reserve(item_matrix.size());
  for (const auto& row : item_matrix) {
    totals.push_back(std::accumulate(row.begin(), row.end(), 0.0));
  }
  const double total_var = sample_variance(totals);
  if (total_var <= 0.0) {
    throw Error(ErrorCode::kDegenerateVariance, "row sums have zero variance");
  }
  const double kd = static_cast<double>(k);
  return kd / (kd - 1.0) * (1.0 - item_var_sum / total_var);
}

TTestResult t_test_independent(const GroupSummary& a, const GroupSummary& b) {
  if (a.n < 2 || b.n < 2) {
    throw Error(ErrorCode::kEmptyItems, "t-test needs n >= 2 per group");
  }
  const double sp2 = pooled_variance(a, b);
  if (sp2 <= 0.0) {
    throw Error(ErrorCode::kDegenerateVariance, "both groups have zero variance");
  }
  const double sp = std::sqrt(sp2);
  TTestResult r;
  r.df = a.n + b.n - 2;
  r.t = (a.mean - b.mean) / (sp * std::sqrt(1.0 / a.n + 1.0 / b.n));
  r.p_two_tailed = dist::student_t_two_tailed(r.t, r.df);
  r.cohen_d = std::abs(a.mean - b.mean) / sp;
  return r;
}

TTestResult t_test_independent(std::span<const double> a, std::span<const double> b) {
  require_size(a.size(), 2, "t-test group a");
  require_size(b.size(), 2, "t-test group b");
  return t_test_independent(summarize(a), summarize(b));
}

AnovaResult one_way_anova(std::span<const GroupSummary> groups) {
  if (groups.size() < 2) throw Error(ErrorCode::kEmptyItems, "ANOVA needs k >= 2");
  double total_n = 0.0, grand_sum = 0.0;
  for (const auto& g : groups) {
    if (g.n < 2) throw Error(ErrorCode::kEmptyItems, "ANOVA needs n >= 2 per group");
    total_n += g.n;
    grand_sum += g.n * g.mean;
  }
  const double grand_mean = grand_sum / total_n;
  double ss_between = 0.0, ss_within = 0.0;
  for (const auto& g : groups) {
    ss_between += g.n * (g.mean - grand_mean) * (g.mean - grand_mean);
    ss_within += (g.n - 1) * g.sd * g.sd;
  }
  AnovaResult r;
  r.df_between = static_cast<int>(groups.size()) - 1;
  r.df_within = static_cast<int>(total_n) - static_cast<int>(groups.size());
  r.ms_within = ss_within / r.df_within;
  if (r.ms_within <= 0.0) {
    throw Error(ErrorCode::kDegenerateVariance, "zero within-group variance");
  }
  r.f = (ss_between / r.df_between) / r.ms_within;
  r.p = dist::f_upper_tail(r.f, r.df_between, r.df_within);
  return r;
}

AnovaResult one_way_anova(const std::vector<std::vector<double>>& groups) {
  std::vector<GroupSummary> summaries;
  summaries.reserve(groups.size());
  for (const auto& g : groups) {
    require_size(g.size(), 2, "ANOVA group");
    summaries.push_back(summarize(g));
  }
  return one_way_anova(summaries);
}

std::vector<TukeyPair> tukey_hsd(std::span<const GroupSummary> groups) {
  const AnovaResult anova = one_way_anova(groups);
  const int k = static_cast<int>(groups.size());
  std::vector<TukeyPair> out;
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      const double n_h = 2.0 / (1.0 / groups[i].n + 1.0 / groups[j].n);
      TukeyPair pair;
      pair.i = i;
      pair.j = j;
      pair.mean_diff = groups[i].mean - groups[j].mean;
      pair.q = std::abs(pair.mean_diff) / std::sqrt(anova.ms_within / n_h);
      pair.p = dist::studentized_range_upper(pair.q, k, anova.df_within);
      out.push_back(pair);
    }
  }
  return out;
}

std::vector<TukeyPair> tukey_hsd(const std::vector<std::vector<double>>& groups) {
  std::vector<GroupSummary> summaries;
  summaries.reserve(groups.size());
  for (const auto& g : groups) {
    require_size(g.size(), 2, "Tukey group");
    summaries.push_back(summarize(g));
  }
  return tukey_hsd(summaries);
}

namespace {

// Given a marginal made of a known cell and an unknown cell, solve for the
// unknown cell's mean and sd.
GroupSummary solve_partner_cell(const GroupSummary& marginal, const GroupSummary& known) {
  const int n = marginal.n - known.n;
  if (n < 2) {
    throw Error(ErrorCode::kDegenerateVariance, "marginal too small for its cell");
  }
  const double m = (marginal.n * marginal.mean - known.n * known.mean) / n;
  const double ss = (marginal.n - 1) * marginal.sd * marginal.sd -
                    (known.n - 1) * known.sd * known.sd -
                    known.n * (known.mean - marginal.mean) * (known.mean - marginal.mean) -
                    n * (m - marginal.mean) * (m - marginal.mean);
  if (ss <= 0.0) {
    throw Error(ErrorCode::kDegenerateVariance, "summaries imply negative variance");
  }
  return {n, m, std::sqrt(ss / (n - 1))};
}

}  // namespace

CellSummaries reconstruct_cells(const GroupSummary& both, const GroupSummary& neither,
                                const GroupSummary& info_plus,
                                const GroupSummary& identity_plus) {
  CellSummaries cells;
  cells.both = both;
  cells.neither = neither;
  cells.info_only = solve_partner_cell(info_plus, both);
  cells.identity_only = solve_partner_cell(identity_plus, both);
  return cells;
}

}  // namespace migrant::stats

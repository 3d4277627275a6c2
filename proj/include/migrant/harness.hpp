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

#ifndef MIGRANT_HARNESS_HPP
#define MIGRANT_HARNESS_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "migrant/orchestrator.hpp"
#include "migrant/sentiment.hpp"
#include "migrant/simulation.hpp"
#include "migrant/stats.hpp"

namespace migrant::harness {

// Questionnaire instruments: item count and Likert scale top.
struct Instrument {
  stats::Measure measure;
  int items;
  int scale_max;
};

inline constexpr std::array<Instrument, 4> kInstruments{{
    {stats::Measure::kTrust, 12, 7},
    {stats::Measure::kCompetence, 5, 5},
    {stats::Measure::kLikeability, 5, 5},
    {stats::Measure::kSocialPresence, 13, 7},
}};

// Synthetic response model for one condition. Questionnaire means and sds
// are on the normalized [0, 1] scale; give/predict are expected tokens.
struct ConditionModel {
  std::map<stats::Measure, stats::GroupSummary> questionnaire;
  double give = 2.0;
  double predict = 2.0;
  double positive_rate = 0.5;  // chance a written response is positive
};

struct ExperimentConfig {
  int participants = 72;
  std::uint64_t seed = 7;
  int parallelism = 4;
  double noise_rate = 0.0;
  int agent_give = 4;
  std::int64_t start_ms = 1577869200000;
  double item_noise = 0.8;  // per-item jitter in scale points
  std::map<sim::Gender, double> gender_mix{
      {sim::Gender::kFemale, 32}, {sim::Gender::kMale, 38}, {sim::Gender::kOther, 2}};
  std::map<std::string, ConditionModel> conditions;  // keyed by policy label

  static ExperimentConfig defaults();
  static ExperimentConfig from_json(const Json& doc);
  Json to_json() const;
  std::string hash() const;  // FNV-1a over the canonical document
};

// participant id -> condition
using Assignment = std::map<std::string, MigrationPolicy>;

// Gender-stratified round-robin: each gender is shuffled, the strata are
// concatenated and dealt to a seeded permutation of the four conditions.
// Throws kTooFew below four participants.
Assignment assign(const std::vector<sim::SimParticipant>& participants, std::uint64_t seed);

// Participants P01.. with genders apportioned from the mix by largest
// remainder.
std::vector<sim::SimParticipant> make_participants(const ExperimentConfig& config);

struct RunSummary {
  int participants = 0;
  int transcripts = 0;
  int games = 0;
  std::vector<std::string> failures;
};

// Simulates every participant into data_dir:
//   sessions/     event logs, headers and snapshots
//   transcripts/  <pid>.<embodiment>.json
//   games/        <pid>.<embodiment>.json
//   surveys/      <pid>.json
//   participants.json, config.json
// Existing artifacts in those places are replaced.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& data_dir);

struct FactorComparison {
  stats::GroupSummary migrated;
  stats::GroupSummary not_migrated;
  std::optional<stats::TTestResult> test;  // not_migrated vs migrated
  std::optional<std::string> error;
};

struct MeasureReport {
  stats::Measure measure = stats::Measure::kTrust;
  FactorComparison information;
  FactorComparison identity;
  std::array<stats::GroupSummary, 4> by_condition{};  // kAllPolicies order
  std::optional<stats::AnovaResult> anova;
  std::vector<stats::TukeyPair> tukey;
  std::optional<std::string> error;
};

struct ResultsReport {
  std::int64_t generated_at = 0;
  std::string config_hash;
  int participants = 0;
  std::vector<MeasureReport> measures;

  Json to_json() const;
  std::string to_markdown() const;
};

// Participant -> measure -> score.
using ScoreTable = std::map<std::string, std::map<stats::Measure, double>>;

// Factor t-tests, condition ANOVA and Tukey over already-computed scores.
ResultsReport analyze_scores(const ScoreTable& scores, const Assignment& assignment);

// Reads a data directory, computes every measure score and analyzes them.
// Throws kMissingData naming each participant with absent artifacts.
ResultsReport analyze(const std::filesystem::path& data_dir,
                      stats::SentimentProvider* provider = nullptr);

// Writes report/report.md and report/report.json under data_dir.
void write_report(const ResultsReport& report, const std::filesystem::path& data_dir);

// Computations over group summaries (n, mean, sd):
//   {"t_tests": [{"name", "a": {n, mean, sd}, "b": {...}}],
//    "anova":   [{"name", "labels": [...], "groups": [{...}, ...]}],
//    "cells_from_marginals": [{"name", "both", "neither", "info_plus", "identity_plus"}]}
// The last kind rebuilds the 2x2 cells and runs Tukey across them.
Json analyze_summary_stats(const Json& doc);
std::string summary_stats_markdown(const Json& results);

}  // namespace migrant::harness

#endif  // MIGRANT_HARNESS_HPP

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

#include "migrant/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "migrant/dialogue.hpp"
#include "migrant/error.hpp"
#include "migrant/nlu.hpp"
#include "migrant/rng.hpp"
#include "migrant/service.hpp"
#include "migrant/store.hpp"
#include "migrant/trustgame.hpp"

namespace migrant::harness {
namespace {

namespace fs = std::filesystem;
using stats::GroupSummary;
using stats::Measure;

constexpr std::int64_t kParticipantSlotMs = 30 * 60 * 1000;

constexpr const char* kWrittenPrompts[] = {
    "How did you feel about trusting the agent?",
    "How competent was the agent?",
    "How likeable was the agent?",
    "How engaging was the conversation?",
};

// Written answers, one positive and one negative pool per prompt.
constexpr const char* kPositiveText[][2] = {
    {"I trusted it, it felt reliable.", "It remembered me, so I felt comfortable."},
    {"It was smart and helpful.", "Very competent, everything was seamless."},
    {"It was friendly and warm.", "I liked it, a pleasant agent."},
    {"The conversation was engaging and natural.", "Great conversation, I enjoyed it."},
};
constexpr const char* kNegativeText[][2] = {
    {"It felt a bit creepy.", "I did not trust it, it was strange."},
    {"It was confusing and slow.", "It forgot things and felt unhelpful."},
    {"It was cold and awkward.", "Kind of annoying and robotic."},
    {"The conversation was repetitive and boring.", "It felt fake and frustrating."},
};

std::optional<Measure> parse_measure(std::string_view name) {
  for (Measure m : stats::kAllMeasures) {
    if (stats::to_string(m) == name) return m;
  }
  return std::nullopt;
}

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::kConfigError, "experiment config: " + what);
}

double number_in(const Json& obj, const char* key, double lo, double hi, double fallback) {
  if (!obj.contains(key)) return fallback;
  const Json& v = obj.at(key);
  if (!v.is_number()) config_error(std::string(key) + " must be a number");
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi)) config_error(std::string(key) + " out of range");
  return x;
}

void reject_unknown(const Json& obj, std::initializer_list<std::string_view> allowed,
                    const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_error("unknown key '" + key + "' in " + where);
    }
  }
}

ConditionModel condition(std::initializer_list<double> q, double give, double predict,
                         double positive_rate) {
  ConditionModel m;
  auto it = q.begin();
  for (const auto& inst : kInstruments) m.questionnaire[inst.measure] = {0, *it++, 0.10};
  m.give = give;
  m.predict = predict;
  m.positive_rate = positive_rate;
  return m;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int binomial4(Rng& rng, double expected) {
  const double p = std::clamp(expected / trustgame::kTokens, 0.0, 1.0);
  int k = 0;
  for (int i = 0; i < trustgame::kTokens; ++i) k += rng.bernoulli(p) ? 1 : 0;
  return k;
}

Json questionnaire_items(const ConditionModel& model, double item_noise, Rng& rng,
                         const std::map<Measure, double>& latent) {
  Json out = Json::object();
  for (const auto& inst : kInstruments) {
    const GroupSummary& g = model.questionnaire.at(inst.measure);
    const double centre = inst.scale_max * (g.mean + g.sd * latent.at(inst.measure));
    Json items = Json::array();
    for (int i = 0; i < inst.items; ++i) {
      const double raw = std::round(centre + item_noise * rng.normal());
      items.push_back(static_cast<int>(std::clamp(raw, 1.0, double(inst.scale_max))));
    }
    out[std::string(stats::to_string(inst.measure))] = std::move(items);
  }
  return out;
}

Json survey_document(const sim::SimParticipant& p, const MigrationPolicy& policy,
                     const ConditionModel& model, double item_noise,
                     const std::vector<std::string>& journey) {
  Rng rng(Rng::mix(p.seed, 3));
  std::map<Measure, double> latent;
  for (const auto& inst : kInstruments) latent[inst.measure] = rng.normal();

  Json doc = Json::object();
  doc["participant_id"] = p.participant_id;
  doc["condition"] = policy.label();
  doc["synthetic"] = true;
  Json questionnaires = Json::object();
  for (const auto& emb : journey) {
    questionnaires[emb] = questionnaire_items(model, item_noise, rng, latent);
  }
  doc["questionnaires"] = std::move(questionnaires);
  Json written = Json::array();
  for (std::size_t i = 0; i < std::size(kWrittenPrompts); ++i) {
    const bool positive = rng.bernoulli(model.positive_rate);
    const auto pick = rng.below(2);
    Json w = Json::object();
    w["prompt"] = kWrittenPrompts[i];
    w["text"] = positive ? kPositiveText[i][pick] : kNegativeText[i][pick];
    written.push_back(std::move(w));
  }
  doc["written"] = std::move(written);
  return doc;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
}

std::optional<Json> read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIoError, path.string() + ": " + e.what());
  }
}

std::string doc_line(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace

// ---------------------------------------------------------------------------
// Config

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  // Synthetic response model; order follows kInstruments.
  c.conditions["(INF+,ID+)"] = condition({.69, .76, .81, .63}, 2.4, 2.1, .69);
  c.conditions["(INF+,ID-)"] = condition({.645, .68, .745, .535}, 1.8, 1.65, .52);
  c.conditions["(INF-,ID+)"] = condition({.64, .68, .73, .595}, 1.5, 1.4, .56);
  c.conditions["(INF-,ID-)"] = condition({.58, .61, .69, .525}, 1.3, 1.1, .50);
  return c;
}

ExperimentConfig ExperimentConfig::from_json(const Json& doc) {
  if (!doc.is_object()) config_error("document must be an object");
  reject_unknown(doc,
                 {"participants", "seed", "parallelism", "noise_rate", "agent_give", "start_ms",
                  "item_noise", "gender_mix", "conditions"},
                 "config");
  ExperimentConfig c = defaults();
  if (doc.contains("participants")) {
    if (!doc["participants"].is_number_integer()) config_error("participants must be an integer");
    c.participants = doc["participants"].get<int>();
    if (c.participants < 0) config_error("participants must be non-negative");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) config_error("seed must be a non-negative integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  c.parallelism = static_cast<int>(number_in(doc, "parallelism", 1, 256, c.parallelism));
  c.noise_rate = number_in(doc, "noise_rate", 0, 1, c.noise_rate);
  c.agent_give = static_cast<int>(number_in(doc, "agent_give", 0, 4, c.agent_give));
  if (doc.contains("start_ms")) {
    if (!doc["start_ms"].is_number_integer()) config_error("start_ms must be an integer");
    c.start_ms = doc["start_ms"].get<std::int64_t>();
  }
  c.item_noise = number_in(doc, "item_noise", 0, 10, c.item_noise);

  if (doc.contains("gender_mix")) {
    const Json& mix = doc["gender_mix"];
    if (!mix.is_object() || mix.empty()) config_error("gender_mix must be a non-empty object");
    c.gender_mix.clear();
    for (const auto& [name, weight] : mix.items()) {
      sim::Gender g;
      try {
        g = sim::parse_gender(name);
      } catch (const Error&) {
        config_error("unknown gender '" + name + "'");
      }
      if (!weight.is_number() || weight.get<double>() < 0) {
        config_error("gender weight for '" + name + "' must be non-negative");
      }
      c.gender_mix[g] = weight.get<double>();
    }
  }

  if (doc.contains("conditions")) {
    const Json& conds = doc["conditions"];
    if (!conds.is_object()) config_error("conditions must be an object");
    for (const auto& [label, body] : conds.items()) {
      MigrationPolicy policy;
      try {
        policy = MigrationPolicy::from_label(label);
      } catch (const Error&) {
        config_error("unknown condition '" + label + "'");
      }
      if (!body.is_object()) config_error(label + " must be an object");
      reject_unknown(body, {"questionnaire", "give", "predict", "positive_rate"}, label);
      ConditionModel& m = c.conditions[policy.label()];
      m.give = number_in(body, "give", 0, 4, m.give);
      m.predict = number_in(body, "predict", 0, 4, m.predict);
      m.positive_rate = number_in(body, "positive_rate", 0, 1, m.positive_rate);
      if (body.contains("questionnaire")) {
        const Json& q = body["questionnaire"];
        if (!q.is_object()) config_error(label + ".questionnaire must be an object");
        for (const auto& [name, g] : q.items()) {
          const auto measure = parse_measure(name);
          const bool surveyed =
              measure && std::any_of(kInstruments.begin(), kInstruments.end(),
                                     [&](const Instrument& i) { return i.measure == *measure; });
          if (!surveyed) config_error("no questionnaire for measure '" + name + "'");
          if (!g.is_object()) config_error(label + "." + name + " must be an object");
          reject_unknown(g, {"mean", "sd"}, label + "." + name);
          GroupSummary& s = m.questionnaire[*measure];
          s.mean = number_in(g, "mean", 0, 1, s.mean);
          s.sd = number_in(g, "sd", 0, 1, s.sd);
        }
      }
    }
  }
  return c;
}

Json ExperimentConfig::to_json() const {
  Json j = Json::object();
  j["participants"] = participants;
  j["seed"] = seed;
  j["parallelism"] = parallelism;
  j["noise_rate"] = noise_rate;
  j["agent_give"] = agent_give;
  j["start_ms"] = start_ms;
  j["item_noise"] = item_noise;
  Json mix = Json::object();
  for (const auto& [g, w] : gender_mix) mix[std::string(sim::to_string(g))] = w;
  j["gender_mix"] = std::move(mix);
  Json conds = Json::object();
  for (const auto& policy : kAllPolicies) {
    const auto it = conditions.find(policy.label());
    if (it == conditions.end()) continue;
    const ConditionModel& m = it->second;
    Json q = Json::object();
    for (const auto& inst : kInstruments) {
      const auto& g = m.questionnaire.at(inst.measure);
      q[std::string(stats::to_string(inst.measure))] = Json{{"mean", g.mean}, {"sd", g.sd}};
    }
    Json body = Json::object();
    body["questionnaire"] = std::move(q);
    body["give"] = m.give;
    body["predict"] = m.predict;
    body["positive_rate"] = m.positive_rate;
    conds[policy.label()] = std::move(body);
  }
  j["conditions"] = std::move(conds);
  return j;
}

namespace {

// The config without execution knobs that do not change the data.
Json data_config(const ExperimentConfig& c) {
  Json j = c.to_json();
  j.erase("parallelism");
  return j;
}

}  // namespace

std::string ExperimentConfig::hash() const {
  const Json j = data_config(*this);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : j.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return hex64(h);
}

// ---------------------------------------------------------------------------
// Participants and assignment

std::vector<sim::SimParticipant> make_participants(const ExperimentConfig& config) {
  const int n = config.participants;
  double total = 0.0;
  for (const auto& [_, w] : config.gender_mix) total += w;
  if (n > 0 && total <= 0.0) config_error("gender_mix weights sum to zero");

  // Largest remainder apportionment.
  std::vector<std::pair<sim::Gender, int>> counts;
  std::vector<std::pair<double, std::size_t>> remainders;
  int assigned = 0;
  for (const auto& [g, w] : config.gender_mix) {
    const double share = n > 0 ? n * w / total : 0.0;
    const int whole = static_cast<int>(std::floor(share));
    counts.emplace_back(g, whole);
    remainders.emplace_back(share - whole, counts.size() - 1);
    assigned += whole;
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
    ++counts[remainders[i % remainders.size()].second].second;
  }

  const int width = std::max(2, static_cast<int>(std::to_string(n).size()));
  std::vector<sim::SimParticipant> out;
  out.reserve(static_cast<std::size_t>(n));
  int index = 0;
  for (const auto& [g, count] : counts) {
    for (int k = 0; k < count; ++k, ++index) {
      std::string id = std::to_string(index + 1);
      id = "P" + std::string(static_cast<std::size_t>(width) - id.size(), '0') + id;
      out.push_back(sim::make_participant(std::move(id), g,
                                          Rng::mix(config.seed, static_cast<std::uint64_t>(index))));
    }
  }
  return out;
}

Assignment assign(const std::vector<sim::SimParticipant>& participants, std::uint64_t seed) {
  if (participants.size() < 4) {
    throw Error(ErrorCode::kTooFew, "need at least 4 participants, got " +
                                        std::to_string(participants.size()));
  }
  std::map<sim::Gender, std::vector<std::string>> strata;
  for (const auto& p : participants) strata[p.gender].push_back(p.participant_id);

  std::vector<MigrationPolicy> order(std::begin(kAllPolicies), std::end(kAllPolicies));
  Rng(Rng::mix(seed, 1000)).shuffle(order);

  Assignment out;
  std::size_t slot = 0;
  for (auto& [gender, ids] : strata) {
    std::sort(ids.begin(), ids.end());
    Rng(Rng::mix(seed, static_cast<std::uint64_t>(gender))).shuffle(ids);
    for (const auto& id : ids) out[id] = order[slot++ % order.size()];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Batch simulation

RunSummary run_experiment(const ExperimentConfig& config, const fs::path& data_dir) {
  for (const auto& policy : kAllPolicies) {
    if (!config.conditions.contains(policy.label())) {
      config_error("missing condition " + policy.label());
    }
  }
  const auto participants = make_participants(config);
  const Assignment assignment = assign(participants, config.seed);

  for (const char* dir : {"sessions", "transcripts", "games", "surveys", "report"}) {
    fs::remove_all(data_dir / dir);
  }
  fs::create_directories(data_dir);

  auto store = std::make_shared<FileStore>(data_dir);
  Orchestrator orchestrator(store, std::make_shared<SystemClock>());
  const Deployment deployment = Deployment::bundled();
  deployment.install(orchestrator);
  ServiceConfig service_config;
  service_config.agent_give = config.agent_give;
  service_config.default_identity = deployment.home_identity;
  AgentService service(orchestrator, nlu::Grammar::bundled(), dialogue::ScriptLibrary::bundled(),
                       service_config);

  RunSummary summary;
  std::mutex mu;
  std::atomic<std::size_t> next{0};

  auto simulate = [&](std::size_t index) {
    const auto& p = participants[index];
    const MigrationPolicy policy = assignment.at(p.participant_id);
    const ConditionModel& model = config.conditions.at(policy.label());

    sim::JourneyOptions options;
    options.noise_rate = config.noise_rate;
    options.start_ms = config.start_ms + static_cast<std::int64_t>(index) * kParticipantSlotMs;
    sim::Journey journey = sim::run_full_journey(service, deployment, p, policy, options);
    if (journey.error) throw Error(ErrorCode::kTargetUnavailable, *journey.error);

    for (const auto& seg : journey.segments) {
      Json doc = Json::object();
      doc["participant_id"] = p.participant_id;
      doc["condition"] = policy.label();
      const Json body = sim::to_json(seg);
      for (const auto& [k, v] : body.items()) doc[k] = v;
      store->put("transcripts", p.participant_id + "." + seg.embodiment_id + ".json",
                 doc_line(doc));
    }

    // Survey, then one game with each agent.
    store->put("surveys", p.participant_id + ".json",
               doc_line(survey_document(p, policy, model, config.item_noise, deployment.journey)));
    Rng game_rng(Rng::mix(p.seed, 4));
    for (const auto& client : journey.clients) {
      const int give = binomial4(game_rng, model.give);
      const int predict = binomial4(game_rng, model.predict);
      const auto outcome = client->play_game(give, predict);
      Json doc = Json::object();
      doc["participant_id"] = p.participant_id;
      doc["embodiment_id"] = client->descriptor().embodiment_id;
      doc["condition"] = policy.label();
      const Json body = trustgame::to_json(outcome);
      for (const auto& [k, v] : body.items()) doc[k] = v;
      store->put("games", p.participant_id + "." + client->descriptor().embodiment_id + ".json",
                 doc_line(doc));
    }
    orchestrator.persist_snapshot(p.participant_id);

    std::lock_guard lock(mu);
    summary.transcripts += static_cast<int>(journey.segments.size());
    summary.games += static_cast<int>(journey.clients.size());
  };

  auto worker = [&] {
    for (std::size_t i = next++; i < participants.size(); i = next++) {
      try {
        simulate(i);
      } catch (const std::exception& e) {
        spdlog::error("participant {} failed: {}", participants[i].participant_id, e.what());
        std::lock_guard lock(mu);
        summary.failures.push_back(participants[i].participant_id);
      }
    }
  };
  const int threads =
      std::clamp(config.parallelism, 1, std::max(1, static_cast<int>(participants.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::sort(summary.failures.begin(), summary.failures.end());
  summary.participants = static_cast<int>(participants.size());

  Json roster = Json::object();
  roster["seed"] = config.seed;
  roster["journey"] = deployment.journey;
  Json rows = Json::array();
  for (const auto& p : participants) {
    Json row = Json::object();
    row["participant_id"] = p.participant_id;
    row["gender"] = sim::to_string(p.gender);
    row["condition"] = assignment.at(p.participant_id).label();
    row["persona"] = p.persona;
    rows.push_back(std::move(row));
  }
  roster["participants"] = std::move(rows);
  roster["failures"] = summary.failures;
  write_text(data_dir / "participants.json", doc_line(roster));

  Json cfg = Json::object();
  cfg["hash"] = config.hash();
  cfg["config"] = data_config(config);
  write_text(data_dir / "config.json", doc_line(cfg));
  return summary;
}

// ---------------------------------------------------------------------------
// Analysis

namespace {

FactorComparison compare(const std::vector<double>& not_migrated,
                         const std::vector<double>& migrated) {
  FactorComparison c;
  c.not_migrated = stats::summarize(not_migrated);
  c.migrated = stats::summarize(migrated);
  try {
    c.test = stats::t_test_independent(not_migrated, migrated);
  } catch (const Error& e) {
    c.error = e.what();
  }
  return c;
}

Json to_json(const stats::TTestResult& r) {
  return Json{{"t", r.t}, {"df", r.df}, {"p", r.p_two_tailed}, {"cohen_d", r.cohen_d}};
}

Json to_json(const stats::AnovaResult& r) {
  return Json{{"f", r.f},
              {"df_between", r.df_between},
              {"df_within", r.df_within},
              {"p", r.p},
              {"ms_within", r.ms_within}};
}

Json tukey_json(const std::vector<stats::TukeyPair>& pairs,
                const std::vector<std::string>& labels) {
  Json out = Json::array();
  for (const auto& t : pairs) {
    out.push_back(Json{{"a", labels[t.i]},
                       {"b", labels[t.j]},
                       {"mean_diff", t.mean_diff},
                       {"q", t.q},
                       {"p", t.p}});
  }
  return out;
}

Json factor_json(const FactorComparison& c, const char* factor) {
  Json j = Json::object();
  const std::string f = factor;
  j["test"] = "independent t-test (pooled)";
  j["a"] = f + "- (not migrated)";
  j["b"] = f + "+ (migrated)";
  j["a_summary"] = stats::to_json(c.not_migrated);
  j["b_summary"] = stats::to_json(c.migrated);
  if (c.test) j["result"] = to_json(*c.test);
  if (c.error) j["error"] = *c.error;
  return j;
}

std::vector<std::string> condition_labels() {
  std::vector<std::string> out;
  for (const auto& p : kAllPolicies) out.push_back(p.label());
  return out;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string msd(const GroupSummary& g) {
  return fmt("%.3f", g.mean) + " ± " + fmt("%.3f", g.sd) + " (n=" + std::to_string(g.n) + ")";
}

std::string pval(double p) { return p < 0.0001 ? "<.0001" : fmt("%.4f", p); }

}  // namespace

ResultsReport analyze_scores(const ScoreTable& scores, const Assignment& assignment) {
  ResultsReport report;
  report.participants = static_cast<int>(scores.size());
  for (Measure m : stats::kAllMeasures) {
    std::vector<double> info[2], ident[2];
    std::vector<std::vector<double>> cells(4);
    bool present = false;
    for (const auto& [pid, row] : scores) {
      const auto it = row.find(m);
      if (it == row.end()) continue;
      present = true;
      const MigrationPolicy& policy = assignment.at(pid);
      info[policy.migrate_information ? 1 : 0].push_back(it->second);
      ident[policy.migrate_identity ? 1 : 0].push_back(it->second);
      const auto pos = std::find(std::begin(kAllPolicies), std::end(kAllPolicies), policy);
      cells[static_cast<std::size_t>(pos - std::begin(kAllPolicies))].push_back(it->second);
    }
    if (!present) continue;

    MeasureReport r;
    r.measure = m;
    r.information = compare(info[0], info[1]);
    r.identity = compare(ident[0], ident[1]);
    for (std::size_t c = 0; c < 4; ++c) r.by_condition[c] = stats::summarize(cells[c]);
    try {
      r.anova = stats::one_way_anova(cells);
      r.tukey = stats::tukey_hsd(cells);
    } catch (const Error& e) {
      r.error = e.what();
    }
    report.measures.push_back(std::move(r));
  }
  return report;
}

Json ResultsReport::to_json() const {
  const auto labels = condition_labels();
  Json j = Json::object();
  j["generated_at"] = generated_at;
  j["config_hash"] = config_hash;
  j["participants"] = participants;
  Json measures_json = Json::array();
  for (const auto& r : measures) {
    Json mj = Json::object();
    mj["measure"] = stats::to_string(r.measure);
    mj["information"] = factor_json(r.information, "INF");
    mj["identity"] = factor_json(r.identity, "ID");
    Json conds = Json::object();
    for (std::size_t c = 0; c < 4; ++c) conds[labels[c]] = stats::to_json(r.by_condition[c]);
    mj["by_condition"] = std::move(conds);
    Json across = Json::object();
    across["test"] = "one-way ANOVA";
    across["groups"] = labels;
    if (r.anova) across["result"] = harness::to_json(*r.anova);
    across["tukey"] = tukey_json(r.tukey, labels);
    if (r.error) across["error"] = *r.error;
    mj["across_conditions"] = std::move(across);
    measures_json.push_back(std::move(mj));
  }
  j["measures"] = std::move(measures_json);
  return j;
}

std::string ResultsReport::to_markdown() const {
  const auto labels = condition_labels();
  std::ostringstream out;
  out << "# Results\n\n";
  out << "- participants: " << participants << "\n";
  out << "- generated_at: " << generated_at << "\n";
  out << "- config hash: " << (config_hash.empty() ? "n/a" : config_hash) << "\n";
  out << "- questionnaire and written responses are synthetic\n";

  auto factor_row = [&](const char* name, const FactorComparison& c) {
    out << "| " << name << " | " << msd(c.not_migrated) << " | " << msd(c.migrated) << " | ";
    if (c.test) {
      out << "t(" << fmt("%.0f", c.test->df) << ") = " << fmt("%.3f", c.test->t) << " | "
          << pval(c.test->p_two_tailed) << " | " << fmt("%.3f", c.test->cohen_d) << " |\n";
    } else {
      out << (c.error ? *c.error : "n/a") << " | | |\n";
    }
  };

  for (const auto& r : measures) {
    out << "\n## " << stats::to_string(r.measure) << "\n\n";
    out << "| Factor | Not migrated | Migrated | t | p | d |\n";
    out << "|---|---|---|---|---|---|\n";
    factor_row("Information", r.information);
    factor_row("Identity", r.identity);

    out << "\n| Condition | M ± SD |\n|---|---|\n";
    for (std::size_t c = 0; c < 4; ++c) out << "| " << labels[c] << " | " << msd(r.by_condition[c]) << " |\n";

    out << "\n";
    if (r.anova) {
      out << "One-way ANOVA across conditions: F(" << r.anova->df_between << ", "
          << r.anova->df_within << ") = " << fmt("%.3f", r.anova->f)
          << ", p = " << pval(r.anova->p) << "\n\n";
      out << "| Tukey HSD | Mean diff | q | p |\n|---|---|---|---|\n";
      for (const auto& t : r.tukey) {
        out << "| " << labels[t.i] << " vs " << labels[t.j] << " | " << fmt("%.3f", t.mean_diff)
            << " | " << fmt("%.3f", t.q) << " | " << pval(t.p) << " |\n";
      }
    } else {
      out << "One-way ANOVA across conditions: " << r.error.value_or("n/a") << "\n";
    }
  }
  return out.str();
}

ResultsReport analyze(const fs::path& data_dir, stats::SentimentProvider* provider) {
  const auto roster = read_json(data_dir / "participants.json");
  if (!roster) throw Error(ErrorCode::kIoError, "no participants.json in " + data_dir.string());
  const auto cfg = read_json(data_dir / "config.json");
  if (!cfg) throw Error(ErrorCode::kIoError, "no config.json in " + data_dir.string());

  stats::LexiconSentiment lexicon;
  stats::SentimentProvider& scorer = provider ? *provider : lexicon;
  const auto journey = roster->at("journey").get<std::vector<std::string>>();

  Assignment assignment;
  ScoreTable scores;
  std::vector<std::string> missing;
  for (const auto& row : roster->at("participants")) {
    const auto pid = row.at("participant_id").get<std::string>();
    assignment[pid] = MigrationPolicy::from_label(row.at("condition").get<std::string>());

    std::vector<std::string> absent;
    const auto survey = read_json(data_dir / "surveys" / (pid + ".json"));
    if (!survey) absent.push_back("survey");
    std::vector<trustgame::GameOutcome> games;
    for (const auto& emb : journey) {
      if (!fs::exists(data_dir / "transcripts" / (pid + "." + emb + ".json"))) {
        absent.push_back("transcript " + emb);
      }
      const auto game = read_json(data_dir / "games" / (pid + "." + emb + ".json"));
      if (game) {
        games.push_back(trustgame::outcome_from_json(*game));
      } else {
        absent.push_back("game " + emb);
      }
    }
    if (!absent.empty()) {
      std::string line = pid + " (";
      for (std::size_t i = 0; i < absent.size(); ++i) line += (i ? ", " : "") + absent[i];
      missing.push_back(line + ")");
      continue;
    }

    auto& out = scores[pid];
    for (const auto& inst : kInstruments) {
      const std::string key(stats::to_string(inst.measure));
      double sum = 0.0;
      for (const auto& emb : journey) {
        const auto items = survey->at("questionnaires").at(emb).at(key).get<std::vector<int>>();
        sum += stats::normalize(items, inst.scale_max);
      }
      out[inst.measure] = sum / static_cast<double>(journey.size());
    }
    out[Measure::kTrustworthiness] = trustgame::aggregate_tau(games);
    std::vector<std::string> texts;
    for (const auto& w : survey->at("written")) texts.push_back(w.at("text").get<std::string>());
    out[Measure::kSentiment] = stats::sentiment(texts, scorer);
  }
  if (!missing.empty()) {
    std::string msg = "missing artifacts for";
    for (const auto& m : missing) msg += " " + m;
    throw Error(ErrorCode::kMissingData, msg);
  }

  ResultsReport report = analyze_scores(scores, assignment);
  report.generated_at = cfg->at("config").at("start_ms").get<std::int64_t>();
  report.config_hash = cfg->at("hash").get<std::string>();
  return report;
}

void write_report(const ResultsReport& report, const fs::path& data_dir) {
  write_text(data_dir / "report" / "report.md", report.to_markdown());
  write_text(data_dir / "report" / "report.json", doc_line(report.to_json()));
}

// ---------------------------------------------------------------------------
// Summary statistics

namespace {

GroupSummary summary_at(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(ErrorCode::kSchemaViolation, where + ": missing " + key);
  try {
    return stats::summary_from_json(j.at(key));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, where + "." + key + ": " + e.what());
  }
}

std::string name_of(const Json& j, const char* kind, std::size_t index) {
  if (j.contains("name") && j["name"].is_string()) return j["name"].get<std::string>();
  return std::string(kind) + "[" + std::to_string(index) + "]";
}

Json across_groups(const std::vector<GroupSummary>& groups,
                   const std::vector<std::string>& labels) {
  Json j = Json::object();
  j["groups"] = labels;
  j["anova"] = to_json(stats::one_way_anova(groups));
  j["tukey"] = tukey_json(stats::tukey_hsd(groups), labels);
  return j;
}

}  // namespace

Json analyze_summary_stats(const Json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kSchemaViolation, "summary stats must be an object");
  Json out = Json::object();

  Json tests = Json::array();
  for (std::size_t i = 0; doc.contains("t_tests") && i < doc["t_tests"].size(); ++i) {
    const Json& t = doc["t_tests"][i];
    const std::string name = name_of(t, "t_tests", i);
    const GroupSummary a = summary_at(t, "a", name);
    const GroupSummary b = summary_at(t, "b", name);
    Json r = Json::object();
    r["name"] = name;
    r["a"] = stats::to_json(a);
    r["b"] = stats::to_json(b);
    r["result"] = to_json(stats::t_test_independent(a, b));
    tests.push_back(std::move(r));
  }
  out["t_tests"] = std::move(tests);

  Json anovas = Json::array();
  for (std::size_t i = 0; doc.contains("anova") && i < doc["anova"].size(); ++i) {
    const Json& a = doc["anova"][i];
    const std::string name = name_of(a, "anova", i);
    if (!a.contains("groups") || !a["groups"].is_array()) {
      throw Error(ErrorCode::kSchemaViolation, name + ": missing groups");
    }
    std::vector<GroupSummary> groups;
    std::vector<std::string> labels;
    for (std::size_t g = 0; g < a["groups"].size(); ++g) {
      groups.push_back(stats::summary_from_json(a["groups"][g]));
      labels.push_back(a.contains("labels") && g < a["labels"].size()
                           ? a["labels"][g].get<std::string>()
                           : "group " + std::to_string(g + 1));
    }
    Json r = Json::object();
    r["name"] = name;
    r.update(across_groups(groups, labels));
    anovas.push_back(std::move(r));
  }
  out["anova"] = std::move(anovas);

  Json rebuilt = Json::array();
  for (std::size_t i = 0; doc.contains("cells_from_marginals") && i < doc["cells_from_marginals"].size();
       ++i) {
    const Json& c = doc["cells_from_marginals"][i];
    const std::string name = name_of(c, "cells_from_marginals", i);
    const auto cells = stats::reconstruct_cells(
        summary_at(c, "both", name), summary_at(c, "neither", name),
        summary_at(c, "info_plus", name), summary_at(c, "identity_plus", name));
    const std::vector<GroupSummary> groups{cells.both, cells.info_only, cells.identity_only,
                                           cells.neither};
    const auto labels = condition_labels();
    Json cell_json = Json::object();
    for (std::size_t g = 0; g < groups.size(); ++g) cell_json[labels[g]] = stats::to_json(groups[g]);
    Json r = Json::object();
    r["name"] = name;
    r["cells"] = std::move(cell_json);
    const Json across = across_groups(groups, labels);
    for (const auto& [k, v] : across.items()) r[k] = v;
    rebuilt.push_back(std::move(r));
  }
  out["cells_from_marginals"] = std::move(rebuilt);
  return out;
}

std::string summary_stats_markdown(const Json& results) {
  std::ostringstream out;
  out << "# Summary statistics\n";
  if (!results["t_tests"].empty()) {
    out << "\n| Test | a | b | t | df | p | d |\n|---|---|---|---|---|---|---|\n";
    for (const auto& t : results["t_tests"]) {
      const auto a = stats::summary_from_json(t["a"]);
      const auto b = stats::summary_from_json(t["b"]);
      const Json& r = t["result"];
      out << "| " << t["name"].get<std::string>() << " | " << msd(a) << " | " << msd(b) << " | "
          << fmt("%.3f", r["t"].get<double>()) << " | " << fmt("%.0f", r["df"].get<double>())
          << " | " << pval(r["p"].get<double>()) << " | " << fmt("%.3f", r["cohen_d"].get<double>())
          << " |\n";
    }
  }
  auto across = [&](const Json& r) {
    const Json& a = r["anova"];
    out << "\nF(" << a["df_between"].get<int>() << ", " << a["df_within"].get<int>()
        << ") = " << fmt("%.3f", a["f"].get<double>()) << ", p = " << pval(a["p"].get<double>())
        << "\n\n| Tukey HSD | Mean diff | q | p |\n|---|---|---|---|\n";
    for (const auto& t : r["tukey"]) {
      out << "| " << t["a"].get<std::string>() << " vs " << t["b"].get<std::string>() << " | "
          << fmt("%.3f", t["mean_diff"].get<double>()) << " | " << fmt("%.3f", t["q"].get<double>())
          << " | " << pval(t["p"].get<double>()) << " |\n";
    }
  };
  for (const auto& r : results["anova"]) {
    out << "\n## " << r["name"].get<std::string>() << "\n";
    across(r);
  }
  for (const auto& r : results["cells_from_marginals"]) {
    out << "\n## " << r["name"].get<std::string>() << " (cells rebuilt from marginals)\n\n";
    out << "| Condition | M ± SD |\n|---|---|\n";
    for (const auto& [label, g] : r["cells"].items()) {
      out << "| " << label << " | " << msd(stats::summary_from_json(g)) << " |\n";
    }
    across(r);
  }
  return out.str();
}

}  // namespace migrant::harness

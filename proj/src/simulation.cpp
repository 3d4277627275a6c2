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

#include "migrant/simulation.hpp"

#include <array>

#include "migrant/error.hpp"

namespace migrant::sim {
namespace {

constexpr std::array<const char*, 25> kNames = {
    "Alice", "Bruno", "Chen",  "Diana", "Emeka", "Farah", "Goran", "Hana",  "Ivan",
    "Jasmine", "Kenji", "Leila", "Mateo", "Nadia", "Omar", "Priya", "Quinn", "Rosa",
    "Sven",  "Tara",  "Umar",  "Vera",  "Wei",   "Yara",  "Zane"};
constexpr std::array<const char*, 8> kFeelings = {"nervous", "anxious",  "excited", "confident",
                                                  "stressed", "calm", "worried", "optimistic"};
constexpr std::array<const char*, 3> kDrinks = {"coffee", "water", "tea"};
constexpr std::array<const char*, 3> kVisitReasons = {"job interview", "final interview",
                                                      "second interview"};
constexpr std::array<const char*, 3> kAcknowledgements = {"Okay, thank you.", "Thanks!",
                                                          "Sounds good."};

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& options) {
  return options[rng.below(N)];
}

ErrorCode code_from_name(std::string_view name) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::kIoError); ++c) {
    if (to_string(static_cast<ErrorCode>(c)) == name) return static_cast<ErrorCode>(c);
  }
  return ErrorCode::kSchemaViolation;
}

[[noreturn]] void raise_from(const Envelope& env) {
  throw Error(code_from_name(env.payload.value("code", std::string())),
              env.payload.value("message", std::string("error from service")));
}

ActivationDecision decision_from_json(const Json& j) {
  ActivationDecision d;
  d.embodiment_id = j.at("embodiment_id").get<std::string>();
  d.presentation.identity = identity_from_json(j.at("presentation"));
  d.presentation.home_identity = j.at("presentation").at("home_identity").get<bool>();
  for (const auto& s : j.at("context")) {
    ContextSlot slot = slot_from_json(s);
    d.context[slot.slot_name] = slot;
  }
  if (j.contains("migration_id")) {
    MigrationRecord r;
    r.migration_id = j["migration_id"].get<std::string>();
    r.to = d.embodiment_id;
    d.migration = r;
  }
  return d;
}

}  // namespace

std::string_view to_string(Gender g) {
  switch (g) {
    case Gender::kFemale: return "female";
    case Gender::kMale: return "male";
    case Gender::kOther: return "other";
  }
  return "other";
}

Gender parse_gender(std::string_view name) {
  if (name == "female") return Gender::kFemale;
  if (name == "male") return Gender::kMale;
  if (name == "other") return Gender::kOther;
  throw Error(ErrorCode::kConfigError, "unknown gender " + std::string(name));
}

Json to_json(const SimParticipant& p) {
  Json j = Json::object();
  j["participant_id"] = p.participant_id;
  j["gender"] = to_string(p.gender);
  Json persona = Json::object();
  for (const auto& [k, v] : p.persona) persona[k] = v;
  j["persona"] = std::move(persona);
  j["seed"] = p.seed;
  return j;
}

SimParticipant participant_from_json(const Json& j) {
  SimParticipant p;
  p.participant_id = j.at("participant_id").get<std::string>();
  p.gender = parse_gender(j.at("gender").get<std::string>());
  for (const auto& [k, v] : j.at("persona").items()) p.persona[k] = v.get<std::string>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return p;
}

SimParticipant make_participant(std::string participant_id, Gender gender, std::uint64_t seed) {
  Rng rng(seed);
  SimParticipant p;
  p.participant_id = std::move(participant_id);
  p.gender = gender;
  p.seed = seed;
  p.persona[std::string(kSlotName)] = pick(rng, kNames);
  p.persona[std::string(kSlotFeeling)] = pick(rng, kFeelings);
  p.persona[std::string(kSlotDrink)] = pick(rng, kDrinks);
  p.persona[std::string(kSlotVisitReason)] = pick(rng, kVisitReasons);
  return p;
}

Json to_json(const TranscriptSegment& t) {
  Json j = Json::object();
  j["embodiment_id"] = t.embodiment_id;
  j["started_at"] = t.started_at;
  j["ended_at"] = t.ended_at;
  j["presentation"] = to_json(t.presentation);
  j["agent_turns"] = t.agent_turns;
  j["reprompts"] = t.reprompts;
  j["migration_received"] = t.migration_received;
  Json exchanges = Json::array();
  for (const auto& e : t.exchanges) {
    Json x = Json::object();
    x["speaker"] = e.speaker;
    x["text"] = e.text;
    exchanges.push_back(std::move(x));
  }
  j["exchanges"] = std::move(exchanges);
  return j;
}

// ---------------------------------------------------------------------------
// EmbodimentClient

EmbodimentClient::EmbodimentClient(AgentService& service, std::string session_id,
                                   EmbodimentDescriptor descriptor, std::shared_ptr<Clock> clock)
    : service_(service),
      session_id_(std::move(session_id)),
      descriptor_(std::move(descriptor)),
      clock_(std::move(clock)),
      sequencer_(session_id_, descriptor_.embodiment_id) {}

bool EmbodimentClient::alive() const { return alive_; }

void EmbodimentClient::send(const Envelope& env) {
  received_.push_back(env);
  if (env.msg_type == MsgType::kMigratePayload) {
    apply_migration(env.payload);
    Json ack = Json::object();
    ack["migration_id"] = env.payload.at("migration_id");
    transmit(MsgType::kMigrateAck, std::move(ack));
    return;
  }
  if (env.msg_type == MsgType::kContextSync && env.payload.value("activated", false)) {
    view_.identity = identity_from_json(env.payload.at("presentation"));
    for (const auto& s : env.payload.at("context")) {
      ContextSlot slot = slot_from_json(s);
      view_.context[slot.slot_name] = slot;
    }
  }
  inbox_.push_back(env);
}

void EmbodimentClient::apply_migration(const Json& payload) {
  const auto id = payload.at("migration_id").get<std::string>();
  if (applied_.contains(id)) return;
  applied_.insert(id);
  if (payload.contains("identity")) view_.identity = identity_from_json(payload["identity"]);
  if (payload.contains("context")) {
    for (const auto& s : payload["context"]) {
      ContextSlot slot = slot_from_json(s);
      view_.context[slot.slot_name] = slot;
    }
  }
}

void EmbodimentClient::transmit(MsgType type, Json payload) {
  if (!alive_) throw Error(ErrorCode::kTargetUnavailable, descriptor_.embodiment_id + " is down");
  Envelope env = sequencer_.make(type, std::move(payload), clock_->now_ms());
  sent_.push_back(env);
  service_.handle(env, shared_from_this());
}

void EmbodimentClient::register_session(std::optional<MigrationPolicy> policy) {
  Json payload = Json::object();
  if (policy) payload["policy"] = to_json(*policy);
  transmit(MsgType::kRegister, std::move(payload));
  while (auto env = pop()) {
    if (env->msg_type == MsgType::kError) raise_from(*env);
  }
}

std::optional<ActivationDecision> EmbodimentClient::emit_wake() {
  transmit(MsgType::kWake, Json::object());
  for (auto it = inbox_.begin(); it != inbox_.end(); ++it) {
    if (it->msg_type == MsgType::kError) {
      Envelope err = *it;
      inbox_.erase(it);
      raise_from(err);
    }
    if (it->msg_type == MsgType::kContextSync && it->payload.value("activated", false)) {
      ActivationDecision d = decision_from_json(it->payload);
      inbox_.erase(it);
      return d;
    }
  }
  return std::nullopt;
}

void EmbodimentClient::say(const std::string& text) {
  Json payload = Json::object();
  payload["text"] = text;
  transmit(MsgType::kUtterance, std::move(payload));
}

trustgame::GameOutcome EmbodimentClient::play_game(int give, int predict) {
  Json payload = Json::object();
  payload["give"] = give;
  payload["predict"] = predict;
  transmit(MsgType::kGameMove, std::move(payload));
  while (auto env = pop()) {
    if (env->msg_type == MsgType::kError) raise_from(*env);
    if (env->msg_type == MsgType::kGameResult) return trustgame::outcome_from_json(env->payload);
  }
  throw Error(ErrorCode::kSchemaViolation, "no GAME_RESULT received");
}

void EmbodimentClient::disconnect() { alive_ = false; }

std::optional<Envelope> EmbodimentClient::pop() {
  if (inbox_.empty()) return std::nullopt;
  Envelope env = std::move(inbox_.front());
  inbox_.pop_front();
  return env;
}

// ---------------------------------------------------------------------------
// Responder

PersonaResponder::PersonaResponder(const SimParticipant& participant, double noise_rate,
                                   std::uint64_t seed)
    : participant_(participant), noise_rate_(noise_rate), rng_(seed) {}

std::string PersonaResponder::answer_for(const std::string& slot, const std::string& value) {
  if (slot == kSlotName) return "My name is " + value + ".";
  if (slot == kSlotFeeling) return "I'm feeling " + value + ".";
  if (slot == kSlotVisitReason) return "I am here for a " + value + ".";
  if (slot == kSlotDrink) {
    std::string v = value;
    if (!v.empty()) v[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(v[0])));
    return v + ", please.";
  }
  return value;
}

std::string PersonaResponder::reply(const Json& agent_say) {
  // Draw unconditionally so the stream does not depend on the noise rate.
  const bool noisy = rng_.bernoulli(noise_rate_);
  const auto ack = kAcknowledgements[rng_.below(kAcknowledgements.size())];
  const Json& pending = agent_say.at("pending_slot");
  if (pending.is_null()) return ack;
  if (noisy) return kOffGrammar;
  const auto slot = pending.get<std::string>();
  auto it = participant_.persona.find(slot);
  if (it == participant_.persona.end()) return kOffGrammar;
  return answer_for(slot, it->second);
}

// ---------------------------------------------------------------------------
// Runs

TranscriptSegment run_embodiment(EmbodimentClient& client, Responder& responder,
                                 ManualClock& clock, Rng& pacing_rng,
                                 const PacingOptions& pacing) {
  TranscriptSegment seg;
  seg.embodiment_id = client.descriptor().embodiment_id;
  seg.started_at = clock.now_ms();

  auto decision = client.emit_wake();
  if (!decision) {
    throw Error(ErrorCode::kNotCurrent, seg.embodiment_id + " was already active");
  }
  seg.presentation = decision->presentation;
  seg.migration_received = decision->migration.has_value();

  const auto gap = [&] {
    const auto span = static_cast<std::uint64_t>(pacing.max_gap_ms - pacing.min_gap_ms + 1);
    clock.advance(pacing.min_gap_ms + static_cast<std::int64_t>(pacing_rng.below(span)));
  };

  constexpr int kMaxExchanges = 64;
  while (auto env = client.pop()) {
    if (env->msg_type == MsgType::kError) raise_from(*env);
    if (env->msg_type != MsgType::kAgentSay) continue;
    if (static_cast<int>(seg.exchanges.size()) >= kMaxExchanges) {
      throw Error(ErrorCode::kScriptExhausted, "dialogue at " + seg.embodiment_id + " ran away");
    }
    const Json& p = env->payload;
    seg.exchanges.push_back({"agent", p.at("text").get<std::string>()});
    if (p.value("reprompt", false)) {
      ++seg.reprompts;
    } else {
      ++seg.agent_turns;
    }
    gap();
    if (p.value("expects_reply", false)) {
      std::string text = responder.reply(p);
      seg.exchanges.push_back({"user", text});
      gap();
      client.say(text);
    }
  }
  seg.ended_at = clock.now_ms();
  return seg;
}

Journey run_full_journey(AgentService& service, const Deployment& deployment,
                         const SimParticipant& participant, const MigrationPolicy& policy,
                         const JourneyOptions& options) {
  Orchestrator& orchestrator = service.orchestrator();
  Journey journey;
  journey.clock = std::make_shared<ManualClock>(options.start_ms);

  SessionOptions session;
  session.session_id = participant.participant_id;
  session.clock = journey.clock;
  orchestrator.create_session(policy, deployment.home_identity, session);

  for (const auto& id : deployment.journey) {
    auto client = std::make_shared<EmbodimentClient>(service, participant.participant_id,
                                                     orchestrator.embodiment(id), journey.clock);
    client->register_session();
    journey.clients.push_back(std::move(client));
  }

  Rng pacing_rng(Rng::mix(participant.seed, 1));
  PersonaResponder responder(participant, options.noise_rate, Rng::mix(participant.seed, 2));
  for (std::size_t i = 0; i < journey.clients.size(); ++i) {
    if (i > 0) journey.clock->advance(options.pacing.walk_ms);
    try {
      journey.segments.push_back(run_embodiment(*journey.clients[i], responder, *journey.clock,
                                                pacing_rng, options.pacing));
    } catch (const Error& e) {
      journey.error = e.what();
      break;
    }
  }
  orchestrator.persist_snapshot(participant.participant_id);
  journey.final_state = orchestrator.snapshot(participant.participant_id);
  return journey;
}

}  // namespace migrant::sim

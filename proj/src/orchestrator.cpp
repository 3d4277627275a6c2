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

#include "migrant/orchestrator.hpp"

#include <cstdio>
#include <utility>

#include <spdlog/spdlog.h>

#include "migrant/bundled.hpp"
#include "migrant/error.hpp"

namespace migrant {
namespace {

constexpr const char* kSessions = "sessions";

std::string meta_key(const std::string& id) { return id + ".meta.json"; }
std::string log_key(const std::string& id) { return id + ".events.jsonl"; }
std::string snapshot_key(const std::string& id) { return id + ".snapshot.json"; }

std::string ack_key(const std::string& embodiment_id, const std::string& migration_id) {
  return migration_id + "@" + embodiment_id;
}

Json header_document(const SessionState& s) {
  Json j = Json::object();
  j["session_id"] = s.session_id;
  j["policy"] = to_json(s.policy);
  j["home_identity"] = to_json(s.home_identity);
  return j;
}

}  // namespace

// ---------------------------------------------------------------------------
// Value types

std::string MigrationPolicy::label() const {
  std::string out = "(INF";
  out += migrate_information ? '+' : '-';
  out += ",ID";
  out += migrate_identity ? '+' : '-';
  out += ')';
  return out;
}

MigrationPolicy MigrationPolicy::from_label(std::string_view label) {
  for (const auto& p : kAllPolicies) {
    if (p.label() == label) return p;
  }
  throw Error(ErrorCode::kConfigError, "unknown condition " + std::string(label));
}

Json to_json(const MigrationPolicy& policy) {
  Json j = Json::object();
  j["migrate_information"] = policy.migrate_information;
  j["migrate_identity"] = policy.migrate_identity;
  return j;
}

MigrationPolicy policy_from_json(const Json& j) {
  if (j.is_string()) return MigrationPolicy::from_label(j.get<std::string>());
  try {
    return {j.at("migrate_information").get<bool>(), j.at("migrate_identity").get<bool>()};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, std::string("policy: ") + e.what());
  }
}

std::string_view to_string(EmbodimentKind kind) {
  switch (kind) {
    case EmbodimentKind::kHomeSpeaker: return "home_speaker";
    case EmbodimentKind::kReceptionistRobot: return "receptionist_robot";
    case EmbodimentKind::kWaitingDisplay: return "waiting_display";
  }
  return "home_speaker";
}

EmbodimentKind parse_embodiment_kind(std::string_view name) {
  if (name == "home_speaker") return EmbodimentKind::kHomeSpeaker;
  if (name == "receptionist_robot") return EmbodimentKind::kReceptionistRobot;
  if (name == "waiting_display") return EmbodimentKind::kWaitingDisplay;
  throw Error(ErrorCode::kConfigError, "unknown embodiment kind " + std::string(name));
}

Json to_json(const IdentityPresentation& p) {
  Json j = to_json(p.identity);
  j["home_identity"] = p.home_identity;
  return j;
}

Json to_json(const SessionState& state) {
  Json j = header_document(state);
  Json slots = Json::object();
  for (const auto& [name, slot] : state.slots) slots[name] = to_json(slot);
  j["slots"] = std::move(slots);
  j["current_embodiment"] =
      state.current_embodiment ? Json(*state.current_embodiment) : Json(nullptr);
  j["history"] = state.history;
  return j;
}

std::string snapshot_document(const SessionState& state) {
  return to_json(state).dump() + "\n";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kUtterance: return "utterance";
    case EventKind::kAgentSay: return "agent_say";
    case EventKind::kSlotSet: return "slot_set";
    case EventKind::kMigration: return "migration";
    case EventKind::kWake: return "wake";
    case EventKind::kGame: return "game";
  }
  return "wake";
}

EventKind parse_event_kind(std::string_view name) {
  for (auto k : {EventKind::kUtterance, EventKind::kAgentSay, EventKind::kSlotSet,
                 EventKind::kMigration, EventKind::kWake, EventKind::kGame}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::kCorruptLog, "unknown event kind " + std::string(name));
}

std::string encode_event(const EventRecord& event) {
  Json j = Json::object();
  j["event_id"] = event.event_id;
  j["session_id"] = event.session_id;
  j["kind"] = to_string(event.kind);
  j["body"] = event.body;
  j["timestamp_ms"] = event.timestamp_ms;
  return j.dump() + "\n";
}

EventRecord decode_event(std::string_view line) {
  Json j = Json::parse(line.begin(), line.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kCorruptLog, "unparseable event line");
  }
  try {
    EventRecord e;
    e.event_id = j.at("event_id").get<std::int64_t>();
    e.session_id = j.at("session_id").get<std::string>();
    e.kind = parse_event_kind(j.at("kind").get<std::string>());
    e.body = j.at("body");
    e.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kCorruptLog, std::string("event: ") + ex.what());
  }
}

void apply_event(SessionState& state, const EventRecord& event) {
  switch (event.kind) {
    case EventKind::kWake:
      state.current_embodiment = event.body.at("embodiment_id").get<std::string>();
      break;
    case EventKind::kSlotSet: {
      ContextSlot slot = slot_from_json(event.body.at("slot"));
      state.slots[slot.slot_name] = std::move(slot);
      break;
    }
    case EventKind::kMigration:
      state.current_embodiment = event.body.at("to").get<std::string>();
      break;
    case EventKind::kUtterance:
    case EventKind::kAgentSay:
    case EventKind::kGame:
      break;
  }
  state.history.push_back(event.event_id);
}

SessionState replay_session(const DocumentStore& store, const std::string& session_id) {
  auto meta = store.get(kSessions, meta_key(session_id));
  if (!meta) throw Error(ErrorCode::kUnknownSession, session_id);
  Json header = Json::parse(*meta, nullptr, false);
  if (header.is_discarded()) throw Error(ErrorCode::kCorruptLog, "bad header " + session_id);

  SessionState state;
  try {
    state.session_id = header.at("session_id").get<std::string>();
    state.policy = policy_from_json(header.at("policy"));
    state.home_identity = identity_from_json(header.at("home_identity"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptLog, std::string("header: ") + e.what());
  }

  std::int64_t expected = 1;
  for (const auto& line : store.read_lines(kSessions, log_key(session_id))) {
    EventRecord e = decode_event(line);
    if (e.event_id != expected) {
      throw Error(ErrorCode::kCorruptLog, session_id + ": expected event " +
                                              std::to_string(expected) + ", found " +
                                              std::to_string(e.event_id));
    }
    apply_event(state, e);
    ++expected;
  }
  return state;
}

Json MigrationRecord::payload() const {
  Json j = Json::object();
  j["migration_id"] = migration_id;
  j["from"] = from;
  j["to"] = to;
  if (identity) j["identity"] = to_json(*identity);
  if (context) {
    Json slots = Json::array();
    for (const auto& s : *context) slots.push_back(to_json(s));
    j["context"] = std::move(slots);
  }
  return j;
}

Json to_json(const ActivationDecision& d) {
  Json j = Json::object();
  j["embodiment_id"] = d.embodiment_id;
  j["presentation"] = to_json(d.presentation);
  Json slots = Json::array();
  for (const auto& [name, slot] : d.context) slots.push_back(to_json(slot));
  j["context"] = std::move(slots);
  if (d.migration) j["migration_id"] = d.migration->migration_id;
  return j;
}

IdentityPresentation resolve_identity(const SessionState& session,
                                      const EmbodimentDescriptor& embodiment,
                                      const MigrationPolicy& policy) {
  if (policy.migrate_identity || embodiment.is_home()) {
    return {session.home_identity, true};
  }
  return {embodiment.native_identity, false};
}

ContextView resolve_context(const SessionState& session,
                            const EmbodimentDescriptor& embodiment,
                            const MigrationPolicy& policy) {
  if (policy.migrate_information) return session.slots;
  ContextView view;
  for (const auto& [name, slot] : session.slots) {
    if (slot.source_embodiment == embodiment.embodiment_id) view.emplace(name, slot);
  }
  return view;
}

// ---------------------------------------------------------------------------
// Orchestrator

Orchestrator::Orchestrator(std::shared_ptr<DocumentStore> store, std::shared_ptr<Clock> clock,
                           OrchestratorConfig config)
    : store_(std::move(store)), clock_(std::move(clock)), config_(std::move(config)) {}

void Orchestrator::register_identity(const IdentityRecord& identity) {
  if (identity.identity_id.empty() || identity.visual_asset_id.empty() ||
      identity.voice_profile_id.empty()) {
    throw Error(ErrorCode::kConfigError, "identity needs id, visual asset and voice profile");
  }
  std::unique_lock lock(registry_mu_);
  auto [it, inserted] = identities_.emplace(identity.identity_id, identity);
  if (!inserted && !(it->second == identity)) {
    throw Error(ErrorCode::kConfigError, "identity " + identity.identity_id + " already registered");
  }
}

void Orchestrator::register_embodiment(const EmbodimentDescriptor& embodiment) {
  if (embodiment.embodiment_id.empty()) {
    throw Error(ErrorCode::kConfigError, "embodiment needs an id");
  }
  register_identity(embodiment.native_identity);
  std::unique_lock lock(registry_mu_);
  embodiments_[embodiment.embodiment_id] = embodiment;
}

const EmbodimentDescriptor& Orchestrator::embodiment(const std::string& embodiment_id) const {
  std::shared_lock lock(registry_mu_);
  auto it = embodiments_.find(embodiment_id);
  if (it == embodiments_.end()) throw Error(ErrorCode::kUnknownEmbodiment, embodiment_id);
  return it->second;
}

const IdentityRecord& Orchestrator::identity(const std::string& identity_id) const {
  std::shared_lock lock(registry_mu_);
  auto it = identities_.find(identity_id);
  if (it == identities_.end()) throw Error(ErrorCode::kUnknownIdentity, identity_id);
  return it->second;
}

std::vector<std::string> Orchestrator::embodiment_ids() const {
  std::shared_lock lock(registry_mu_);
  std::vector<std::string> out;
  for (const auto& [id, e] : embodiments_) out.push_back(id);
  return out;
}

std::string Orchestrator::create_session(const MigrationPolicy& policy,
                                         const std::string& home_identity_id,
                                         SessionOptions options) {
  const IdentityRecord home = identity(home_identity_id);
  {
    std::shared_lock lock(registry_mu_);
    for (const auto& [id, e] : embodiments_) {
      if (!e.is_home() && e.native_identity.voice_profile_id == home.voice_profile_id) {
        throw Error(ErrorCode::kConfigError,
                    "embodiment " + id + " shares the home voice profile");
      }
    }
  }

  auto session = std::make_shared<Session>();
  session->clock = options.clock ? options.clock : clock_;
  std::string id;
  {
    std::unique_lock lock(sessions_mu_);
    if (options.session_id) {
      id = *options.session_id;
    } else {
      do {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "s%06llu",
                      static_cast<unsigned long long>(++session_counter_));
        id = buf;
      } while (sessions_.contains(id));
    }
    if (id.empty() || sessions_.contains(id)) {
      throw Error(ErrorCode::kConfigError, "session id '" + id + "' unavailable");
    }
    session->state.session_id = id;
    session->state.policy = policy;
    session->state.home_identity = home;
    sessions_[id] = session;
  }
  store_->put(kSessions, meta_key(id), header_document(session->state).dump() + "\n");
  return id;
}

bool Orchestrator::has_session(const std::string& session_id) const {
  std::shared_lock lock(sessions_mu_);
  return sessions_.contains(session_id);
}

std::shared_ptr<Orchestrator::Session> Orchestrator::find(const std::string& session_id) const {
  std::shared_lock lock(sessions_mu_);
  auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw Error(ErrorCode::kUnknownSession, session_id);
  return it->second;
}

void Orchestrator::connect(const std::string& session_id, const std::string& embodiment_id,
                           std::shared_ptr<Link> link) {
  find(session_id);
  embodiment(embodiment_id);
  std::lock_guard lock(links_mu_);
  Connection& c = links_[{session_id, embodiment_id}];
  c.link = std::move(link);
  c.sequencer = std::make_unique<Sequencer>(session_id, embodiment_id);
  c.send_mu = std::make_unique<std::mutex>();
}

void Orchestrator::disconnect(const std::string& session_id, const std::string& embodiment_id) {
  std::lock_guard lock(links_mu_);
  links_.erase({session_id, embodiment_id});
}

bool Orchestrator::connected(const std::string& session_id,
                             const std::string& embodiment_id) const {
  std::lock_guard lock(links_mu_);
  auto it = links_.find({session_id, embodiment_id});
  return it != links_.end() && it->second.link && it->second.link->alive();
}

Envelope Orchestrator::send(const std::string& session_id, const std::string& embodiment_id,
                            MsgType type, Json payload) {
  std::shared_ptr<Link> link;
  Sequencer* sequencer = nullptr;
  std::mutex* send_mu = nullptr;
  {
    std::lock_guard lock(links_mu_);
    auto it = links_.find({session_id, embodiment_id});
    if (it == links_.end() || !it->second.link || !it->second.link->alive()) {
      throw Error(ErrorCode::kTargetUnavailable, session_id + "/" + embodiment_id);
    }
    link = it->second.link;
    sequencer = it->second.sequencer.get();
    send_mu = it->second.send_mu.get();
  }
  const std::int64_t ts = has_session(session_id) ? now_ms(session_id) : clock_->now_ms();
  std::lock_guard send_lock(*send_mu);
  Envelope env = sequencer->make(type, std::move(payload), ts);
  link->send(env);
  return env;
}

std::int64_t Orchestrator::append_locked(Session& s, EventKind kind, Json body) {
  EventRecord e;
  e.event_id = s.next_event_id++;
  e.session_id = s.state.session_id;
  e.kind = kind;
  e.body = std::move(body);
  e.timestamp_ms = s.clock->now_ms();
  store_->append_line(kSessions, log_key(e.session_id), encode_event(e));
  apply_event(s.state, e);
  if (config_.snapshot_interval > 0 && ++s.since_snapshot >= config_.snapshot_interval) {
    persist_snapshot_locked(s);
  }
  return e.event_id;
}

void Orchestrator::persist_snapshot_locked(Session& s) {
  store_->put(kSessions, snapshot_key(s.state.session_id), snapshot_document(s.state));
  s.since_snapshot = 0;
}

ActivationDecision Orchestrator::handle_wake(const std::string& session_id,
                                             const std::string& embodiment_id) {
  auto session = find(session_id);
  const EmbodimentDescriptor target = embodiment(embodiment_id);
  std::lock_guard lock(session->mu);
  SessionState& state = session->state;

  ActivationDecision decision;
  decision.embodiment_id = embodiment_id;
  if (state.current_embodiment == embodiment_id && session->last_woken == embodiment_id) {
    decision.duplicate = true;
  } else {
    if (state.current_embodiment && *state.current_embodiment != embodiment_id) {
      decision.migration = migrate_locked(*session, *state.current_embodiment, embodiment_id);
    }
    Json body = Json::object();
    body["embodiment_id"] = embodiment_id;
    append_locked(*session, EventKind::kWake, std::move(body));
    session->last_woken = embodiment_id;
  }
  decision.presentation = resolve_identity(state, target, state.policy);
  decision.context = resolve_context(state, target, state.policy);
  return decision;
}

std::int64_t Orchestrator::set_slot(const std::string& session_id, const std::string& slot_name,
                                    const std::string& value,
                                    const std::string& source_embodiment) {
  if (!config_.schema.contains(slot_name)) throw Error(ErrorCode::kUnknownSlot, slot_name);
  auto session = find(session_id);
  embodiment(source_embodiment);
  std::lock_guard lock(session->mu);
  ContextSlot slot{slot_name, value, source_embodiment, session->clock->now_ms()};
  Json body = Json::object();
  body["slot"] = to_json(slot);
  return append_locked(*session, EventKind::kSlotSet, std::move(body));
}

MigrationRecord Orchestrator::migrate(const std::string& session_id, const std::string& from,
                                      const std::string& to) {
  auto session = find(session_id);
  std::lock_guard lock(session->mu);
  return migrate_locked(*session, from, to);
}

MigrationRecord Orchestrator::migrate_locked(Session& s, const std::string& from,
                                             const std::string& to) {
  SessionState& state = s.state;
  if (state.current_embodiment != from) {
    throw Error(ErrorCode::kNotCurrent,
                from + " is not the active embodiment of " + state.session_id);
  }
  const EmbodimentDescriptor target = embodiment(to);
  if (!connected(state.session_id, to)) {
    throw Error(ErrorCode::kTargetUnavailable, state.session_id + "/" + to);
  }

  MigrationRecord record;
  record.session_id = state.session_id;
  record.from = from;
  record.to = to;
  record.event_id = s.next_event_id;
  record.migration_id = state.session_id + "-m" + std::to_string(record.event_id);
  if (state.policy.migrate_identity) record.identity = state.home_identity;
  if (state.policy.migrate_information) {
    std::vector<ContextSlot> slots;
    for (const auto& [name, slot] : resolve_context(state, target, state.policy)) {
      slots.push_back(slot);
    }
    record.context = std::move(slots);
  }

  const std::string key = ack_key(to, record.migration_id);
  bool acked = false;
  for (int attempt = 0; attempt <= config_.ack_retries && !acked; ++attempt) {
    if (attempt > 0) {
      spdlog::warn("migration {} to {} not acknowledged, resending", record.migration_id, to);
    }
    send(state.session_id, to, MsgType::kMigratePayload, record.payload());
    std::unique_lock ack_lock(ack_mu_);
    acked = ack_cv_.wait_for(ack_lock, config_.ack_timeout,
                             [&] { return acked_.contains(key); });
    if (acked) acked_.erase(key);
  }
  if (!acked) {
    throw Error(ErrorCode::kAckTimeout, record.migration_id + " to " + to);
  }

  Json body = record.payload();
  body["identity_migrated"] = record.identity.has_value();
  body["information_migrated"] = record.context.has_value();
  append_locked(s, EventKind::kMigration, std::move(body));
  return record;
}

void Orchestrator::acknowledge(const std::string& session_id, const std::string& embodiment_id,
                               const std::string& migration_id) {
  (void)session_id;
  {
    std::lock_guard lock(ack_mu_);
    acked_.insert(ack_key(embodiment_id, migration_id));
  }
  ack_cv_.notify_all();
}

std::int64_t Orchestrator::record(const std::string& session_id, EventKind kind, Json body) {
  if (kind == EventKind::kWake || kind == EventKind::kSlotSet || kind == EventKind::kMigration) {
    throw Error(ErrorCode::kSchemaViolation,
                "state-changing events go through their own operations");
  }
  auto session = find(session_id);
  std::lock_guard lock(session->mu);
  return append_locked(*session, kind, std::move(body));
}

SessionState Orchestrator::snapshot(const std::string& session_id) const {
  auto session = find(session_id);
  std::lock_guard lock(session->mu);
  return session->state;
}

SessionState Orchestrator::replay(const std::string& session_id) const {
  find(session_id);
  return replay_session(*store_, session_id);
}

void Orchestrator::persist_snapshot(const std::string& session_id) {
  auto session = find(session_id);
  std::lock_guard lock(session->mu);
  persist_snapshot_locked(*session);
}

IdentityPresentation Orchestrator::identity_for(const std::string& session_id,
                                                const std::string& embodiment_id) const {
  auto session = find(session_id);
  const auto& e = embodiment(embodiment_id);
  std::lock_guard lock(session->mu);
  return resolve_identity(session->state, e, session->state.policy);
}

ContextView Orchestrator::context_for(const std::string& session_id,
                                      const std::string& embodiment_id) const {
  auto session = find(session_id);
  const auto& e = embodiment(embodiment_id);
  std::lock_guard lock(session->mu);
  return resolve_context(session->state, e, session->state.policy);
}

std::int64_t Orchestrator::now_ms(const std::string& session_id) const {
  return find(session_id)->clock->now_ms();
}

// ---------------------------------------------------------------------------
// Deployment

Deployment Deployment::load(const Json& doc) {
  Deployment d;
  try {
    std::map<std::string, IdentityRecord> by_id;
    for (const auto& j : doc.at("identities")) {
      IdentityRecord r = identity_from_json(j);
      by_id[r.identity_id] = r;
      d.identities.push_back(r);
    }
    d.home_identity = doc.at("home_identity").get<std::string>();
    if (!by_id.contains(d.home_identity)) {
      throw Error(ErrorCode::kUnknownIdentity, d.home_identity);
    }
    for (const auto& j : doc.at("embodiments")) {
      EmbodimentDescriptor e;
      e.embodiment_id = j.at("embodiment_id").get<std::string>();
      e.kind = parse_embodiment_kind(j.at("kind").get<std::string>());
      const auto native = j.at("native_identity").get<std::string>();
      if (!by_id.contains(native)) throw Error(ErrorCode::kUnknownIdentity, native);
      e.native_identity = by_id[native];
      e.location_label = j.value("location_label", std::string());
      d.embodiments.push_back(std::move(e));
    }
    d.journey = doc.at("journey").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("deployment: ") + e.what());
  }
  return d;
}

Deployment Deployment::bundled() { return load(Json::parse(bundled::deployment())); }

void Deployment::install(Orchestrator& orchestrator) const {
  for (const auto& i : identities) orchestrator.register_identity(i);
  for (const auto& e : embodiments) orchestrator.register_embodiment(e);
}

}  // namespace migrant

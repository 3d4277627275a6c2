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

#ifndef MIGRANT_ORCHESTRATOR_HPP
#define MIGRANT_ORCHESTRATOR_HPP

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "migrant/protocol.hpp"
#include "migrant/store.hpp"

namespace migrant {

// The 2x2 study condition.
struct MigrationPolicy {
  bool migrate_information = false;
  bool migrate_identity = false;

  // "(INF+,ID-)" and so on.
  std::string label() const;
  static MigrationPolicy from_label(std::string_view label);

  friend bool operator==(const MigrationPolicy&, const MigrationPolicy&) = default;
};

inline constexpr MigrationPolicy kAllPolicies[] = {
    {true, true}, {true, false}, {false, true}, {false, false}};

Json to_json(const MigrationPolicy& policy);
MigrationPolicy policy_from_json(const Json& j);

enum class EmbodimentKind { kHomeSpeaker, kReceptionistRobot, kWaitingDisplay };

std::string_view to_string(EmbodimentKind kind);
EmbodimentKind parse_embodiment_kind(std::string_view name);

struct EmbodimentDescriptor {
  std::string embodiment_id;
  EmbodimentKind kind = EmbodimentKind::kHomeSpeaker;
  IdentityRecord native_identity;
  std::string location_label;

  bool is_home() const { return kind == EmbodimentKind::kHomeSpeaker; }
};

struct IdentityPresentation {
  IdentityRecord identity;
  bool home_identity = false;

  friend bool operator==(const IdentityPresentation&, const IdentityPresentation&) = default;
};

Json to_json(const IdentityPresentation& p);

struct SessionState {
  std::string session_id;
  MigrationPolicy policy;
  IdentityRecord home_identity;
  std::map<std::string, ContextSlot> slots;
  std::optional<std::string> current_embodiment;
  std::vector<std::int64_t> history;
};

Json to_json(const SessionState& state);
// Canonical one-line document; two states are equal iff these are.
std::string snapshot_document(const SessionState& state);

enum class EventKind { kUtterance, kAgentSay, kSlotSet, kMigration, kWake, kGame };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view name);

struct EventRecord {
  std::int64_t event_id = 0;
  std::string session_id;
  EventKind kind = EventKind::kWake;
  Json body = Json::object();
  std::int64_t timestamp_ms = 0;
};

std::string encode_event(const EventRecord& event);
EventRecord decode_event(std::string_view line);

// Folds one event into state. Live sessions mutate only through this, so
// replaying a log reproduces the live state exactly.
void apply_event(SessionState& state, const EventRecord& event);

// Rebuilds a session from its header and event log in the store. Throws
// kUnknownSession without a header and kCorruptLog on a gap in event ids.
SessionState replay_session(const DocumentStore& store, const std::string& session_id);

struct MigrationRecord {
  std::string migration_id;
  std::string session_id;
  std::string from;
  std::string to;
  std::int64_t event_id = 0;
  std::optional<IdentityRecord> identity;
  std::optional<std::vector<ContextSlot>> context;

  // Body of the MIGRATE_PAYLOAD envelope.
  Json payload() const;
};

struct ActivationDecision {
  std::string embodiment_id;
  IdentityPresentation presentation;
  ContextView context;
  bool duplicate = false;
  std::optional<MigrationRecord> migration;
};

Json to_json(const ActivationDecision& d);

// Identity an embodiment presents: the home identity at the home embodiment
// or under identity migration, its native identity otherwise.
IdentityPresentation resolve_identity(const SessionState& session,
                                      const EmbodimentDescriptor& embodiment,
                                      const MigrationPolicy& policy);

// Slots an embodiment may use: all of them under information migration,
// otherwise only those it learned itself.
ContextView resolve_context(const SessionState& session,
                            const EmbodimentDescriptor& embodiment,
                            const MigrationPolicy& policy);

// Outbound half of one (session, embodiment) connection.
class Link {
 public:
  virtual ~Link() = default;
  virtual bool alive() const = 0;
  virtual void send(const Envelope& env) = 0;
};

struct OrchestratorConfig {
  std::chrono::milliseconds ack_timeout{5000};
  int ack_retries = 1;
  int snapshot_interval = 32;  // events between snapshot documents; 0 = never
  SlotSchema schema;
};

struct SessionOptions {
  std::optional<std::string> session_id;
  std::shared_ptr<Clock> clock;  // defaults to the orchestrator's clock
};

// Owns sessions, applies the migration policy, and persists every event.
// Mutations to one session are serialized; sessions proceed independently.
class Orchestrator {
 public:
  Orchestrator(std::shared_ptr<DocumentStore> store, std::shared_ptr<Clock> clock,
               OrchestratorConfig config = {});

  void register_identity(const IdentityRecord& identity);
  void register_embodiment(const EmbodimentDescriptor& embodiment);
  const EmbodimentDescriptor& embodiment(const std::string& embodiment_id) const;
  const IdentityRecord& identity(const std::string& identity_id) const;
  std::vector<std::string> embodiment_ids() const;

  std::string create_session(const MigrationPolicy& policy, const std::string& home_identity_id,
                             SessionOptions options = {});
  bool has_session(const std::string& session_id) const;

  void connect(const std::string& session_id, const std::string& embodiment_id,
               std::shared_ptr<Link> link);
  void disconnect(const std::string& session_id, const std::string& embodiment_id);
  bool connected(const std::string& session_id, const std::string& embodiment_id) const;

  // Stamps and sends one envelope over the connection. Throws
  // kTargetUnavailable when there is no live link.
  Envelope send(const std::string& session_id, const std::string& embodiment_id,
                MsgType type, Json payload);

  ActivationDecision handle_wake(const std::string& session_id,
                                 const std::string& embodiment_id);

  std::int64_t set_slot(const std::string& session_id, const std::string& slot_name,
                        const std::string& value, const std::string& source_embodiment);

  // Sends MIGRATE_PAYLOAD to the target and blocks until it acknowledges,
  // resending once before giving up with kAckTimeout. The source is
  // deactivated once the target has acknowledged.
  MigrationRecord migrate(const std::string& session_id, const std::string& from,
                          const std::string& to);

  // Called for MIGRATE_ACK; never blocks on session state.
  void acknowledge(const std::string& session_id, const std::string& embodiment_id,
                   const std::string& migration_id);

  std::int64_t record(const std::string& session_id, EventKind kind, Json body);

  SessionState snapshot(const std::string& session_id) const;
  SessionState replay(const std::string& session_id) const;
  void persist_snapshot(const std::string& session_id);

  IdentityPresentation identity_for(const std::string& session_id,
                                    const std::string& embodiment_id) const;
  ContextView context_for(const std::string& session_id,
                          const std::string& embodiment_id) const;
  std::int64_t now_ms(const std::string& session_id) const;

  const OrchestratorConfig& config() const { return config_; }
  DocumentStore& store() { return *store_; }

 private:
  struct Session {
    mutable std::mutex mu;
    SessionState state;
    std::shared_ptr<Clock> clock;
    std::int64_t next_event_id = 1;
    int since_snapshot = 0;
    std::optional<std::string> last_woken;  // repeated wakes here are ignored
  };

  struct Connection {
    std::shared_ptr<Link> link;
    std::unique_ptr<Sequencer> sequencer;
    std::unique_ptr<std::mutex> send_mu;
  };

  std::shared_ptr<Session> find(const std::string& session_id) const;
  std::int64_t append_locked(Session& s, EventKind kind, Json body);
  MigrationRecord migrate_locked(Session& s, const std::string& from, const std::string& to);
  void persist_snapshot_locked(Session& s);

  std::shared_ptr<DocumentStore> store_;
  std::shared_ptr<Clock> clock_;
  OrchestratorConfig config_;

  mutable std::shared_mutex registry_mu_;
  std::map<std::string, IdentityRecord> identities_;
  std::map<std::string, EmbodimentDescriptor> embodiments_;

  mutable std::shared_mutex sessions_mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t session_counter_ = 0;

  mutable std::mutex links_mu_;
  std::map<std::pair<std::string, std::string>, Connection> links_;

  std::mutex ack_mu_;
  std::condition_variable ack_cv_;
  std::set<std::string> acked_;
};

// Identities, embodiments and the visiting order of one deployment.
struct Deployment {
  std::vector<IdentityRecord> identities;
  std::vector<EmbodimentDescriptor> embodiments;
  std::string home_identity;
  std::vector<std::string> journey;

  static Deployment load(const Json& doc);
  static Deployment bundled();
  void install(Orchestrator& orchestrator) const;
};

}  // namespace migrant

#endif  // MIGRANT_ORCHESTRATOR_HPP

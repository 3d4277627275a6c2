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

#ifndef MIGRANT_SIMULATION_HPP
#define MIGRANT_SIMULATION_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "migrant/orchestrator.hpp"
#include "migrant/rng.hpp"
#include "migrant/service.hpp"
#include "migrant/trustgame.hpp"

namespace migrant::sim {

enum class Gender { kFemale, kMale, kOther };

std::string_view to_string(Gender g);
Gender parse_gender(std::string_view name);

struct SimParticipant {
  std::string participant_id;
  Gender gender = Gender::kFemale;
  std::map<std::string, std::string> persona;  // slot name -> true answer
  std::uint64_t seed = 0;
};

Json to_json(const SimParticipant& p);
SimParticipant participant_from_json(const Json& j);

// Draws a persona covering all four slots.
SimParticipant make_participant(std::string participant_id, Gender gender, std::uint64_t seed);

struct Exchange {
  std::string speaker;  // "agent" or "user"
  std::string text;

  friend bool operator==(const Exchange&, const Exchange&) = default;
};

struct TranscriptSegment {
  std::string embodiment_id;
  std::vector<Exchange> exchanges;
  std::int64_t started_at = 0;
  std::int64_t ended_at = 0;
  IdentityPresentation presentation;
  int agent_turns = 0;  // scripted turns, reprompts excluded
  int reprompts = 0;
  bool migration_received = false;
};

Json to_json(const TranscriptSegment& t);

// What an embodiment believes after activation or a migration payload.
struct EmbodimentView {
  std::optional<IdentityRecord> identity;
  ContextView context;

  friend bool operator==(const EmbodimentView&, const EmbodimentView&) = default;
};

// A simulated device on one (session, embodiment) connection. It is the
// orchestrator's Link for that connection and talks to the service
// in-process, acknowledging migration payloads as they arrive.
class EmbodimentClient : public Link, public std::enable_shared_from_this<EmbodimentClient> {
 public:
  EmbodimentClient(AgentService& service, std::string session_id, EmbodimentDescriptor descriptor,
                   std::shared_ptr<Clock> clock);

  bool alive() const override;
  void send(const Envelope& env) override;

  // REGISTER; a policy creates the session on first contact.
  void register_session(std::optional<MigrationPolicy> policy = std::nullopt);

  // Stand-in for the camera and face detector. Returns nullopt when the
  // service ignored the wake as a repeat. Throws kTargetUnavailable once
  // the connection is down.
  std::optional<ActivationDecision> emit_wake();

  void say(const std::string& text);
  trustgame::GameOutcome play_game(int give, int predict);

  void disconnect();

  std::optional<Envelope> pop();
  const std::vector<Envelope>& received() const { return received_; }
  const std::vector<Envelope>& sent() const { return sent_; }
  const EmbodimentView& view() const { return view_; }
  const EmbodimentDescriptor& descriptor() const { return descriptor_; }
  const std::string& session_id() const { return session_id_; }
  int migrations_applied() const { return static_cast<int>(applied_.size()); }

  // Applies a MIGRATE_PAYLOAD body; a payload seen before changes nothing.
  void apply_migration(const Json& payload);

 private:
  void transmit(MsgType type, Json payload);

  AgentService& service_;
  std::string session_id_;
  EmbodimentDescriptor descriptor_;
  std::shared_ptr<Clock> clock_;
  Sequencer sequencer_;
  bool alive_ = true;

  std::deque<Envelope> inbox_;
  std::vector<Envelope> received_;
  std::vector<Envelope> sent_;
  EmbodimentView view_;
  std::set<std::string> applied_;
};

// Produces the participant's replies.
class Responder {
 public:
  virtual ~Responder() = default;
  virtual std::string reply(const Json& agent_say) = 0;
};

// Answers the slot the agent asked for with persona truth. With
// probability noise_rate the reply is off-grammar instead.
class PersonaResponder : public Responder {
 public:
  PersonaResponder(const SimParticipant& participant, double noise_rate, std::uint64_t seed);
  std::string reply(const Json& agent_say) override;

  static std::string answer_for(const std::string& slot, const std::string& value);
  static constexpr const char* kOffGrammar = "Hmm, let me think about that.";

 private:
  const SimParticipant& participant_;
  double noise_rate_;
  Rng rng_;
};

struct PacingOptions {
  std::int64_t min_gap_ms = 1500;   // between exchanges
  std::int64_t max_gap_ms = 4500;
  std::int64_t walk_ms = 60000;     // moving between embodiments
};

// Wakes the embodiment and plays its whole script against responder.
TranscriptSegment run_embodiment(EmbodimentClient& client, Responder& responder,
                                 ManualClock& clock, Rng& pacing_rng,
                                 const PacingOptions& pacing = {});

struct JourneyOptions {
  double noise_rate = 0.0;
  std::int64_t start_ms = 1577869200000;  // 2020-01-01T09:00:00Z
  PacingOptions pacing;
};

struct Journey {
  std::vector<TranscriptSegment> segments;
  std::optional<SessionState> final_state;
  std::vector<std::shared_ptr<EmbodimentClient>> clients;
  std::shared_ptr<ManualClock> clock;
  std::optional<std::string> error;  // set when an embodiment failed
};

// home -> receptionist -> waiting display, migrating on each wake. The
// session id is the participant id.
Journey run_full_journey(AgentService& service, const Deployment& deployment,
                         const SimParticipant& participant, const MigrationPolicy& policy,
                         const JourneyOptions& options = {});

}  // namespace migrant::sim

#endif  // MIGRANT_SIMULATION_HPP

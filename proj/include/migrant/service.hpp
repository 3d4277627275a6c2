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

#ifndef MIGRANT_SERVICE_HPP
#define MIGRANT_SERVICE_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "migrant/dialogue.hpp"
#include "migrant/nlu.hpp"
#include "migrant/orchestrator.hpp"
#include "migrant/protocol.hpp"

namespace migrant {

struct ServiceConfig {
  int agent_give = 4;  // tokens the agent hands over in every game
  std::string default_identity = "panda";
};

// Cloud-side dispatcher: turns inbound envelopes into orchestrator calls,
// runs one dialogue per (session, embodiment) and answers over the
// connection's link.
//
//   REGISTER        bind the sender's link; create the session when the
//                   payload carries a policy
//   WAKE            activate (migrating first if needed), CONTEXT_SYNC,
//                   then the first AGENT_SAY
//   UTTERANCE       parse, fill slots, next AGENT_SAY
//   MIGRATE_REQUEST explicit migration from the sender to payload.to
//   MIGRATE_ACK     completes a pending migration
//   CONTEXT_SYNC    returns the sender's current identity and context
//   GAME_MOVE       plays one Give-Some round, answers GAME_RESULT
//
// Failures are reported to the sender as ERROR envelopes.
class AgentService {
 public:
  AgentService(Orchestrator& orchestrator, const nlu::Grammar& grammar,
               dialogue::ScriptLibrary scripts, ServiceConfig config = {});

  void handle(const Envelope& env, std::shared_ptr<Link> from = nullptr);

  Orchestrator& orchestrator() { return orchestrator_; }

 private:
  using Key = std::pair<std::string, std::string>;

  std::mutex& session_mutex(const std::string& session_id);
  void dispatch(const Envelope& env, const std::shared_ptr<Link>& from);
  void on_register(const Envelope& env, const std::shared_ptr<Link>& from);
  void on_wake(const Envelope& env);
  void on_utterance(const Envelope& env);
  void on_migrate_request(const Envelope& env);
  void on_context_sync(const Envelope& env);
  void on_game_move(const Envelope& env);
  void emit(const Key& key, const dialogue::AgentUtterance& u);
  void reply_error(const Envelope& env, const std::shared_ptr<Link>& from, std::string_view code,
                   const std::string& message);

  Orchestrator& orchestrator_;
  const nlu::Grammar& grammar_;
  dialogue::ScriptLibrary scripts_;
  ServiceConfig config_;

  std::mutex table_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> session_mu_;
  std::map<Key, dialogue::DialogueState> dialogues_;
  std::map<Key, std::uint64_t> last_inbound_seq_;
};

}  // namespace migrant

#endif  // MIGRANT_SERVICE_HPP

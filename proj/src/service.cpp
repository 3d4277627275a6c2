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

#include "migrant/service.hpp"

#include <spdlog/spdlog.h>

#include "migrant/error.hpp"
#include "migrant/trustgame.hpp"

namespace migrant {

AgentService::AgentService(Orchestrator& orchestrator, const nlu::Grammar& grammar,
                           dialogue::ScriptLibrary scripts, ServiceConfig config)
    : orchestrator_(orchestrator),
      grammar_(grammar),
      scripts_(std::move(scripts)),
      config_(std::move(config)) {}

std::mutex& AgentService::session_mutex(const std::string& session_id) {
  std::lock_guard lock(table_mu_);
  auto& mu = session_mu_[session_id];
  if (!mu) mu = std::make_unique<std::mutex>();
  return *mu;
}

void AgentService::handle(const Envelope& env, std::shared_ptr<Link> from) {
  // Acks bypass the session lock: the migration waiting for them holds it.
  if (env.msg_type == MsgType::kMigrateAck) {
    if (!env.payload.contains("migration_id") || !env.payload["migration_id"].is_string()) {
      reply_error(env, from, to_string(ErrorCode::kSchemaViolation), "ack without migration_id");
      return;
    }
    orchestrator_.acknowledge(env.session_id, env.embodiment_id,
                              env.payload["migration_id"].get<std::string>());
    return;
  }

  std::lock_guard lock(session_mutex(env.session_id));
  const Key key{env.session_id, env.embodiment_id};
  std::optional<std::uint64_t> stale_after;
  {
    std::lock_guard table(table_mu_);
    auto it = last_inbound_seq_.find(key);
    if (env.msg_type != MsgType::kRegister && it != last_inbound_seq_.end() &&
        env.seq <= it->second) {
      stale_after = it->second;
    } else {
      last_inbound_seq_[key] = env.seq;
    }
  }
  if (stale_after) {
    reply_error(env, from, "OrderingViolation",
                "seq " + std::to_string(env.seq) + " after " + std::to_string(*stale_after));
    return;
  }

  try {
    dispatch(env, from);
  } catch (const Error& e) {
    reply_error(env, from, to_string(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    reply_error(env, from, to_string(ErrorCode::kSchemaViolation), e.what());
  }
}

void AgentService::dispatch(const Envelope& env, const std::shared_ptr<Link>& from) {
  switch (env.msg_type) {
    case MsgType::kRegister: on_register(env, from); break;
    case MsgType::kWake: on_wake(env); break;
    case MsgType::kUtterance: on_utterance(env); break;
    case MsgType::kMigrateRequest: on_migrate_request(env); break;
    case MsgType::kContextSync: on_context_sync(env); break;
    case MsgType::kGameMove: on_game_move(env); break;
    default:
      throw Error(ErrorCode::kSchemaViolation,
                  std::string(to_string(env.msg_type)) + " is not accepted from embodiments");
  }
}

void AgentService::on_register(const Envelope& env, const std::shared_ptr<Link>& from) {
  if (!orchestrator_.has_session(env.session_id)) {
    if (!env.payload.contains("policy")) throw Error(ErrorCode::kUnknownSession, env.session_id);
    SessionOptions options;
    options.session_id = env.session_id;
    orchestrator_.create_session(policy_from_json(env.payload["policy"]),
                                 env.payload.value("identity_id", config_.default_identity),
                                 options);
  }
  if (!from) throw Error(ErrorCode::kTargetUnavailable, "REGISTER without a connection");
  orchestrator_.connect(env.session_id, env.embodiment_id, from);

  const auto& e = orchestrator_.embodiment(env.embodiment_id);
  Json payload = Json::object();
  payload["registered"] = true;
  payload["policy"] = to_json(orchestrator_.snapshot(env.session_id).policy);
  payload["kind"] = to_string(e.kind);
  payload["location_label"] = e.location_label;
  payload["presentation"] = to_json(orchestrator_.identity_for(env.session_id, env.embodiment_id));
  orchestrator_.send(env.session_id, env.embodiment_id, MsgType::kContextSync, std::move(payload));
}

void AgentService::on_wake(const Envelope& env) {
  ActivationDecision decision = orchestrator_.handle_wake(env.session_id, env.embodiment_id);
  if (decision.duplicate) {
    spdlog::warn("duplicate wake from {} in session {} ignored", env.embodiment_id,
                 env.session_id);
    return;
  }
  Json payload = to_json(decision);
  payload["activated"] = true;
  orchestrator_.send(env.session_id, env.embodiment_id, MsgType::kContextSync,
                     std::move(payload));

  const auto& e = orchestrator_.embodiment(env.embodiment_id);
  const Key key{env.session_id, env.embodiment_id};
  dialogue::DialogueState state = dialogue::start(scripts_.for_kind(to_string(e.kind)));
  auto u = dialogue::next_agent_turn(state, decision.context);
  {
    std::lock_guard table(table_mu_);
    dialogues_[key] = state;
  }
  emit(key, u);
}

void AgentService::on_utterance(const Envelope& env) {
  const SessionState snap = orchestrator_.snapshot(env.session_id);
  if (snap.current_embodiment != env.embodiment_id) {
    throw Error(ErrorCode::kNotCurrent, env.embodiment_id + " is not active");
  }
  const Key key{env.session_id, env.embodiment_id};
  dialogue::DialogueState state;
  {
    std::lock_guard table(table_mu_);
    auto it = dialogues_.find(key);
    if (it == dialogues_.end()) throw Error(ErrorCode::kScriptExhausted, "no dialogue running");
    state = it->second;
  }
  const std::string text = env.payload.at("text").get<std::string>();

  Json body = Json::object();
  body["embodiment_id"] = env.embodiment_id;
  body["text"] = text;
  orchestrator_.record(env.session_id, EventKind::kUtterance, std::move(body));

  if (!state.awaiting_reply) return;  // nothing was asked; kept for the log

  const nlu::ParseResult parse = grammar_.parse(text, state.pending_slot);
  dialogue::Advance adv = dialogue::advance(state, parse);
  if (adv.fill) {
    orchestrator_.set_slot(env.session_id, adv.fill->slot, adv.fill->value, env.embodiment_id);
  }
  std::optional<dialogue::AgentUtterance> next;
  if (adv.reprompt) {
    next = dialogue::reprompt(adv.state);
  } else if (!adv.state.finished()) {
    next = dialogue::next_agent_turn(adv.state,
                                     orchestrator_.context_for(env.session_id, env.embodiment_id));
  }
  {
    std::lock_guard table(table_mu_);
    dialogues_[key] = adv.state;
  }
  if (next) emit(key, *next);
}

void AgentService::emit(const Key& key, const dialogue::AgentUtterance& u) {
  const auto& [session_id, embodiment_id] = key;
  const IdentityPresentation who = orchestrator_.identity_for(session_id, embodiment_id);

  Json body = Json::object();
  body["embodiment_id"] = embodiment_id;
  body["turn_id"] = u.turn_id;
  body["text"] = u.text;
  body["recalled"] = u.recalled;
  body["reprompt"] = u.reprompt;
  orchestrator_.record(session_id, EventKind::kAgentSay, std::move(body));

  Json payload = Json::object();
  payload["text"] = u.text;
  payload["turn_id"] = u.turn_id;
  payload["turn_index"] = u.turn_index;
  payload["pending_slot"] = u.pending_slot ? Json(*u.pending_slot) : Json(nullptr);
  payload["expects_reply"] = u.expects_reply;
  payload["final"] = u.final;
  payload["recalled"] = u.recalled;
  payload["reprompt"] = u.reprompt;
  payload["speaker"] = who.identity.display_name;
  payload["visual_asset_id"] = who.identity.visual_asset_id;
  payload["voice_profile_id"] = who.identity.voice_profile_id;
  orchestrator_.send(session_id, embodiment_id, MsgType::kAgentSay, std::move(payload));
}

void AgentService::on_migrate_request(const Envelope& env) {
  const auto to = env.payload.at("to").get<std::string>();
  MigrationRecord record = orchestrator_.migrate(env.session_id, env.embodiment_id, to);
  Json payload = Json::object();
  payload["migrated"] = record.payload();
  orchestrator_.send(env.session_id, env.embodiment_id, MsgType::kContextSync,
                     std::move(payload));
}

void AgentService::on_context_sync(const Envelope& env) {
  Json payload = Json::object();
  payload["presentation"] = to_json(orchestrator_.identity_for(env.session_id, env.embodiment_id));
  Json slots = Json::array();
  for (const auto& [name, slot] : orchestrator_.context_for(env.session_id, env.embodiment_id)) {
    slots.push_back(to_json(slot));
  }
  payload["context"] = std::move(slots);
  orchestrator_.send(env.session_id, env.embodiment_id, MsgType::kContextSync,
                     std::move(payload));
}

void AgentService::on_game_move(const Envelope& env) {
  const int give = env.payload.at("give").get<int>();
  const int predict = env.payload.at("predict").get<int>();
  const trustgame::GameOutcome outcome = trustgame::play(give, predict, config_.agent_give);

  Json body = trustgame::to_json(outcome);
  body["embodiment_id"] = env.embodiment_id;
  orchestrator_.record(env.session_id, EventKind::kGame, body);

  Json payload = trustgame::to_json(outcome);
  payload["agent_give"] = config_.agent_give;
  orchestrator_.send(env.session_id, env.embodiment_id, MsgType::kGameResult,
                     std::move(payload));
}

void AgentService::reply_error(const Envelope& env, const std::shared_ptr<Link>& from,
                               std::string_view code, const std::string& message) {
  Json payload = Json::object();
  payload["code"] = code;
  payload["message"] = message;
  payload["in_reply_to"] = env.seq;
  try {
    if (orchestrator_.connected(env.session_id, env.embodiment_id)) {
      orchestrator_.send(env.session_id, env.embodiment_id, MsgType::kError, std::move(payload));
      return;
    }
  } catch (const Error&) {
    // fall through to the raw link
  }
  if (from && from->alive()) {
    Sequencer seq(env.session_id, env.embodiment_id);
    from->send(seq.make(MsgType::kError, std::move(payload), env.timestamp_ms));
  } else {
    spdlog::warn("dropping error for {}/{}: {}", env.session_id, env.embodiment_id, message);
  }
}

}  // namespace migrant

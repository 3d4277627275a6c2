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

#include "migrant/dialogue.hpp"

#include <algorithm>
#include <fstream>
#include <regex>

#include "migrant/bundled.hpp"
#include "migrant/error.hpp"

namespace migrant::dialogue {
namespace {

std::vector<std::string> placeholders(const std::string& tmpl) {
  static const std::regex kPlaceholder(R"(\{([A-Za-z_][A-Za-z0-9_]*)\})");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(tmpl.begin(), tmpl.end(), kPlaceholder);
       it != std::sregex_iterator(); ++it) {
    out.push_back((*it)[1].str());
  }
  return out;
}

// One branch must render to exactly one utterance.
void check_branch(const std::string& turn_id, const char* branch, const std::string& tmpl) {
  if (tmpl.empty() || tmpl.find('\n') != std::string::npos) {
    throw Error(ErrorCode::kTurnImbalance,
                "turn " + turn_id + ": " + branch + " branch must be exactly one utterance");
  }
}

void check_placeholders(const std::string& turn_id, const std::string& tmpl,
                        const std::optional<std::string>& allowed, const SlotSchema& schema) {
  for (const auto& name : placeholders(tmpl)) {
    if (!schema.contains(name)) {
      throw Error(ErrorCode::kUnknownSlotRef, "turn " + turn_id + ": {" + name + "}");
    }
    if (!allowed || name != *allowed) {
      throw Error(ErrorCode::kUnknownSlotRef,
                  "turn " + turn_id + ": {" + name + "} may be unset when rendered");
    }
  }
}

Json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kConfigError, "not valid JSON: " + path.string());
  }
  return doc;
}

}  // namespace

DialogueScript load_script(const Json& doc, const SlotSchema& schema) {
  DialogueScript script;
  try {
    script.embodiment_kind = doc.at("embodiment_kind").get<std::string>();
    if (!doc.contains("turns") || !doc["turns"].is_array() || doc["turns"].empty()) {
      throw Error(ErrorCode::kEmptyScript, script.embodiment_kind + " has no turns");
    }
    for (const auto& t : doc["turns"]) {
      TurnSpec turn;
      turn.turn_id = t.at("turn_id").get<std::string>();
      if (t.contains("slot") && !t["slot"].is_null()) turn.slot = t["slot"].get<std::string>();
      turn.prompt_template = t.value("prompt", std::string());
      turn.recall_template = t.value("recall", std::string());
      turn.expects_user_reply = t.value("expects_user_reply", true);

      if (turn.slot && !schema.contains(*turn.slot)) {
        throw Error(ErrorCode::kUnknownSlotRef, "turn " + turn.turn_id + ": " + *turn.slot);
      }
      check_branch(turn.turn_id, "prompt", turn.prompt_template);
      check_placeholders(turn.turn_id, turn.prompt_template, std::nullopt, schema);
      if (turn.slot) {
        check_branch(turn.turn_id, "recall", turn.recall_template);
        check_placeholders(turn.turn_id, turn.recall_template, turn.slot, schema);
      } else if (!turn.recall_template.empty()) {
        throw Error(ErrorCode::kTurnImbalance,
                    "turn " + turn.turn_id + ": recall branch without a slot");
      }
      script.turns.push_back(std::move(turn));
    }
    if (doc.contains("turn_count") && doc["turn_count"].get<int>() != script.turn_count()) {
      throw Error(ErrorCode::kTurnImbalance,
                  script.embodiment_kind + ": declared turn_count " +
                      std::to_string(doc["turn_count"].get<int>()) + " but " +
                      std::to_string(script.turn_count()) + " turns");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("script: ") + e.what());
  }
  return script;
}

DialogueScript load_script_file(const std::filesystem::path& path, const SlotSchema& schema) {
  return load_script(parse_file(path), schema);
}

ScriptLibrary ScriptLibrary::bundled() {
  ScriptLibrary lib;
  lib.add(load_script(Json::parse(bundled::home_speaker_script())));
  lib.add(load_script(Json::parse(bundled::receptionist_robot_script())));
  lib.add(load_script(Json::parse(bundled::waiting_display_script())));
  return lib;
}

ScriptLibrary ScriptLibrary::from_directory(const std::filesystem::path& dir,
                                            const SlotSchema& schema) {
  ScriptLibrary lib;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) lib.add(load_script_file(f, schema));
  return lib;
}

void ScriptLibrary::add(DialogueScript script) {
  auto kind = script.embodiment_kind;
  scripts_[kind] = std::make_shared<const DialogueScript>(std::move(script));
}

const DialogueScript& ScriptLibrary::for_kind(std::string_view kind) const {
  auto it = scripts_.find(kind);
  if (it == scripts_.end()) {
    throw Error(ErrorCode::kEmptyScript, "no script for " + std::string(kind));
  }
  return *it->second;
}

bool ScriptLibrary::contains(std::string_view kind) const {
  return scripts_.find(kind) != scripts_.end();
}

DialogueState start(const DialogueScript& script) {
  DialogueState s;
  s.script = &script;
  return s;
}

std::string render(const std::string& tmpl, const ContextView& view) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const auto open = tmpl.find('{', i);
    if (open == std::string::npos) break;
    const auto close = tmpl.find('}', open);
    if (close == std::string::npos) break;
    out.append(tmpl, i, open - i);
    const std::string name = tmpl.substr(open + 1, close - open - 1);
    auto it = view.find(name);
    if (it == view.end()) throw Error(ErrorCode::kUnknownSlotRef, "no value for {" + name + "}");
    out += it->second.value;
    i = close + 1;
  }
  out.append(tmpl, i, std::string::npos);
  return out;
}

AgentUtterance next_agent_turn(DialogueState& state, const ContextView& view) {
  if (state.finished()) {
    throw Error(ErrorCode::kScriptExhausted, "no turns left");
  }
  const TurnSpec& turn = state.script->turns[state.position];
  AgentUtterance u;
  u.turn_id = turn.turn_id;
  u.turn_index = state.position;
  u.expects_reply = turn.expects_user_reply;
  u.final = state.position + 1 == state.script->turn_count();

  if (turn.slot && view.contains(*turn.slot)) {
    u.text = render(turn.recall_template, view);
    u.recalled = true;
  } else {
    u.text = turn.prompt_template;
    u.pending_slot = turn.slot;
  }

  state.pending_slot = u.expects_reply ? u.pending_slot : std::nullopt;
  state.retries = 0;
  if (u.expects_reply) {
    state.awaiting_reply = true;
  } else {
    state.awaiting_reply = false;
    ++state.position;
  }
  return u;
}

AgentUtterance reprompt(const DialogueState& state) {
  const TurnSpec& turn = state.script->turns[state.position];
  AgentUtterance u;
  u.text = "Sorry, I didn't catch that. " + turn.prompt_template;
  u.turn_id = turn.turn_id;
  u.turn_index = state.position;
  u.pending_slot = state.pending_slot;
  u.expects_reply = true;
  u.final = false;
  u.reprompt = true;
  return u;
}

Advance advance(const DialogueState& state, const nlu::ParseResult& parse) {
  Advance out{state, std::nullopt, false};
  DialogueState& next = out.state;
  next.awaiting_reply = false;

  if (!state.pending_slot) {
    ++next.position;
    next.retries = 0;
    return out;
  }
  auto it = parse.entities.find(*state.pending_slot);
  if (it != parse.entities.end()) {
    out.fill = SlotFill{it->first, it->second};
    ++next.position;
    next.retries = 0;
    next.pending_slot.reset();
    return out;
  }
  if (state.retries < kMaxRetries) {
    ++next.retries;
    ++next.reprompts;
    next.awaiting_reply = true;
    out.reprompt = true;
    return out;
  }
  ++next.position;
  next.retries = 0;
  next.pending_slot.reset();
  return out;
}

}  // namespace migrant::dialogue

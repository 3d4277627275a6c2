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

#ifndef MIGRANT_DIALOGUE_HPP
#define MIGRANT_DIALOGUE_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "migrant/nlu.hpp"
#include "migrant/protocol.hpp"

namespace migrant::dialogue {

// Maximum consecutive failed parses on one turn before moving on.
inline constexpr int kMaxRetries = 2;

struct TurnSpec {
  std::string turn_id;
  std::optional<std::string> slot;
  std::string recall_template;  // empty for turns without a slot
  std::string prompt_template;
  bool expects_user_reply = true;
};

struct DialogueScript {
  std::string embodiment_kind;
  std::vector<TurnSpec> turns;

  int turn_count() const { return static_cast<int>(turns.size()); }
};

// Validates a script document. Throws kEmptyScript, kTurnImbalance (a branch
// that would not produce exactly one utterance, or a declared turn_count
// that disagrees with the turns) or kUnknownSlotRef (a slot or placeholder
// outside the schema, or a placeholder that could be missing at render time).
DialogueScript load_script(const Json& doc, const SlotSchema& schema = SlotSchema());
DialogueScript load_script_file(const std::filesystem::path& path,
                                const SlotSchema& schema = SlotSchema());

// Scripts keyed by embodiment kind name.
class ScriptLibrary {
 public:
  static ScriptLibrary bundled();
  // Loads every *.json file in dir.
  static ScriptLibrary from_directory(const std::filesystem::path& dir,
                                      const SlotSchema& schema = SlotSchema());

  void add(DialogueScript script);
  const DialogueScript& for_kind(std::string_view kind) const;
  bool contains(std::string_view kind) const;

 private:
  std::map<std::string, std::shared_ptr<const DialogueScript>, std::less<>> scripts_;
};

struct DialogueState {
  const DialogueScript* script = nullptr;
  int position = 0;
  std::optional<std::string> pending_slot;
  int retries = 0;
  bool awaiting_reply = false;
  int reprompts = 0;  // audit only; never counted as a scripted turn

  bool finished() const { return script == nullptr || position >= script->turn_count(); }
};

DialogueState start(const DialogueScript& script);

struct AgentUtterance {
  std::string text;
  std::string turn_id;
  int turn_index = 0;
  std::optional<std::string> pending_slot;
  bool recalled = false;
  bool expects_reply = false;
  bool final = false;
  bool reprompt = false;
};

// Emits the current turn: the recall line if the view already holds the
// turn's slot, otherwise the prompt. A turn that expects no reply is
// consumed immediately. Throws kScriptExhausted past the last turn.
AgentUtterance next_agent_turn(DialogueState& state, const ContextView& view);

// Re-asks the pending question after a failed parse.
AgentUtterance reprompt(const DialogueState& state);

struct SlotFill {
  std::string slot;
  std::string value;
};

struct Advance {
  DialogueState state;
  std::optional<SlotFill> fill;
  bool reprompt = false;
};

// Consumes the user's reply to the current turn.
Advance advance(const DialogueState& state, const nlu::ParseResult& parse);

// Replaces each {slot} with the view's value; throws kUnknownSlotRef when a
// placeholder has no value.
std::string render(const std::string& tmpl, const ContextView& view);

}  // namespace migrant::dialogue

#endif  // MIGRANT_DIALOGUE_HPP

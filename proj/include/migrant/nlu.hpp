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

#ifndef MIGRANT_NLU_HPP
#define MIGRANT_NLU_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "migrant/protocol.hpp"

namespace migrant::nlu {

enum class Intent {
  kProvideName,
  kProvideFeeling,
  kProvideDrink,
  kProvideVisitReason,
  kGreeting,
  kAffirm,
  kDeny,
  kUnknown,
};

std::string_view to_string(Intent intent);
std::optional<Intent> parse_intent(std::string_view name);

struct ParseResult {
  Intent intent = Intent::kUnknown;
  std::map<std::string, std::string> entities;
  std::string matched_rule;

  friend bool operator==(const ParseResult&, const ParseResult&) = default;
};

// An ordered list of case-insensitive patterns. The first rule that matches
// wins. Rules marked "expected" only fire when the dialogue has asked for
// their slot, which is how bare answers ("nervous", "Alice") are accepted.
class Grammar {
 public:
  // Throws kConfigError on malformed rules and kUnknownSlot for slots
  // outside the schema.
  static Grammar load(const Json& doc, const SlotSchema& schema = SlotSchema());
  static Grammar load_file(const std::filesystem::path& path,
                           const SlotSchema& schema = SlotSchema());
  static const Grammar& bundled();

  ParseResult classify(std::string_view utterance) const;
  std::optional<std::string> extract_slot(std::string_view utterance,
                                          std::string_view expected) const;

  // Tries the expected slot's rules first, then falls back to classify.
  ParseResult parse(std::string_view utterance,
                    const std::optional<std::string>& expected) const;

  std::size_t size() const { return rules_.size(); }

 private:
  enum class Transform { kNone, kLower, kTitle };

  struct Rule {
    std::string id;
    Intent intent = Intent::kUnknown;
    std::optional<std::string> slot;
    std::regex pattern;
    int group = 1;
    Transform transform = Transform::kNone;
    std::vector<std::string> vocabulary;
    bool expected_only = false;
  };

  std::optional<std::string> apply(const Rule& rule, std::string_view utterance) const;

  std::vector<Rule> rules_;
};

}  // namespace migrant::nlu

#endif  // MIGRANT_NLU_HPP

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

#include "migrant/nlu.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include "migrant/bundled.hpp"
#include "migrant/error.hpp"

namespace migrant::nlu {
namespace {

constexpr std::array<std::pair<Intent, std::string_view>, 8> kIntentNames{{
    {Intent::kProvideName, "provide_name"},
    {Intent::kProvideFeeling, "provide_feeling"},
    {Intent::kProvideDrink, "provide_drink"},
    {Intent::kProvideVisitReason, "provide_visit_reason"},
    {Intent::kGreeting, "greeting"},
    {Intent::kAffirm, "affirm"},
    {Intent::kDeny, "deny"},
    {Intent::kUnknown, "unknown"},
}};

bool is_provide(Intent intent) {
  return intent == Intent::kProvideName || intent == Intent::kProvideFeeling ||
         intent == Intent::kProvideDrink || intent == Intent::kProvideVisitReason;
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string title(std::string s) {
  bool start = true;
  for (char& c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalpha(u)) {
      c = static_cast<char>(start ? std::toupper(u) : std::tolower(u));
      start = false;
    } else {
      start = true;
    }
  }
  return s;
}

}  // namespace

std::string_view to_string(Intent intent) {
  for (const auto& [i, name] : kIntentNames) {
    if (i == intent) return name;
  }
  return "unknown";
}

std::optional<Intent> parse_intent(std::string_view name) {
  for (const auto& [i, n] : kIntentNames) {
    if (n == name) return i;
  }
  return std::nullopt;
}

Grammar Grammar::load(const Json& doc, const SlotSchema& schema) {
  if (!doc.is_object() || !doc.contains("rules") || !doc["rules"].is_array()) {
    throw Error(ErrorCode::kConfigError, "grammar document needs a rules array");
  }
  Grammar g;
  for (const auto& r : doc["rules"]) {
    Rule rule;
    try {
      rule.id = r.at("id").get<std::string>();
      const auto intent_name = r.at("intent").get<std::string>();
      auto intent = parse_intent(intent_name);
      if (!intent) throw Error(ErrorCode::kConfigError, "unknown intent " + intent_name);
      rule.intent = *intent;
      if (r.contains("slot")) rule.slot = r["slot"].get<std::string>();
      rule.group = r.value("group", 1);
      const auto transform = r.value("transform", std::string("none"));
      if (transform == "lower") {
        rule.transform = Transform::kLower;
      } else if (transform == "title") {
        rule.transform = Transform::kTitle;
      } else if (transform != "none") {
        throw Error(ErrorCode::kConfigError, "unknown transform " + transform);
      }
      if (r.contains("vocabulary")) {
        rule.vocabulary = r["vocabulary"].get<std::vector<std::string>>();
      }
      const auto when = r.value("when", std::string("always"));
      if (when != "always" && when != "expected") {
        throw Error(ErrorCode::kConfigError, "rule " + rule.id + ": bad when " + when);
      }
      rule.expected_only = when == "expected";
      rule.pattern = std::regex(r.at("pattern").get<std::string>(),
                                std::regex::ECMAScript | std::regex::icase);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kConfigError, std::string("grammar rule: ") + e.what());
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::kConfigError, "rule " + rule.id + ": " + e.what());
    }

    if (is_provide(rule.intent) != rule.slot.has_value()) {
      throw Error(ErrorCode::kConfigError,
                  "rule " + rule.id + ": provide_* intents need a slot, others none");
    }
    if (rule.slot && !schema.contains(*rule.slot)) {
      throw Error(ErrorCode::kUnknownSlot, "rule " + rule.id + ": " + *rule.slot);
    }
    if (rule.expected_only && !rule.slot) {
      throw Error(ErrorCode::kConfigError, "rule " + rule.id + ": expected-only rule needs a slot");
    }
    g.rules_.push_back(std::move(rule));
  }
  return g;
}

Grammar Grammar::load_file(const std::filesystem::path& path, const SlotSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open grammar " + path.string());
  Json doc = Json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    throw Error(ErrorCode::kConfigError, "grammar is not valid JSON: " + path.string());
  }
  return load(doc, schema);
}

const Grammar& Grammar::bundled() {
  static const Grammar g = load(Json::parse(bundled::grammar()));
  return g;
}

std::optional<std::string> Grammar::apply(const Rule& rule, std::string_view utterance) const {
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_search(utterance.begin(), utterance.end(), m, rule.pattern)) {
    return std::nullopt;
  }
  if (!rule.slot) return std::string();
  if (rule.group >= static_cast<int>(m.size()) || !m[rule.group].matched) {
    return std::nullopt;
  }
  std::string value = m[rule.group].str();
  switch (rule.transform) {
    case Transform::kLower: value = lower(std::move(value)); break;
    case Transform::kTitle: value = title(std::move(value)); break;
    case Transform::kNone: break;
  }
  if (value.empty()) return std::nullopt;
  if (!rule.vocabulary.empty() &&
      std::find(rule.vocabulary.begin(), rule.vocabulary.end(), value) ==
          rule.vocabulary.end()) {
    return std::nullopt;
  }
  return value;
}

ParseResult Grammar::classify(std::string_view utterance) const {
  for (const auto& rule : rules_) {
    if (rule.expected_only) continue;
    auto value = apply(rule, utterance);
    if (!value) continue;
    ParseResult result;
    result.intent = rule.intent;
    result.matched_rule = rule.id;
    if (rule.slot) result.entities.emplace(*rule.slot, std::move(*value));
    return result;
  }
  return {};
}

std::optional<std::string> Grammar::extract_slot(std::string_view utterance,
                                                 std::string_view expected) const {
  for (const auto& rule : rules_) {
    if (!rule.slot || *rule.slot != expected) continue;
    if (auto value = apply(rule, utterance)) return value;
  }
  return std::nullopt;
}

ParseResult Grammar::parse(std::string_view utterance,
                           const std::optional<std::string>& expected) const {
  if (expected) {
    for (const auto& rule : rules_) {
      if (!rule.slot || *rule.slot != *expected) continue;
      if (auto value = apply(rule, utterance)) {
        ParseResult result;
        result.intent = rule.intent;
        result.matched_rule = rule.id;
        result.entities.emplace(*rule.slot, std::move(*value));
        return result;
      }
    }
  }
  return classify(utterance);
}

}  // namespace migrant::nlu

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

#include <gtest/gtest.h>

#include "migrant/error.hpp"

namespace migrant::nlu {
namespace {

const Grammar& g() { return Grammar::bundled(); }

ErrorCode load_error(const Json& doc) {
  try {
    Grammar::load(doc);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

TEST(Nlu, ExtractsStudySlots) {
  struct Case {
    const char* text;
    Intent intent;
    const char* slot;
    const char* value;
  };
  const Case cases[] = {
      {"My name is Alice", Intent::kProvideName, "name", "Alice"},
      {"my name is alice.", Intent::kProvideName, "name", "Alice"},
      {"Call me BOB", Intent::kProvideName, "name", "Bob"},
      {"I'm feeling nervous", Intent::kProvideFeeling, "feeling", "nervous"},
      {"I feel a bit anxious today", Intent::kProvideFeeling, "feeling", "anxious"},
      {"Coffee, please.", Intent::kProvideDrink, "drink", "coffee"},
      {"I'd love some TEA", Intent::kProvideDrink, "drink", "tea"},
      {"I am here for a job interview", Intent::kProvideVisitReason, "visit_reason",
       "job interview"},
  };
  for (const auto& c : cases) {
    const ParseResult r = g().classify(c.text);
    EXPECT_EQ(r.intent, c.intent) << c.text;
    EXPECT_EQ(r.entities.at(c.slot), c.value) << c.text;
  }
}

TEST(Nlu, FeelingIsNotAName) {
  EXPECT_EQ(g().classify("I'm nervous").intent, Intent::kProvideFeeling);
  EXPECT_EQ(g().classify("I am here for an interview").intent, Intent::kProvideVisitReason);
}

TEST(Nlu, SmallTalkAndUnknown) {
  EXPECT_EQ(g().classify("Hello there").intent, Intent::kGreeting);
  EXPECT_EQ(g().classify("yes please").intent, Intent::kAffirm);
  EXPECT_EQ(g().classify("nope").intent, Intent::kDeny);
  const ParseResult r = g().classify("Hmm, let me think about that.");
  EXPECT_EQ(r.intent, Intent::kUnknown);
  EXPECT_TRUE(r.entities.empty());
}

TEST(Nlu, BareAnswersNeedAnExpectedSlot) {
  EXPECT_EQ(g().classify("Alice").intent, Intent::kUnknown);
  const ParseResult r = g().parse("Alice", std::string("name"));
  EXPECT_EQ(r.intent, Intent::kProvideName);
  EXPECT_EQ(r.entities.at("name"), "Alice");
  EXPECT_EQ(g().parse("nervous", std::string("feeling")).entities.at("feeling"), "nervous");
  EXPECT_EQ(g().parse("an interview", std::string("visit_reason")).entities.at("visit_reason"),
            "interview");
  EXPECT_EQ(g().parse("hello", std::string("name")).intent, Intent::kGreeting);
  EXPECT_EQ(g().extract_slot("water", "drink"), "water");
  EXPECT_EQ(g().extract_slot("water", "name"), "Water");
}

TEST(Nlu, Deterministic) {
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(g().parse("My name is Alice and I feel calm", std::nullopt),
              g().parse("My name is Alice and I feel calm", std::nullopt));
  }
}

TEST(Nlu, GrammarValidation) {
  const Json ok = Json::parse(R"({"rules":[{"id":"a","intent":"greeting","pattern":"^hi"}]})");
  EXPECT_EQ(Grammar::load(ok).size(), 1u);
  EXPECT_EQ(load_error(Json::parse(
                R"j({"rules":[{"id":"a","intent":"provide_name","slot":"shoe","pattern":"(x)"}]})j")),
            ErrorCode::kUnknownSlot);
  EXPECT_EQ(load_error(Json::parse(
                R"j({"rules":[{"id":"a","intent":"provide_name","pattern":"(x)"}]})j")),
            ErrorCode::kConfigError);
  EXPECT_EQ(load_error(Json::parse(
                R"({"rules":[{"id":"a","intent":"greeting","pattern":"(x"}]})")),
            ErrorCode::kConfigError);
  EXPECT_EQ(load_error(Json::parse(
                R"({"rules":[{"id":"a","intent":"sing","pattern":"x"}]})")),
            ErrorCode::kConfigError);
}

TEST(Nlu, CustomSlotsViaSchema) {
  SlotSchema schema;
  schema.add("badge");
  const Json doc = Json::parse(
      R"j({"rules":[{"id":"b","intent":"provide_name","slot":"badge","pattern":"badge (\\d+)"}]})j");
  const Grammar custom = Grammar::load(doc, schema);
  EXPECT_EQ(custom.classify("my badge 42").entities.at("badge"), "42");
}

}  // namespace
}  // namespace migrant::nlu

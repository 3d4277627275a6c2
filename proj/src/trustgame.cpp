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

#include "migrant/trustgame.hpp"

#include <string>

#include "migrant/error.hpp"

namespace migrant::trustgame {
namespace {

void check_tokens(int n, const char* what) {
  if (n < 0 || n > kTokens) {
    throw Error(ErrorCode::kOutOfRange,
                std::string(what) + "=" + std::to_string(n) + " outside 0.." +
                    std::to_string(kTokens));
  }
}

}  // namespace

Payoff payoff(int give_self, int give_partner) {
  check_tokens(give_self, "give_self");
  check_tokens(give_partner, "give_partner");
  return {(kTokens - give_self) * kKeepValue + give_partner * kGiveValue,
          (kTokens - give_partner) * kKeepValue + give_self * kGiveValue};
}

Tau trustworthiness(int given, int predicted) {
  check_tokens(given, "given");
  check_tokens(predicted, "predicted");
  return Tau{given + predicted};
}

GameOutcome play(int given, int predicted, int agent_give) {
  const Payoff p = payoff(given, agent_give);
  const Tau tau = trustworthiness(given, predicted);
  return {given, predicted, p.self, p.partner, tau.value()};
}

double aggregate_tau(std::span<const GameOutcome> outcomes) {
  if (outcomes.size() != 3) {
    throw Error(ErrorCode::kWrongArity,
                "expected 3 games, got " + std::to_string(outcomes.size()));
  }
  double sum = 0.0;
  for (const auto& o : outcomes) sum += o.tau;
  return sum / 3.0;
}

Json to_json(const GameOutcome& outcome) {
  Json j = Json::object();
  j["given"] = outcome.given;
  j["predicted_received"] = outcome.predicted_received;
  j["payoff_self"] = outcome.payoff_self;
  j["payoff_partner"] = outcome.payoff_partner;
  j["tau"] = outcome.tau;
  return j;
}

GameOutcome outcome_from_json(const Json& j) {
  try {
    GameOutcome o;
    o.given = j.at("given").get<int>();
    o.predicted_received = j.at("predicted_received").get<int>();
    o.payoff_self = j.at("payoff_self").get<int>();
    o.payoff_partner = j.at("payoff_partner").get<int>();
    o.tau = j.at("tau").get<double>();
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, e.what());
  }
}

}  // namespace migrant::trustgame

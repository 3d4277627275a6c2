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

#ifndef MIGRANT_TRUSTGAME_HPP
#define MIGRANT_TRUSTGAME_HPP

#include <span>

#include "migrant/protocol.hpp"

namespace migrant::trustgame {

// Each player holds this many tokens. A kept token is worth $1 to its
// holder, a given token $2 to the partner.
inline constexpr int kTokens = 4;
inline constexpr int kKeepValue = 1;
inline constexpr int kGiveValue = 2;

struct Payoff {
  int self = 0;
  int partner = 0;

  friend bool operator==(const Payoff&, const Payoff&) = default;
};

// Throws kOutOfRange unless both arguments are in [0, kTokens].
Payoff payoff(int give_self, int give_partner);

// Trustworthiness as an exact fraction (given + predicted) / (2 * kTokens).
struct Tau {
  int numerator = 0;
  static constexpr int denominator = 2 * kTokens;

  double value() const { return static_cast<double>(numerator) / denominator; }
  friend bool operator==(const Tau&, const Tau&) = default;
};

Tau trustworthiness(int given, int predicted);

struct GameOutcome {
  int given = 0;
  int predicted_received = 0;
  int payoff_self = 0;
  int payoff_partner = 0;
  double tau = 0.0;

  friend bool operator==(const GameOutcome&, const GameOutcome&) = default;
};

// One game in which the agent gives agent_give tokens. Payoffs use the
// agent's actual move; tau uses the participant's prediction.
GameOutcome play(int given, int predicted, int agent_give);

// Mean tau over the three games a participant plays, one per embodiment.
// Throws kWrongArity for any other count.
double aggregate_tau(std::span<const GameOutcome> outcomes);

Json to_json(const GameOutcome& outcome);
GameOutcome outcome_from_json(const Json& j);

}  // namespace migrant::trustgame

#endif  // MIGRANT_TRUSTGAME_HPP

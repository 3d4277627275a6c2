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

#include <gtest/gtest.h>

#include "migrant/error.hpp"

namespace migrant::trustgame {
namespace {

TEST(TrustGame, PayoffTable) {
  EXPECT_EQ(payoff(4, 4), (Payoff{8, 8}));
  EXPECT_EQ(payoff(0, 0), (Payoff{4, 4}));
  EXPECT_EQ(payoff(0, 4), (Payoff{12, 0}));
  EXPECT_EQ(payoff(4, 0), (Payoff{0, 12}));
}

TEST(TrustGame, AllPairsConserveValue) {
  for (int a = 0; a <= kTokens; ++a) {
    for (int b = 0; b <= kTokens; ++b) {
      const Payoff p = payoff(a, b);
      EXPECT_EQ(p.self + p.partner, 8 + a + b);
      EXPECT_EQ(p.self, kKeepValue * (kTokens - a) + kGiveValue * b);
      EXPECT_EQ(payoff(b, a), (Payoff{p.partner, p.self}));
    }
  }
}

TEST(TrustGame, TrustworthinessIsExact) {
  for (int g = 0; g <= kTokens; ++g) {
    for (int r = 0; r <= kTokens; ++r) {
      const Tau t = trustworthiness(g, r);
      EXPECT_EQ(t.numerator, g + r);
      EXPECT_EQ(Tau::denominator, 8);
      EXPECT_EQ(t.value(), (g + r) / 8.0);
    }
  }
}

TEST(TrustGame, RangeChecks) {
  for (auto [a, b] : {std::pair{-1, 0}, {5, 0}, {0, -1}, {0, 5}}) {
    EXPECT_THROW(payoff(a, b), Error);
    EXPECT_THROW(trustworthiness(a, b), Error);
  }
  try {
    play(2, 2, 7);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
}

TEST(TrustGame, PlayAndAggregate) {
  const GameOutcome o = play(3, 1, 4);
  EXPECT_EQ(o.payoff_self, 1 + 8);
  EXPECT_EQ(o.payoff_partner, 0 + 6);
  EXPECT_EQ(o.tau, 0.5);
  EXPECT_EQ(outcome_from_json(to_json(o)), o);

  const std::vector<GameOutcome> games = {play(4, 4, 4), play(0, 0, 4), play(2, 2, 4)};
  EXPECT_DOUBLE_EQ(aggregate_tau(games), (1.0 + 0.0 + 0.5) / 3.0);
  try {
    aggregate_tau(std::span(games).first(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kWrongArity);
  }
}

}  // namespace
}  // namespace migrant::trustgame

// Copyright 2026 The Inattention Authors
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

#include <gtest/gtest.h>

#include "inattention/game.hpp"

namespace {

using namespace inattention;

ZeroSumGame two_state_game(double p_stay = 0.5) {
  // State 0 moves to 1 with probability 1 - p_stay; state 1 is absorbing.
  std::vector<std::vector<Transition>> rows = {
      {{0, p_stay}, {1, 1.0 - p_stay}}, {{1, 1.0}}, {{1, 1.0}}, {{0, 1.0}},
      {{1, 1.0}}, {{1, 1.0}}, {{1, 1.0}}, {{1, 1.0}}};
  return ZeroSumGame(2, 2, 2, std::move(rows), {1, 0, 0, 1, 0, 0, 0, 0}, 0.9, 0);
}

TEST(TransitionTable, SortsMergesAndDropsZeros) {
  TransitionTable t({{{2, 0.25}, {0, 0.5}, {2, 0.25}, {1, 0.0}}});
  auto row = t.row(0);
  ASSERT_EQ(row.size(), 2u);
  EXPECT_EQ(row[0], (Transition{0, 0.5}));
  EXPECT_EQ(row[1], (Transition{2, 0.5}));
}

TEST(ZeroSumGame, Accessors) {
  auto g = two_state_game();
  EXPECT_EQ(g.num_states(), 2u);
  EXPECT_EQ(g.reward(0, 1, 1), 1.0);
  EXPECT_EQ(g.transition(0, 1, 1).size(), 1u);
  EXPECT_EQ(g.r_max(), 1.0);
  EXPECT_TRUE(validate_game(g).empty());
  EXPECT_TRUE(g.is_absorbing_zero(1));
  EXPECT_FALSE(g.is_absorbing_zero(0));
}

TEST(ZeroSumGame, ConstructorRejectsShapeErrors) {
  EXPECT_THROW(ZeroSumGame(0, 1, 1, {}, {}, 0.9, 0), InvalidArgument);
  EXPECT_THROW(ZeroSumGame(1, 1, 1, {}, {0.0}, 0.9, 0), InvalidArgument);
  EXPECT_THROW(ZeroSumGame(1, 1, 1, {{{0, 1.0}}}, {}, 0.9, 0), InvalidArgument);
  EXPECT_THROW(ZeroSumGame(1, 1, 1, {{{1, 1.0}}}, {0.0}, 0.9, 0), InvalidArgument);
  EXPECT_THROW(ZeroSumGame(1, 1, 1, {{{0, 1.0}}}, {0.0}, 0.9, 3), InvalidArgument);
}

TEST(ZeroSumGame, ValidationReportsEveryViolation) {
  std::vector<std::vector<Transition>> rows = {{{0, 0.7}}, {{0, 1.2}, {0, -0.2}}};
  ZeroSumGame g(1, 2, 1, std::move(rows), {0.0, 2.0}, 1.0, 0, 1.0);
  auto v = validate_game(g);
  auto has = [&](Violation::Kind k) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.kind == k; });
  };
  EXPECT_TRUE(has(Violation::Kind::kDiscount));
  EXPECT_TRUE(has(Violation::Kind::kRowSum));
  EXPECT_TRUE(has(Violation::Kind::kRewardRange));
  EXPECT_THROW(require_valid(g), InvalidArgument);
}

TEST(ZeroSumGame, NegativeEntryIsReported) {
  ZeroSumGame g(2, 1, 1, {{{0, 1.5}, {1, -0.5}}, {{1, 1.0}}}, {0.0, 0.0}, 0.5, 0);
  auto v = validate_game(g);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.front().kind, Violation::Kind::kNegativeProbability);
}

TEST(ZeroSumGame, FingerprintTracksContent) {
  const auto a = two_state_game(0.5), b = two_state_game(0.5), c = two_state_game(0.25);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), c.fingerprint());
}

TEST(ZeroSumGame, LabelsMustMatchDimensions) {
  auto g = two_state_game();
  EXPECT_THROW(g.set_labels({{"only-one"}, {}, {}}), InvalidArgument);
  g.set_labels({{"a", "b"}, {"x", "y"}, {}});
  EXPECT_EQ(g.labels().states[1], "b");
}

TEST(InducedMdp, MixesRewardsAndTransitions) {
  auto g = two_state_game(0.5);
  const StationaryPolicy pi2({ActionDistribution({0.25, 0.75}), ActionDistribution::dirac(2, 0)});
  Mdp mdp = induced_mdp(g, pi2);
  EXPECT_DOUBLE_EQ(mdp.reward(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(mdp.reward(0, 1), 0.75);
  auto row = mdp.transition(0, 1);
  ASSERT_EQ(row.size(), 2u);
  EXPECT_DOUBLE_EQ(row[0].prob, 0.75);
  EXPECT_DOUBLE_EQ(row[1].prob, 0.25);
  EXPECT_TRUE(validate_mdp(mdp).empty());
}

TEST(Distributions, Validation) {
  EXPECT_THROW(ActionDistribution({0.5, 0.4}), InvalidArgument);
  EXPECT_THROW(ActionDistribution({1.1, -0.1}), InvalidArgument);
  EXPECT_THROW(Belief({}), InvalidArgument);
  EXPECT_NO_THROW(Belief({0.5, 0.5 + 1e-11}));
  EXPECT_THROW(Belief::from_weights({0.0, 0.0}), InvalidArgument);
  EXPECT_EQ(Belief::from_weights({1.0, 3.0})[1], 0.75);
  EXPECT_EQ(ActionDistribution::uniform(4)[2], 0.25);
  EXPECT_THROW(ActionDistribution::dirac(2, 2), InvalidArgument);
}

TEST(AsGame, SingleOpponentAction) {
  Mdp mdp(1, 2, {{{0, 1.0}}, {{0, 1.0}}}, {0.0, 1.0}, 0.5, 0);
  auto g = as_game(mdp);
  EXPECT_EQ(g.num_actions2(), 1u);
  EXPECT_EQ(g.reward(0, 1, 0), 1.0);
}

}  // namespace

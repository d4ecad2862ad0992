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

#include <memory>
#include <random>

#include "inattention/agents.hpp"
#include "inattention/scenarios.hpp"
#include "test_util.hpp"

namespace {

using namespace inattention;

std::shared_ptr<const EquilibriumSolution> solved(const ZeroSumGame& g) {
  return std::make_shared<const EquilibriumSolution>(game_solve(g, {1e-10}));
}

TEST(Player1Config, RejectsForeignEquilibrium) {
  Fig3Scenario a = build_fig3_game(0.5, 0.9), b = build_fig3_game(0.4, 0.9);
  EXPECT_THROW(Player1Config(a.game, solved(b.game), SelectorSpec::none()), InvalidArgument);
  Player1Config p1(a.game, solved(a.game), SelectorSpec::none());
  EXPECT_THROW(p1.check_game(b.game), InvalidArgument);
}

TEST(Player1Config, CandidateSets) {
  Fig3Scenario sc = build_fig3_game(0.5, 0.9);
  auto eq = solved(sc.game);
  Player1Config support(sc.game, eq, SelectorSpec::none(), ActionRule::kSupport);
  Player1Config qmdp(sc.game, eq, SelectorSpec::none(), ActionRule::kQmdp);
  EXPECT_EQ(qmdp.candidates().size(), 2u);
  EXPECT_LE(support.candidates().size(), sc.game.num_states());
  EXPECT_EQ(support.delta().size(), sc.game.num_states());
}

TEST(Act, QmdpPicksBeliefWeightedBest) {
  // Two absorbing states with matching rewards.
  Fig1Scenario sc = build_fig1_mdp(0.9);
  auto sol = mdp_solve(sc.mdp, 1e-10);
  EXPECT_EQ(p1_act_mdp(Belief({0.7, 0.3}), sol), Fig1Scenario::kL);
  EXPECT_EQ(p1_act_mdp(Belief({0.3, 0.7}), sol), Fig1Scenario::kR);
  EXPECT_EQ(p1_act_mdp(Belief({0.5, 0.5}), sol), Fig1Scenario::kL);  // tie: lowest index
  EXPECT_THROW(p1_act_mdp(Belief({0.5, 0.5}), std::vector<double>{1.0}, 2), InvalidArgument);
}

TEST(Act, SupportRuleOnTwoBranchGame) {
  Fig3Scenario sc = build_fig3_game(0.5, 0.9);
  auto eq = solved(sc.game);
  auto d = support_set(eq->policy1());
  EXPECT_EQ(p1_act_game(Belief::dirac(5, Fig3Scenario::kLU), *eq, d)[Fig3Scenario::kL], 1.0);
  EXPECT_EQ(p1_act_game(Belief::dirac(5, Fig3Scenario::kLD), *eq, d)[Fig3Scenario::kR], 1.0);
}

TEST(Predict, MatchesHandComputation) {
  Fig3Scenario sc = build_fig3_game(0.5, 0.9);
  auto eq = solved(sc.game);
  // pi2*(Start) = r, so the prediction from Start splits over RU and RD.
  Belief next = p1_predict(Belief::dirac(5, Fig3Scenario::kStart), 0, eq->policy2(), sc.game);
  EXPECT_DOUBLE_EQ(next[Fig3Scenario::kRU], 0.5);
  EXPECT_DOUBLE_EQ(next[Fig3Scenario::kRD], 0.5);
  // An assumed uniform opponent spreads over all four leaves.
  auto uniform = StationaryPolicy::constant(5, ActionDistribution::uniform(2));
  Belief spread = p1_predict(Belief::dirac(5, Fig3Scenario::kStart), 1, uniform, sc.game);
  for (StateIndex s = 1; s < 5; ++s) EXPECT_DOUBLE_EQ(spread[s], 0.25);
  EXPECT_THROW(p1_predict(Belief::uniform(3), 0, uniform, sc.game), InvalidArgument);
}

TEST(Deceptive, StartStillPlaysSecurityAction) {
  Fig3Scenario sc = build_fig3_game(0.5, 0.9);
  auto eq = solved(sc.game);
  Player1Config p1(sc.game, eq, SelectorSpec::weighted(StopRule::budget(1.0)));
  RandomStream rng(1);
  for (std::size_t d = 0; d < p1.candidates().size(); ++d) {
    EXPECT_EQ(p2_act(Player2Mode::kDeceptive, Fig3Scenario::kStart, p1.candidates()[d].probs(), *eq, rng),
              Fig3Scenario::kR);
  }
}

TEST(Deceptive, MinimizesBilinearScore) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    ZeroSumGame g = testutil::random_dense_game(rng, 3, 3, 4, 0.8);
    auto eq = solved(g);
    for (StateIndex s = 0; s < 3; ++s) {
      auto d1 = testutil::random_simplex(rng, 3);
      const ActionIndex a2 = deceptive_action(s, d1, *eq);
      auto scores = deceptive_scores(s, d1, *eq);
      for (double x : scores) EXPECT_LE(scores[a2], x + 1e-12);
      // Never worse for Player 2 than its equilibrium mixture.
      EXPECT_LE(scores[a2], eq->q_bilinear(s, d1, eq->policy2()[s].probs()) + 1e-12);
    }
  }
}

TEST(P2Act, EquilibriumModeSamplesPolicy) {
  std::mt19937_64 rng(62);
  ZeroSumGame g = testutil::random_dense_game(rng, 2, 3, 3, 0.5);
  auto eq = solved(g);
  RandomStream stream(5);
  std::vector<double> freq(3, 0.0);
  const std::vector<double> d1 = {1.0, 0.0, 0.0};
  for (int i = 0; i < 20000; ++i) freq[p2_act(Player2Mode::kEquilibrium, 0, d1, *eq, stream)] += 1.0 / 20000;
  for (ActionIndex a = 0; a < 3; ++a) EXPECT_NEAR(freq[a], eq->policy2()[0][a], 0.015);
  EXPECT_THROW(p2_act(Player2Mode::kEquilibrium, 7, d1, *eq, stream), InvalidArgument);
}

TEST(P2Act, BeliefOverloadAgreesWithDistribution) {
  Fig3Scenario sc = build_fig3_game(0.5, 0.9);
  auto eq = solved(sc.game);
  Player1Config p1(sc.game, eq, SelectorSpec::none());
  RandomStream rng(3);
  const Belief b = Belief::dirac(5, Fig3Scenario::kLD);
  const auto d = best_candidate(b.probs(), p1.candidate_values());
  EXPECT_EQ(p2_act(Player2Mode::kDeceptive, Fig3Scenario::kLD, b, p1, rng),
            deceptive_action(Fig3Scenario::kLD, p1.candidates()[d].probs(), *eq));
}

}  // namespace

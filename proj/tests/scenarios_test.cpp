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

#include <map>
#include <memory>
#include <sstream>

#include "inattention/harness.hpp"
#include "inattention/scenarios.hpp"

namespace {

using namespace inattention;

TEST(Fig1, WrongPriorLosesEverything) {
  for (double gamma : {0.5, 0.9}) {
    Fig1Scenario sc = build_fig1_mdp(gamma);
    ZeroSumGame g = fig1_game(sc);
    auto eq = std::make_shared<const EquilibriumSolution>(game_solve(g, {1e-12}));
    EXPECT_NEAR(eq->value(Fig1Scenario::kRight), 1.0 / (1.0 - gamma), 1e-10);
    Player1Config p1(g, eq, SelectorSpec::weighted(StopRule::budget(0.0)), ActionRule::kQmdp);
    const Belief wrong = Belief::dirac(2, Fig1Scenario::kLeft);
    const Belief truth = Belief::dirac(2, Fig1Scenario::kRight);
    auto ex = exact_eval(g, sc.bank, p1, Player2Mode::kEquilibrium, 200, wrong, truth);
    EXPECT_EQ(ex.truncated_expectation, 0.0);
    EXPECT_NEAR(eq->value(Fig1Scenario::kRight) - ex.truncated_expectation, 1.0 / (1.0 - gamma), 1e-10);
    // With the matched prior nothing is lost.
    auto ok = exact_eval(g, sc.bank, p1, Player2Mode::kEquilibrium, horizon_for(1e-12, 1.0, gamma), truth);
    EXPECT_NEAR(ok.truncated_expectation, 1.0 / (1.0 - gamma), 1e-9);
  }
}

TEST(Fig3, StructureAndSensors) {
  Fig3Scenario sc = build_fig3_game(0.5, 0.9);
  EXPECT_TRUE(validate_game(sc.game).empty());
  EXPECT_EQ(sc.bank.size(), 2u);
  EXPECT_EQ(sc.bank[0].likelihood(Fig3Scenario::kRU, 0), 1.0);
  EXPECT_EQ(sc.bank[1].likelihood(Fig3Scenario::kLD, 0), 1.0);
  EXPECT_THROW(build_fig3_game(0.0, 0.9), InvalidArgument);
  EXPECT_THROW(build_fig3_game(0.5, 1.0), InvalidArgument);
}

struct Grid : ::testing::Test {
  static void SetUpTestSuite() {
    scenario = std::make_unique<GridScenario>(build_line_defense());
    solution = std::make_shared<const EquilibriumSolution>(game_solve(scenario->game, {1e-6}));
  }
  static void TearDownTestSuite() {
    scenario.reset();
    solution.reset();
  }
  static std::unique_ptr<GridScenario> scenario;
  static std::shared_ptr<const EquilibriumSolution> solution;
};
std::unique_ptr<GridScenario> Grid::scenario;
std::shared_ptr<const EquilibriumSolution> Grid::solution;

TEST_F(Grid, Layout) {
  const GridLayout& l = scenario->layout;
  EXPECT_EQ(scenario->game.num_states(), 11u * 11u * 11u + 1u);
  EXPECT_EQ(scenario->game.num_actions1(), 3u);
  EXPECT_EQ(scenario->game.num_actions2(), 9u);
  for (StateIndex s = 0; s + 1 < l.num_states(); ++s) {
    auto c = l.decode(s);
    EXPECT_EQ(l.encode(c.x1, c.x2, c.y2), s);
  }
  auto s0 = l.decode(scenario->game.initial_state());
  EXPECT_EQ(s0.x1, 6);
  EXPECT_EQ(s0.x2, 7);
  EXPECT_EQ(s0.y2, 1);
  EXPECT_TRUE(validate_game(scenario->game).empty());
  EXPECT_TRUE(scenario->game.is_absorbing_zero(l.terminal()));
}

TEST_F(Grid, ReachingTheLinePaysOnceAndEnds) {
  const GridLayout& l = scenario->layout;
  for (int x1 = 1; x1 <= 11; ++x1) {
    for (int x2 = 1; x2 <= 11; ++x2) {
      const StateIndex s = l.encode(x1, x2, 11);
      for (ActionIndex a1 = 0; a1 < 3; ++a1) {
        for (ActionIndex a2 = 0; a2 < 9; ++a2) {
          EXPECT_EQ(scenario->game.reward(s, a1, a2), -std::abs(x1 - x2));
          auto row = scenario->game.transition(s, a1, a2);
          ASSERT_EQ(row.size(), 1u);
          EXPECT_EQ(row[0].next, l.terminal());
        }
      }
      const StateIndex inner = l.encode(x1, x2, 5);
      EXPECT_EQ(scenario->game.reward(inner, 0, 0), 0.0);
    }
  }
}

TEST_F(Grid, SensorsAreNoisyCoordinates) {
  const auto& bank = scenario->bank;
  const GridLayout& l = scenario->layout;
  const StateIndex s = l.encode(3, 1, 6);
  // x sensor at the edge: 0.7 on the truth, 0.3 on the single neighbor.
  EXPECT_DOUBLE_EQ(bank[GridScenario::kLineSensor].likelihood(s, 0), 0.7);
  EXPECT_DOUBLE_EQ(bank[GridScenario::kLineSensor].likelihood(s, 1), 0.3);
  EXPECT_DOUBLE_EQ(bank[GridScenario::kDepthSensor].likelihood(s, 5), 0.7);
  EXPECT_DOUBLE_EQ(bank[GridScenario::kDepthSensor].likelihood(s, 4), 0.15);
  EXPECT_DOUBLE_EQ(bank[GridScenario::kSelfSensor].likelihood(s, 2), 1.0);
  EXPECT_EQ(bank[GridScenario::kSelfSensor].cost(), 0.0);
}

TEST_F(Grid, SecurityValue) {
  EXPECT_NEAR(solution->value(scenario->game.initial_state()), -0.894, 0.005);
}

TEST_F(Grid, OneTerminalPaymentPerEpisode) {
  const Player1Config p1(scenario->game, solution, grid_selector(*scenario));
  const std::size_t h = default_horizon(scenario->game);
  const Belief b0 = Belief::dirac(scenario->game.num_states(), scenario->game.initial_state());
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    auto rec = run_episode(scenario->game, scenario->bank, p1, seed % 2 ? Player2Mode::kDeceptive
                                                                        : Player2Mode::kEquilibrium,
                           seed, h, b0, {false, true});
    int payments = 0;
    for (std::size_t t = 0; t < rec.steps.size(); ++t) {
      const auto& st = rec.steps[t];
      const bool on_line = scenario->layout.decode(st.state).y2 == 11;
      if (on_line) {
        ++payments;
        EXPECT_EQ(t + 1, rec.steps.size());
      } else {
        EXPECT_EQ(st.reward, 0.0);
      }
    }
    EXPECT_LE(payments, 1);
    if (rec.absorbed) {
      EXPECT_EQ(payments, 1);
    }
  }
}

TEST_F(Grid, ExperimentTables) {
  auto r = run_grid_experiment(*scenario, solution, 50, Player2Mode::kEquilibrium, 1, {1, 12});
  ASSERT_EQ(r.sensor_frequency.size(), 12u);
  EXPECT_EQ(r.sensor_frequency[0].active, 50u);
  for (const auto& f : r.sensor_frequency) EXPECT_LE(f.line + f.depth, f.active);
  std::ostringstream conf;
  write_confusion_csv(conf, r);
  EXPECT_EQ(conf.str().substr(0, conf.str().find('\n')), "t,true_coord,believed_coord,mean_belief");
  // Belief mass over believed coordinates sums to one for every (t, truth).
  std::map<std::pair<std::size_t, int>, double> mass;
  for (const auto& c : r.confusion) mass[{c.t, c.true_coord}] += c.mean_belief;
  for (const auto& [key, m] : mass) EXPECT_NEAR(m, 1.0, 1e-9);
}

TEST(RandomGames, StructureAndDeterminism) {
  RandomGameConfig cfg;
  cfg.seed = 4;
  auto a = build_random_game(cfg), b = build_random_game(cfg);
  EXPECT_EQ(a.game.fingerprint(), b.game.fingerprint());
  EXPECT_EQ(a.game.num_states(), 10u);
  EXPECT_EQ(a.game.num_actions1(), 4u);
  EXPECT_EQ(a.bank.size(), 10u);
  EXPECT_EQ(a.bank[3].alphabet_size(), 2u);
  EXPECT_TRUE(validate_game(a.game).empty());
  cfg.seed = 5;
  EXPECT_NE(build_random_game(cfg).game.fingerprint(), a.game.fingerprint());
}

TEST(RandomGames, DirichletMarginals) {
  RandomGameConfig cfg;
  double sum_entry = 0.0, sum_obs = 0.0;
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    cfg.seed = static_cast<std::uint64_t>(i);
    auto sc = build_random_game(cfg);
    auto row = sc.game.transition(2, 1, 3);
    for (const auto& t : row) if (t.next == 7) sum_entry += t.prob;
    sum_obs += sc.bank[0].likelihood(0, 0);
  }
  EXPECT_NEAR(sum_entry / kDraws, 0.1, 0.01);
  EXPECT_NEAR(sum_obs / kDraws, 0.5, 0.01);
}

TEST(RandomGames, ExperimentShape) {
  auto rows = run_random_experiment(1, 2, 11);
  EXPECT_EQ(rows.size(), 15u);
  EXPECT_EQ(rows[0].method, "perfect");
  EXPECT_EQ(rows.back().method, "no_observation");
  EXPECT_EQ(rows.back().mode, Player2Mode::kDeceptive);
  std::ostringstream os;
  write_random_experiment_csv(os, rows);
  const std::string csv = os.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 16);
  EXPECT_THROW(run_random_experiment(0, 2, 1), InvalidArgument);
}

}  // namespace

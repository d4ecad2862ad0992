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

// Concrete instances: the two-state confirmation-bias MDP, the five-state
// deception game, the line-defense grid world and random games, plus the
// experiment drivers that produce return tables and belief diagnostics.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "inattention/agents.hpp"
#include "inattention/common.hpp"
#include "inattention/equilibrium.hpp"
#include "inattention/game.hpp"
#include "inattention/harness.hpp"
#include "inattention/parallel.hpp"
#include "inattention/rng.hpp"
#include "inattention/sensing.hpp"

namespace inattention {

// ---------------------------------------------------------------------------
// Two absorbing states, matching action pays 1.

struct Fig1Scenario {
  enum State : StateIndex { kLeft = 0, kRight = 1 };
  enum Action : ActionIndex { kL = 0, kR = 1 };
  Mdp mdp;
  SensorBank bank;
};

inline Fig1Scenario build_fig1_mdp(double gamma, StateIndex initial_state = Fig1Scenario::kRight) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("build_fig1_mdp: discount outside [0, 1)");
  std::vector<std::vector<Transition>> rows = {
      {{0, 1.0}}, {{0, 1.0}},  // Left
      {{1, 1.0}}, {{1, 1.0}},  // Right
  };
  std::vector<double> rewards = {1.0, 0.0, 0.0, 1.0};
  Mdp mdp(2, 2, std::move(rows), std::move(rewards), gamma, initial_state);
  SensorBank bank({Sensor({"null"}, {{1.0}, {1.0}}, 0.0)}, 0.0);
  return {std::move(mdp), std::move(bank)};
}

inline ZeroSumGame fig1_game(const Fig1Scenario& sc) {
  ZeroSumGame game = as_game(sc.mdp);
  game.set_labels({{"Left", "Right"}, {"l", "r"}, {"a"}});
  return game;
}

// ---------------------------------------------------------------------------
// Start branches on Player 2's action to the left or right pair of leaves.

struct Fig3Scenario {
  enum State : StateIndex { kStart = 0, kLU = 1, kLD = 2, kRU = 3, kRD = 4 };
  enum Action : ActionIndex { kL = 0, kR = 1 };
  ZeroSumGame game;
  SensorBank bank;
};

inline Fig3Scenario build_fig3_game(double epsilon, double gamma) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidArgument("build_fig3_game: epsilon outside (0, 1)");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("build_fig3_game: discount outside [0, 1)");
  constexpr std::size_t n_s = 5, n_a = 2;
  std::vector<std::vector<Transition>> rows(n_s * n_a * n_a);
  std::vector<double> rewards(n_s * n_a * n_a, 0.0);
  auto idx = [](StateIndex s, ActionIndex a1, ActionIndex a2) { return (s * n_a + a1) * n_a + a2; };
  for (ActionIndex a1 = 0; a1 < n_a; ++a1) {
    rows[idx(Fig3Scenario::kStart, a1, Fig3Scenario::kL)] = {{Fig3Scenario::kLU, 0.5}, {Fig3Scenario::kLD, 0.5}};
    rows[idx(Fig3Scenario::kStart, a1, Fig3Scenario::kR)] = {{Fig3Scenario::kRU, 0.5}, {Fig3Scenario::kRD, 0.5}};
    for (StateIndex s = 1; s < n_s; ++s) {
      for (ActionIndex a2 = 0; a2 < n_a; ++a2) rows[idx(s, a1, a2)] = {{s, 1.0}};
    }
  }
  for (ActionIndex a2 = 0; a2 < n_a; ++a2) {
    rewards[idx(Fig3Scenario::kLU, Fig3Scenario::kL, a2)] = 1.0;
    rewards[idx(Fig3Scenario::kLD, Fig3Scenario::kR, a2)] = 1.0;
    rewards[idx(Fig3Scenario::kRU, Fig3Scenario::kR, a2)] = 1.0 - epsilon;
    rewards[idx(Fig3Scenario::kRD, Fig3Scenario::kL, a2)] = 1.0 - epsilon;
  }
  ZeroSumGame game(n_s, n_a, n_a, std::move(rows), std::move(rewards), gamma, Fig3Scenario::kStart);
  game.set_labels({{"Start", "LU", "LD", "RU", "RD"}, {"l", "r"}, {"l", "r"}});

  auto indicator = [](std::array<bool, n_s> on) {
    std::vector<std::vector<double>> rows(n_s);
    for (std::size_t s = 0; s < n_s; ++s) rows[s] = on[s] ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
    return rows;
  };
  SensorBank bank({Sensor({"s1:True", "s1:False"}, indicator({false, true, false, true, false}), 1.0),
                   Sensor({"s2:True", "s2:False"}, indicator({false, true, true, false, false}), 1.0)},
                  1.0);
  return {std::move(game), std::move(bank)};
}

// ---------------------------------------------------------------------------
// Line defense. Player 1 patrols the defense line (row `height`), Player 2
// starts deep in the field and tries to reach the line far from Player 1.

// kAttacker: only the attacker's move can fail; the defender slides along
// the line deterministically. kShared: one draw per step decides whether
// both moves happen. kIndependent: each move succeeds on its own draw.
enum class MoveNoise { kAttacker, kShared, kIndependent };

struct GridConfig {
  int width = 11;
  int height = 11;
  int p1_start = 6;                 // line coordinate of the defender
  std::array<int, 2> p2_start = {7, 1};  // attacker (line coordinate, depth)
  double move_success = 0.9;
  MoveNoise move_noise = MoveNoise::kAttacker;
  double sensor_true = 0.7;
  double sensor_adjacent = 0.3;
  double line_sensor_cost = 1.0;
  double depth_sensor_cost = 1.0;
  double self_sensor_cost = 0.0;
  double budget = 1.0;
  double gamma = 0.99;
};

// Dense index <-> (defender x, attacker x, attacker depth) mapping. Depth
// `height` is the defense line; the last index is the absorbing terminal.
class GridLayout {
 public:
  GridLayout(int width, int height) : width_(width), height_(height) {}

  std::size_t num_states() const { return static_cast<std::size_t>(width_) * width_ * height_ + 1; }
  StateIndex terminal() const { return num_states() - 1; }
  int width() const { return width_; }
  int height() const { return height_; }

  // Coordinates are 1-based.
  StateIndex encode(int x1, int x2, int y2) const {
    return static_cast<StateIndex>(((x1 - 1) * height_ + (y2 - 1)) * width_ + (x2 - 1));
  }
  struct Cell {
    int x1, x2, y2;
  };
  Cell decode(StateIndex s) const {
    const int x2 = static_cast<int>(s % width_) + 1;
    const int y2 = static_cast<int>((s / width_) % height_) + 1;
    const int x1 = static_cast<int>(s / (static_cast<std::size_t>(width_) * height_)) + 1;
    return {x1, x2, y2};
  }

 private:
  int width_;
  int height_;
};

struct GridScenario {
  enum SensorId : SensorIndex { kLineSensor = 0, kDepthSensor = 1, kSelfSensor = 2 };
  GridConfig config;
  GridLayout layout;
  ZeroSumGame game;
  SensorBank bank;
};

namespace detail {

// Coordinate reading: true value with `p_true`, the rest split over the
// in-range neighbors.
inline std::vector<double> noisy_coordinate(int value, int extent, double p_true, double p_adjacent) {
  std::vector<double> row(static_cast<std::size_t>(extent) + 1, 0.0);  // last symbol: terminal
  const bool has_lo = value > 1, has_hi = value < extent;
  const int neighbors = int(has_lo) + int(has_hi);
  row[value - 1] = neighbors == 0 ? 1.0 : p_true;
  if (has_lo) row[value - 2] = p_adjacent / neighbors;
  if (has_hi) row[value] = p_adjacent / neighbors;
  return row;
}

inline void add_move(std::vector<Transition>& out, StateIndex next, double p) {
  for (Transition& t : out) {
    if (t.next == next) {
      t.prob += p;
      return;
    }
  }
  out.push_back({next, p});
}

}  // namespace detail

inline GridScenario build_line_defense(const GridConfig& cfg = {}) {
  const int w = cfg.width, h = cfg.height;
  if (w < 1 || h < 2) throw InvalidArgument("build_line_defense: grid too small");
  if (cfg.p1_start < 1 || cfg.p1_start > w) throw InvalidArgument("build_line_defense: invalid p1_start");
  if (cfg.p2_start[0] < 1 || cfg.p2_start[0] > w || cfg.p2_start[1] < 1 || cfg.p2_start[1] >= h) {
    throw InvalidArgument("build_line_defense: invalid p2_start");
  }
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!unit(cfg.move_success) || !unit(cfg.sensor_true) || !unit(cfg.sensor_adjacent) ||
      std::abs(cfg.sensor_true + cfg.sensor_adjacent - 1.0) > kInputProbTolerance) {
    throw InvalidArgument("build_line_defense: inconsistent probabilities");
  }
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw InvalidArgument("build_line_defense: discount outside [0, 1)");

  GridLayout layout(w, h);
  const std::size_t n_s = layout.num_states();
  constexpr std::size_t n_a1 = 3, n_a2 = 9;
  static constexpr std::array<int, n_a1> kDefenderDx = {0, -1, 1};
  // Straight ahead first: among equally good moves the stage solver keeps
  // the lowest-index one.
  static constexpr std::array<std::array<int, 2>, n_a2> kAttackerMove = {
      {{0, 1}, {-1, 1}, {1, 1}, {-1, 0}, {1, 0}, {0, 0}, {-1, -1}, {0, -1}, {1, -1}}};
  auto clip = [](int v, int hi) { return std::clamp(v, 1, hi); };

  std::vector<std::vector<Transition>> rows(n_s * n_a1 * n_a2);
  std::vector<double> rewards(n_s * n_a1 * n_a2, 0.0);
  const double p = cfg.move_success, q = 1.0 - cfg.move_success;
  for (StateIndex s = 0; s < n_s; ++s) {
    for (ActionIndex a1 = 0; a1 < n_a1; ++a1) {
      for (ActionIndex a2 = 0; a2 < n_a2; ++a2) {
        const std::size_t r = (s * n_a1 + a1) * n_a2 + a2;
        if (s == layout.terminal()) {
          rows[r] = {{s, 1.0}};
          continue;
        }
        const auto c = layout.decode(s);
        if (c.y2 == h) {
          rewards[r] = -std::abs(c.x1 - c.x2);
          rows[r] = {{layout.terminal(), 1.0}};
          continue;
        }
        const int x1t = clip(c.x1 + kDefenderDx[a1], w);
        const int x2t = clip(c.x2 + kAttackerMove[a2][0], w);
        const int y2t = clip(c.y2 + kAttackerMove[a2][1], h);
        std::vector<Transition> out;
        for (int d1 = 0; d1 < 2; ++d1) {
          for (int d2 = 0; d2 < 2; ++d2) {
            double pr = (d1 ? q : p) * (d2 ? q : p);
            if (cfg.move_noise == MoveNoise::kShared) {
              if (d1 != d2) continue;
              pr = d1 ? q : p;
            } else if (cfg.move_noise == MoveNoise::kAttacker) {
              if (d1) continue;
              pr = d2 ? q : p;
            }
            if (pr == 0.0) continue;
            detail::add_move(out, layout.encode(d1 ? c.x1 : x1t, d2 ? c.x2 : x2t, d2 ? c.y2 : y2t), pr);
          }
        }
        rows[r] = std::move(out);
      }
    }
  }
  const StateIndex s0 = layout.encode(cfg.p1_start, cfg.p2_start[0], cfg.p2_start[1]);
  ZeroSumGame game(n_s, n_a1, n_a2, std::move(rows), std::move(rewards), cfg.gamma, s0);
  GameLabels labels;
  labels.actions1 = {"stay", "left", "right"};
  labels.actions2 = {"ahead", "ahead-left", "ahead-right", "left", "right",
                     "stay",  "back-left", "back", "back-right"};
  labels.states.reserve(n_s);
  for (StateIndex s = 0; s + 1 < n_s; ++s) {
    const auto c = layout.decode(s);
    labels.states.push_back("p1=" + std::to_string(c.x1) + ",p2=(" + std::to_string(c.x2) + "," +
                            std::to_string(c.y2) + ")");
  }
  labels.states.push_back("terminal");
  game.set_labels(std::move(labels));

  auto names = [](const std::string& prefix, int extent) {
    std::vector<std::string> out;
    for (int v = 1; v <= extent; ++v) out.push_back(prefix + std::to_string(v));
    out.push_back(prefix + "end");
    return out;
  };
  std::vector<std::vector<double>> line(n_s), depth(n_s), self(n_s);
  for (StateIndex s = 0; s < n_s; ++s) {
    if (s == layout.terminal()) {
      line[s].assign(w + 1, 0.0);
      line[s][w] = 1.0;
      depth[s].assign(h + 1, 0.0);
      depth[s][h] = 1.0;
      self[s].assign(w + 1, 0.0);
      self[s][w] = 1.0;
      continue;
    }
    const auto c = layout.decode(s);
    line[s] = detail::noisy_coordinate(c.x2, w, cfg.sensor_true, cfg.sensor_adjacent);
    depth[s] = detail::noisy_coordinate(c.y2, h, cfg.sensor_true, cfg.sensor_adjacent);
    self[s].assign(w + 1, 0.0);
    self[s][c.x1 - 1] = 1.0;
  }
  SensorBank bank({Sensor(names("x=", w), std::move(line), cfg.line_sensor_cost),
                   Sensor(names("y=", h), std::move(depth), cfg.depth_sensor_cost),
                   Sensor(names("p1=", w), std::move(self), cfg.self_sensor_cost)},
                  cfg.budget);
  return {cfg, layout, std::move(game), std::move(bank)};
}

// Player 1's selector in the grid world: the free self-position sensor plus
// the best paid sensor within budget.
inline SelectorSpec grid_selector(const GridScenario& sc) {
  return SelectorSpec::weighted(StopRule::budget(sc.config.budget), {GridScenario::kSelfSensor});
}

// ---------------------------------------------------------------------------
// Random games.

struct RandomGameConfig {
  std::size_t n_states = 10;
  std::size_t n_actions = 4;
  std::size_t n_sensors = 10;
  std::size_t obs_per_sensor = 2;
  double gamma = 0.9;
  std::uint64_t seed = 0;
};

struct RandomGameScenario {
  ZeroSumGame game;
  SensorBank bank;
  Belief initial_belief;
};

namespace detail {

// Uniform draw from the probability simplex (flat Dirichlet).
inline std::vector<double> simplex_draw(RandomStream& rng, std::size_t n) {
  std::vector<double> x(n);
  double total = 0.0;
  for (double& v : x) {
    v = -std::log(rng.uniform_open_zero());
    total += v;
  }
  for (double& v : x) v /= total;
  return x;
}

}  // namespace detail

inline RandomGameScenario build_random_game(const RandomGameConfig& cfg) {
  if (cfg.n_states == 0 || cfg.n_actions == 0 || cfg.n_sensors == 0 || cfg.obs_per_sensor == 0) {
    throw InvalidArgument("build_random_game: all counts must be at least 1");
  }
  if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw InvalidArgument("build_random_game: discount outside [0, 1)");
  const RandomStream root = RandomStream(detail::splitmix64(cfg.seed ^ 0x9e3779b97f4a7c15ULL));
  RandomStream trans_rng = root.substream("transitions");
  RandomStream reward_rng = root.substream("rewards");
  RandomStream sensor_rng = root.substream("sensors");
  RandomStream init_rng = root.substream("initial");

  const std::size_t n_s = cfg.n_states, n_a = cfg.n_actions;
  std::vector<std::vector<Transition>> rows(n_s * n_a * n_a);
  std::vector<double> rewards(n_s * n_a * n_a);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    auto probs = detail::simplex_draw(trans_rng, n_s);
    rows[r].reserve(n_s);
    for (StateIndex s = 0; s < n_s; ++s) rows[r].push_back({s, probs[s]});
    rewards[r] = reward_rng.uniform();
  }
  const auto s0 = static_cast<StateIndex>(init_rng.below(n_s));
  // Rewards lie in [0, 1]; use 1 as the reward bound for every instance.
  ZeroSumGame game(n_s, n_a, n_a, std::move(rows), std::move(rewards), cfg.gamma, s0, 1.0);

  std::vector<Sensor> sensors;
  sensors.reserve(cfg.n_sensors);
  for (std::size_t i = 0; i < cfg.n_sensors; ++i) {
    std::vector<std::string> alphabet;
    for (std::size_t w = 0; w < cfg.obs_per_sensor; ++w) {
      alphabet.push_back("o" + std::to_string(i) + ":" + std::to_string(w));
    }
    std::vector<std::vector<double>> lik(n_s);
    for (auto& row : lik) row = detail::simplex_draw(sensor_rng, cfg.obs_per_sensor);
    sensors.emplace_back(std::move(alphabet), std::move(lik), 1.0);
  }
  SensorBank bank(std::move(sensors), static_cast<double>(cfg.n_sensors));
  return {std::move(game), std::move(bank), Belief::dirac(n_s, s0)};
}

// ---------------------------------------------------------------------------
// Experiment drivers.

struct SensorFrequency {
  std::size_t t = 0;
  std::size_t active = 0;  // episodes still running at t
  std::size_t line = 0;
  std::size_t depth = 0;
};

struct ConfusionCell {
  std::size_t t = 0;
  int true_coord = 0;
  int believed_coord = 0;
  double mean_belief = 0.0;
};

struct GridExperimentResult {
  Player2Mode mode = Player2Mode::kEquilibrium;
  ReturnEstimate estimate;
  std::vector<SensorFrequency> sensor_frequency;  // one entry per step index
  std::vector<ConfusionCell> confusion;
  std::size_t surprises = 0;
  std::size_t horizon = 0;
};

struct GridExperimentOptions {
  std::size_t threads = 1;
  std::size_t max_steps_reported = 30;
};

// Runs n episodes of the grid world. Per step it records which paid sensor
// was selected and Player 1's posterior marginal over the attacker's line
// coordinate, grouped by the true line coordinate.
inline GridExperimentResult run_grid_experiment(const GridScenario& sc,
                                                std::shared_ptr<const EquilibriumSolution> eq,
                                                std::size_t n_runs, Player2Mode mode,
                                                std::uint64_t seed,
                                                const GridExperimentOptions& options = {}) {
  const Player1Config p1(sc.game, std::move(eq), grid_selector(sc));
  const std::size_t horizon = default_horizon(sc.game);
  const Belief b0 = Belief::dirac(sc.game.num_states(), sc.game.initial_state());
  std::vector<EpisodeRecord> records(n_runs);
  parallel_for(n_runs, options.threads, [&](std::size_t i) {
    records[i] = run_episode(sc.game, sc.bank, p1, mode, seed + i, horizon, b0, {true, true});
  });

  GridExperimentResult out;
  out.mode = mode;
  out.horizon = horizon;
  std::vector<double> returns(n_runs);
  for (std::size_t i = 0; i < n_runs; ++i) {
    returns[i] = records[i].discounted_return;
    out.surprises += records[i].surprises.size();
  }
  out.estimate = summarize_returns(returns);

  const int w = sc.layout.width();
  const std::size_t t_max = options.max_steps_reported;
  out.sensor_frequency.resize(t_max);
  // mass[t][true x][believed x], count[t][true x]
  std::vector<double> mass(t_max * w * w, 0.0);
  std::vector<std::size_t> count(t_max * w, 0);
  for (const EpisodeRecord& rec : records) {
    for (const StepRecord& st : rec.steps) {
      if (st.t >= t_max) break;
      auto& f = out.sensor_frequency[st.t];
      ++f.active;
      for (SensorIndex i : st.sensors) {
        if (i == GridScenario::kLineSensor) ++f.line;
        if (i == GridScenario::kDepthSensor) ++f.depth;
      }
      if (st.state == sc.layout.terminal()) continue;
      const int tx = sc.layout.decode(st.state).x2;
      ++count[st.t * w + (tx - 1)];
      for (std::size_t k = 0; k < st.posterior.states.size(); ++k) {
        const StateIndex s = st.posterior.states[k];
        if (s == sc.layout.terminal()) continue;
        const int bx = sc.layout.decode(s).x2;
        mass[(st.t * w + (tx - 1)) * w + (bx - 1)] += st.posterior.probs[k];
      }
    }
  }
  for (std::size_t t = 0; t < t_max; ++t) {
    out.sensor_frequency[t].t = t;
    for (int tx = 1; tx <= w; ++tx) {
      const std::size_t n = count[t * w + (tx - 1)];
      if (n == 0) continue;
      for (int bx = 1; bx <= w; ++bx) {
        out.confusion.push_back({t, tx, bx, mass[(t * w + (tx - 1)) * w + (bx - 1)] / static_cast<double>(n)});
      }
    }
  }
  return out;
}

// Fraction of paid-sensor selections that picked the depth sensor over
// steps t < t_end.
inline double depth_sensor_share(const GridExperimentResult& r, std::size_t t_end) {
  std::size_t line = 0, depth = 0;
  for (const auto& f : r.sensor_frequency) {
    if (f.t >= t_end) break;
    line += f.line;
    depth += f.depth;
  }
  return line + depth == 0 ? 0.0 : static_cast<double>(depth) / static_cast<double>(line + depth);
}

inline void write_sensor_frequency_csv(std::ostream& os, const GridExperimentResult& r) {
  os << "t,active,line_sensor,depth_sensor,line_share,depth_share\n";
  const auto old = os.precision(12);
  for (const auto& f : r.sensor_frequency) {
    const double n = static_cast<double>(f.line + f.depth);
    os << f.t << ',' << f.active << ',' << f.line << ',' << f.depth << ','
       << (n > 0 ? f.line / n : 0.0) << ',' << (n > 0 ? f.depth / n : 0.0) << '\n';
  }
  os.precision(old);
}

inline void write_confusion_csv(std::ostream& os, const GridExperimentResult& r) {
  os << "t,true_coord,believed_coord,mean_belief\n";
  const auto old = os.precision(12);
  for (const auto& c : r.confusion) {
    os << c.t << ',' << c.true_coord << ',' << c.believed_coord << ',' << c.mean_belief << '\n';
  }
  os.precision(old);
}

// One selection method of the random-game comparison.
struct RandomMethod {
  std::string name;
  SelectorKind kind;
  std::size_t k;
};

inline std::vector<RandomMethod> random_methods() {
  return {{"perfect", SelectorKind::kPerfect, 0},
          {"weighted_k2", SelectorKind::kWeighted, 2},
          {"non_weighted_k2", SelectorKind::kNonWeighted, 2},
          {"random_k2", SelectorKind::kRandom, 2},
          {"weighted_k1", SelectorKind::kWeighted, 1},
          {"non_weighted_k1", SelectorKind::kNonWeighted, 1},
          {"random_k1", SelectorKind::kRandom, 1},
          {"no_observation", SelectorKind::kNone, 0}};
}

inline SelectorSpec selector_for(const RandomMethod& m) {
  switch (m.kind) {
    case SelectorKind::kWeighted:
      return SelectorSpec::weighted(StopRule::budget(static_cast<double>(m.k)));
    case SelectorKind::kNonWeighted:
      return SelectorSpec::non_weighted(m.k);
    case SelectorKind::kRandom:
      return SelectorSpec::random(m.k);
    case SelectorKind::kNone:
      return SelectorSpec::none();
    case SelectorKind::kAll:
      return SelectorSpec::all();
    case SelectorKind::kPerfect:
      return SelectorSpec::perfect();
  }
  return SelectorSpec::none();
}

struct RandomExperimentRow {
  std::string method;
  Player2Mode mode = Player2Mode::kEquilibrium;
  double mean = 0.0;         // over games of the per-game mean return
  double sd_over_games = 0.0;
  double half_width = 0.0;   // 1.96 sd / sqrt(games)
  std::size_t games = 0;
  std::size_t runs = 0;
};

struct RandomExperimentOptions {
  std::size_t threads = 1;
  RandomGameConfig game_template = {};
  double solve_tol = 1e-6;
};

inline std::uint64_t random_game_seed(std::uint64_t seed, std::size_t game_index) {
  return detail::splitmix64(seed * 0x100000001b3ULL + game_index);
}

// Mean return per (method, Player 2 mode) over n_games random games with
// n_runs episodes each. The perfect-state method is reported once, under
// equilibrium play, since both Player 2 rules coincide there.
inline std::vector<RandomExperimentRow> run_random_experiment(std::size_t n_games, std::size_t n_runs,
                                                              std::uint64_t seed,
                                                              const RandomExperimentOptions& options = {}) {
  if (n_games == 0 || n_runs < 2) throw InvalidArgument("run_random_experiment: need games >= 1 and runs >= 2");
  const auto methods = random_methods();
  struct Cell {
    std::size_t method;
    Player2Mode mode;
  };
  std::vector<Cell> cells;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    cells.push_back({m, Player2Mode::kEquilibrium});
    if (methods[m].kind != SelectorKind::kPerfect) cells.push_back({m, Player2Mode::kDeceptive});
  }
  // per_game[g][cell]
  std::vector<std::vector<double>> per_game(n_games, std::vector<double>(cells.size(), 0.0));
  parallel_for(n_games, options.threads, [&](std::size_t g) {
    RandomGameConfig cfg = options.game_template;
    cfg.seed = random_game_seed(seed, g);
    RandomGameScenario sc = build_random_game(cfg);
    auto eq = std::make_shared<const EquilibriumSolution>(game_solve(sc.game, {options.solve_tol}));
    const std::size_t horizon = default_horizon(sc.game);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const Player1Config p1(sc.game, eq, selector_for(methods[cells[c].method]));
      const std::uint64_t base = detail::splitmix64(cfg.seed ^ (0xa0761d6478bd642fULL + c));
      per_game[g][c] = estimate_return(n_runs, base, sc.game, sc.bank, p1, cells[c].mode, horizon,
                                       sc.initial_belief)
                           .mean;
    }
  });
  std::vector<RandomExperimentRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::vector<double> means(n_games);
    for (std::size_t g = 0; g < n_games; ++g) means[g] = per_game[g][c];
    const ReturnEstimate e = summarize_returns(means);
    rows.push_back({methods[cells[c].method].name, cells[c].mode, e.mean, e.sd, e.half_width, n_games, n_runs});
  }
  return rows;
}

inline void write_random_experiment_csv(std::ostream& os, const std::vector<RandomExperimentRow>& rows) {
  os << "method,p2_mode,mean_return,sd_over_games,ci_half_width,games,runs_per_game\n";
  const auto old = os.precision(12);
  for (const auto& r : rows) {
    os << r.method << ',' << to_string(r.mode) << ',' << r.mean << ',' << r.sd_over_games << ','
       << r.half_width << ',' << r.games << ',' << r.runs << '\n';
  }
  os.precision(old);
}

}  // namespace inattention

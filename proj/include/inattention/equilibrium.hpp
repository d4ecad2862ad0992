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

// Optimal MDP values, Shapley value iteration for zero-sum stochastic games,
// the equilibrium support set of Player 1 and the per-state Q spread.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "inattention/common.hpp"
#include "inattention/game.hpp"
#include "inattention/matrix_game.hpp"
#include "inattention/parallel.hpp"

namespace inattention {

inline constexpr std::size_t kDefaultMaxIterations = 10'000'000;

// Sup-norm residual that guarantees ||V - V*|| <= tol for a gamma-contraction.
inline double residual_target(double tol, double gamma) {
  return gamma == 0.0 ? std::numeric_limits<double>::infinity() : tol * (1.0 - gamma) / gamma;
}

struct MdpSolution {
  std::vector<double> values;
  std::vector<double> q;  // [s * num_actions + a]
  StationaryPolicy policy;
  double residual = 0.0;
  std::size_t iterations = 0;

  double q_value(StateIndex s, ActionIndex a) const { return q[s * num_actions + a]; }
  std::size_t num_actions = 0;
};

namespace detail {

inline double backup(const Mdp& mdp, std::span<const double> v, StateIndex s, ActionIndex a) {
  double acc = 0.0;
  for (const Transition& t : mdp.transition(s, a)) acc += t.prob * v[t.next];
  return mdp.reward(s, a) + mdp.gamma() * acc;
}

// Lowest index among maximizers, ignoring differences below `slack`.
inline std::size_t argmax_lowest(std::span<const double> values, double slack = 0.0) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best] + slack) best = i;
  }
  return best;
}

}  // namespace detail

// Value iteration to a residual that certifies ||V - V*|| <= tol.
inline MdpSolution mdp_solve(const Mdp& mdp, double tol = 1e-6,
                             std::size_t max_iterations = kDefaultMaxIterations) {
  auto violations = validate_mdp(mdp);
  if (!violations.empty()) throw InvalidArgument("mdp_solve: " + violations.front().message);
  const std::size_t n_s = mdp.num_states();
  const std::size_t n_a = mdp.num_actions();
  const double target = residual_target(tol, mdp.gamma());
  std::vector<double> v(n_s, 0.0), next(n_s, 0.0);
  double residual = std::numeric_limits<double>::infinity();
  std::size_t it = 0;
  while (true) {
    if (it >= max_iterations) throw NumericalError("mdp_solve: iteration cap exceeded");
    residual = 0.0;
    for (StateIndex s = 0; s < n_s; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (ActionIndex a = 0; a < n_a; ++a) best = std::max(best, detail::backup(mdp, v, s, a));
      next[s] = best;
      residual = std::max(residual, std::abs(best - v[s]));
    }
    v.swap(next);
    ++it;
    if (residual <= target) break;
  }
  std::vector<double> q(n_s * n_a);
  std::vector<ActionDistribution> greedy;
  greedy.reserve(n_s);
  for (StateIndex s = 0; s < n_s; ++s) {
    for (ActionIndex a = 0; a < n_a; ++a) q[s * n_a + a] = detail::backup(mdp, v, s, a);
    const std::size_t best = detail::argmax_lowest({q.data() + s * n_a, n_a}, 1e-12);
    greedy.push_back(ActionDistribution::dirac(n_a, best));
  }
  return MdpSolution{std::move(v), std::move(q), StationaryPolicy(std::move(greedy)), residual, it,
                     n_a};
}

// Value of a fixed stationary policy in an MDP by iterating its Bellman
// operator to a residual certifying ||V - V^pi|| <= tol.
inline std::vector<double> evaluate_policy(const Mdp& mdp, const StationaryPolicy& policy,
                                           double tol = 1e-9,
                                           std::size_t max_iterations = kDefaultMaxIterations) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions()) {
    throw InvalidArgument("evaluate_policy: policy dimensions do not match the MDP");
  }
  const double target = residual_target(tol, mdp.gamma());
  std::vector<double> v(mdp.num_states(), 0.0), next(mdp.num_states(), 0.0);
  for (std::size_t it = 0;; ++it) {
    if (it >= max_iterations) throw NumericalError("evaluate_policy: iteration cap exceeded");
    double residual = 0.0;
    for (StateIndex s = 0; s < mdp.num_states(); ++s) {
      double acc = 0.0;
      for (ActionIndex a = 0; a < mdp.num_actions(); ++a) {
        if (policy[s][a] != 0.0) acc += policy[s][a] * detail::backup(mdp, v, s, a);
      }
      next[s] = acc;
      residual = std::max(residual, std::abs(acc - v[s]));
    }
    v.swap(next);
    if (residual <= target) break;
  }
  return v;
}

// Equilibrium of a zero-sum stochastic game together with its Q tensor.
class EquilibriumSolution {
 public:
  EquilibriumSolution(std::size_t num_states, std::size_t num_actions1, std::size_t num_actions2,
                      double gamma, std::vector<double> values, StationaryPolicy policy1,
                      StationaryPolicy policy2, std::vector<double> q_tensor, double residual,
                      std::vector<double> residual_history, std::uint64_t game_fingerprint)
      : num_states_(num_states),
        num_actions1_(num_actions1),
        num_actions2_(num_actions2),
        gamma_(gamma),
        values_(std::move(values)),
        policy1_(std::move(policy1)),
        policy2_(std::move(policy2)),
        q_(std::move(q_tensor)),
        residual_(residual),
        residual_history_(std::move(residual_history)),
        fingerprint_(game_fingerprint) {
    if (values_.size() != num_states || q_.size() != num_states * num_actions1 * num_actions2 ||
        policy1_.num_states() != num_states || policy2_.num_states() != num_states ||
        policy1_.num_actions() != num_actions1 || policy2_.num_actions() != num_actions2) {
      throw InvalidArgument("EquilibriumSolution: inconsistent dimensions");
    }
  }

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions1() const { return num_actions1_; }
  std::size_t num_actions2() const { return num_actions2_; }
  double gamma() const { return gamma_; }
  std::span<const double> values() const { return values_; }
  double value(StateIndex s) const { return values_[s]; }
  const StationaryPolicy& policy1() const { return policy1_; }
  const StationaryPolicy& policy2() const { return policy2_; }
  double residual() const { return residual_; }
  std::span<const double> residual_history() const { return residual_history_; }
  std::size_t sweeps() const { return residual_history_.size(); }
  std::uint64_t game_fingerprint() const { return fingerprint_; }
  std::span<const double> q_tensor() const { return q_; }

  // Q*(s, a1, a2) = r(s, a1, a2) + gamma * E[V*(s')]
  double q(StateIndex s, ActionIndex a1, ActionIndex a2) const {
    return q_[(s * num_actions1_ + a1) * num_actions2_ + a2];
  }

  MatrixGame stage_game(StateIndex s) const {
    const std::size_t block = num_actions1_ * num_actions2_;
    return MatrixGame(num_actions1_, num_actions2_,
                      std::vector<double>(q_.begin() + static_cast<std::ptrdiff_t>(s * block),
                                          q_.begin() + static_cast<std::ptrdiff_t>((s + 1) * block)));
  }

  // d1^T Q*(s) d2
  double q_bilinear(StateIndex s, std::span<const double> d1, std::span<const double> d2) const {
    double acc = 0.0;
    for (ActionIndex a1 = 0; a1 < num_actions1_; ++a1) {
      if (d1[a1] == 0.0) continue;
      double row = 0.0;
      for (ActionIndex a2 = 0; a2 < num_actions2_; ++a2) row += q(s, a1, a2) * d2[a2];
      acc += d1[a1] * row;
    }
    return acc;
  }

  // Q*(s, d1): Player 1 opens with d1, Player 2 plays its equilibrium.
  double q_against_equilibrium(StateIndex s, std::span<const double> d1) const {
    return q_bilinear(s, d1, policy2_[s].probs());
  }

 private:
  std::size_t num_states_;
  std::size_t num_actions1_;
  std::size_t num_actions2_;
  double gamma_;
  std::vector<double> values_;
  StationaryPolicy policy1_;
  StationaryPolicy policy2_;
  std::vector<double> q_;
  double residual_;
  std::vector<double> residual_history_;
  std::uint64_t fingerprint_;
};

struct GameSolveOptions {
  double tol = 1e-6;
  std::size_t max_sweeps = kDefaultMaxIterations;
  std::size_t threads = 1;
};

namespace detail {

inline void fill_stage_matrix(const ZeroSumGame& game, std::span<const double> v, StateIndex s,
                              MatrixGame& out) {
  for (ActionIndex a1 = 0; a1 < game.num_actions1(); ++a1) {
    for (ActionIndex a2 = 0; a2 < game.num_actions2(); ++a2) {
      double acc = 0.0;
      for (const Transition& t : game.transition(s, a1, a2)) acc += t.prob * v[t.next];
      out(a1, a2) = game.reward(s, a1, a2) + game.gamma() * acc;
    }
  }
}

}  // namespace detail

// Shapley value iteration: V <- val[r + gamma P V] state by state until the
// sup-norm residual certifies ||V - V*|| <= tol. A final sweep on the
// converged V produces the stage strategies and the Q tensor.
inline EquilibriumSolution game_solve(const ZeroSumGame& game, const GameSolveOptions& options = {}) {
  require_valid(game);
  const std::size_t n_s = game.num_states();
  const std::size_t n_a1 = game.num_actions1();
  const std::size_t n_a2 = game.num_actions2();
  const double target = residual_target(options.tol, game.gamma());
  const double stage_tol =
      1e-9 * std::max(1.0, game.r_max() / std::max(1e-12, 1.0 - game.gamma()));

  std::vector<double> v(n_s, 0.0), next(n_s, 0.0);
  std::vector<double> history;
  auto sweep = [&](std::vector<double>& out, std::vector<MatrixGameSolution>* strategies) {
    parallel_for(n_s, options.threads, [&](std::size_t s) {
      MatrixGame stage(n_a1, n_a2);
      detail::fill_stage_matrix(game, v, s, stage);
      MatrixGameSolution sol = [&] {
        try {
          return solve_matrix_game(stage, stage_tol);
        } catch (const Error& e) {
          throw NumericalError("game_solve: stage game at state " + std::to_string(s) + ": " +
                               e.what());
        }
      }();
      out[s] = sol.value;
      if (strategies) (*strategies)[s] = std::move(sol);
    });
    double residual = 0.0;
    for (StateIndex s = 0; s < n_s; ++s) residual = std::max(residual, std::abs(out[s] - v[s]));
    return residual;
  };

  while (true) {
    if (history.size() >= options.max_sweeps) {
      throw NumericalError("game_solve: sweep cap exceeded");
    }
    const double residual = sweep(next, nullptr);
    history.push_back(residual);
    v.swap(next);
    if (residual <= target) break;
  }

  std::vector<MatrixGameSolution> stage(
      n_s, MatrixGameSolution{0.0, ActionDistribution::uniform(n_a1),
                              ActionDistribution::uniform(n_a2), 0.0, 0.0});
  const double final_residual = sweep(next, &stage);
  history.push_back(final_residual);

  std::vector<double> q(n_s * n_a1 * n_a2);
  for (StateIndex s = 0; s < n_s; ++s) {
    for (ActionIndex a1 = 0; a1 < n_a1; ++a1) {
      for (ActionIndex a2 = 0; a2 < n_a2; ++a2) {
        double acc = 0.0;
        for (const Transition& t : game.transition(s, a1, a2)) acc += t.prob * v[t.next];
        q[(s * n_a1 + a1) * n_a2 + a2] = game.reward(s, a1, a2) + game.gamma() * acc;
      }
    }
  }
  std::vector<ActionDistribution> p1, p2;
  p1.reserve(n_s);
  p2.reserve(n_s);
  for (auto& sol : stage) {
    p1.push_back(std::move(sol.row_strategy));
    p2.push_back(std::move(sol.col_strategy));
  }
  return EquilibriumSolution(n_s, n_a1, n_a2, game.gamma(), std::move(next),
                             StationaryPolicy(std::move(p1)), StationaryPolicy(std::move(p2)),
                             std::move(q), final_residual, std::move(history), game.fingerprint());
}

inline constexpr double kSupportDedupTolerance = 1e-9;

// Distinct equilibrium action distributions of Player 1, ordered by the
// first state that uses them.
class SupportSet {
 public:
  explicit SupportSet(std::vector<ActionDistribution> distributions)
      : distributions_(std::move(distributions)) {
    if (distributions_.empty()) throw InvalidArgument("SupportSet: empty");
  }
  std::size_t size() const { return distributions_.size(); }
  const ActionDistribution& operator[](std::size_t i) const { return distributions_[i]; }
  std::span<const ActionDistribution> distributions() const { return distributions_; }

  // All pure actions: the candidate set of the Q_MDP rule.
  static SupportSet all_pure(std::size_t num_actions) {
    std::vector<ActionDistribution> d;
    for (ActionIndex a = 0; a < num_actions; ++a) d.push_back(ActionDistribution::dirac(num_actions, a));
    return SupportSet(std::move(d));
  }

 private:
  std::vector<ActionDistribution> distributions_;
};

inline SupportSet support_set(const StationaryPolicy& policy1,
                              double dedup_tolerance = kSupportDedupTolerance) {
  std::vector<ActionDistribution> unique;
  for (const ActionDistribution& d : policy1.distributions()) {
    const bool seen = std::any_of(unique.begin(), unique.end(), [&](const ActionDistribution& u) {
      return u.linf_distance(d) <= dedup_tolerance;
    });
    if (!seen) unique.push_back(d);
  }
  return SupportSet(std::move(unique));
}

// Q*(s, d) for every state and candidate distribution, row-major [s][d].
class CandidateValues {
 public:
  CandidateValues(const EquilibriumSolution& solution, const SupportSet& candidates)
      : num_states_(solution.num_states()), num_candidates_(candidates.size()),
        values_(num_states_ * num_candidates_) {
    for (StateIndex s = 0; s < num_states_; ++s) {
      for (std::size_t d = 0; d < num_candidates_; ++d) {
        values_[s * num_candidates_ + d] = solution.q_against_equilibrium(s, candidates[d].probs());
      }
    }
  }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_candidates() const { return num_candidates_; }
  double operator()(StateIndex s, std::size_t d) const { return values_[s * num_candidates_ + d]; }
  std::span<const double> row(StateIndex s) const {
    return {values_.data() + s * num_candidates_, num_candidates_};
  }

 private:
  std::size_t num_states_;
  std::size_t num_candidates_;
  std::vector<double> values_;
};

// Per-state spread of Q* over a candidate set; the weight of each state in
// the value-weighted entropy objective.
class DeltaMap {
 public:
  explicit DeltaMap(std::vector<double> delta) : delta_(std::move(delta)) {
    for (double d : delta_) {
      if (!(d >= 0.0)) throw InvalidArgument("DeltaMap: negative or NaN entry");
    }
  }
  std::size_t size() const { return delta_.size(); }
  double operator[](StateIndex s) const { return delta_[s]; }
  std::span<const double> values() const { return delta_; }

 private:
  std::vector<double> delta_;
};

inline DeltaMap delta_map(const CandidateValues& values) {
  std::vector<double> delta(values.num_states());
  for (StateIndex s = 0; s < values.num_states(); ++s) {
    auto row = values.row(s);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    delta[s] = *hi - *lo;
  }
  return DeltaMap(std::move(delta));
}

// max_a Q*(s, a) - min_a Q*(s, a), with Player 2 at its equilibrium.
inline DeltaMap delta_map_per_action(const EquilibriumSolution& solution) {
  return delta_map(CandidateValues(solution, SupportSet::all_pure(solution.num_actions1())));
}

// max_{d in D} Q*(s, d) - min_{d in D} Q*(s, d)
inline DeltaMap delta_map_per_distribution(const EquilibriumSolution& solution,
                                           const SupportSet& support) {
  return delta_map(CandidateValues(solution, support));
}

// Per-action spread for a plain MDP solution.
inline DeltaMap delta_map(const MdpSolution& solution) {
  const std::size_t n_a = solution.num_actions;
  std::vector<double> delta(solution.values.size());
  for (StateIndex s = 0; s < delta.size(); ++s) {
    auto first = solution.q.begin() + static_cast<std::ptrdiff_t>(s * n_a);
    const auto [lo, hi] = std::minmax_element(first, first + static_cast<std::ptrdiff_t>(n_a));
    delta[s] = *hi - *lo;
  }
  return DeltaMap(std::move(delta));
}

}  // namespace inattention

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

// Decision rules of both players. Player 1 acts on its posterior belief by
// maximizing belief-weighted Q* over a candidate set of action
// distributions and predicts the next belief assuming Player 2 plays its
// equilibrium policy. Player 2 either plays that policy or deviates
// myopically against Player 1's current choice.

#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "inattention/common.hpp"
#include "inattention/equilibrium.hpp"
#include "inattention/game.hpp"
#include "inattention/rng.hpp"
#include "inattention/sensing.hpp"

namespace inattention {

// Candidate values closer than this are ties; the first candidate wins.
inline constexpr double kDecisionTieTolerance = 1e-12;

enum class ActionRule {
  kQmdp,     // argmax over pure actions of sum_s b(s) Q*(s, a)
  kSupport,  // argmax over the equilibrium support set D
};

enum class SelectorKind { kWeighted, kNonWeighted, kRandom, kAll, kNone, kPerfect };

struct SelectorSpec {
  SelectorKind kind = SelectorKind::kWeighted;
  StopRule stop = StopRule::budget(0.0);  // kWeighted
  std::size_t k = 0;                      // kNonWeighted, kRandom
  std::vector<SensorIndex> required;      // always selected first

  static SelectorSpec weighted(StopRule stop, std::vector<SensorIndex> required = {}) {
    return {SelectorKind::kWeighted, stop, 0, std::move(required)};
  }
  static SelectorSpec non_weighted(std::size_t k, std::vector<SensorIndex> required = {}) {
    return {SelectorKind::kNonWeighted, StopRule::budget(0.0), k, std::move(required)};
  }
  static SelectorSpec random(std::size_t k, std::vector<SensorIndex> required = {}) {
    return {SelectorKind::kRandom, StopRule::budget(0.0), k, std::move(required)};
  }
  static SelectorSpec none(std::vector<SensorIndex> required = {}) {
    return {SelectorKind::kNone, StopRule::budget(0.0), 0, std::move(required)};
  }
  static SelectorSpec all() { return {SelectorKind::kAll, StopRule::budget(0.0), 0, {}}; }
  static SelectorSpec perfect() { return {SelectorKind::kPerfect, StopRule::budget(0.0), 0, {}}; }
};

enum class Player2Mode { kEquilibrium, kDeceptive };

inline const char* to_string(Player2Mode mode) {
  return mode == Player2Mode::kEquilibrium ? "equilibrium" : "deceptive";
}

// Everything Player 1 derives from one solved game.
class Player1Config {
 public:
  Player1Config(const ZeroSumGame& game, std::shared_ptr<const EquilibriumSolution> equilibrium,
                SelectorSpec selector, ActionRule rule = ActionRule::kSupport)
      : selector_(std::move(selector)),
        equilibrium_(std::move(equilibrium)),
        rule_(rule),
        candidates_(rule == ActionRule::kSupport ? support_set(equilibrium_->policy1())
                                                 : SupportSet::all_pure(game.num_actions1())),
        values_(*equilibrium_, candidates_),
        delta_(delta_map(values_)),
        fingerprint_(game.fingerprint()) {
    if (equilibrium_->game_fingerprint() != fingerprint_) {
      throw InvalidArgument("Player1Config: equilibrium was solved for a different game");
    }
  }

  const SelectorSpec& selector() const { return selector_; }
  const EquilibriumSolution& equilibrium() const { return *equilibrium_; }
  std::shared_ptr<const EquilibriumSolution> equilibrium_ptr() const { return equilibrium_; }
  ActionRule rule() const { return rule_; }
  const SupportSet& candidates() const { return candidates_; }
  const CandidateValues& candidate_values() const { return values_; }
  const DeltaMap& delta() const { return delta_; }
  const StationaryPolicy& assumed_pi2() const { return equilibrium_->policy2(); }
  std::uint64_t fingerprint() const { return fingerprint_; }

  void check_game(const ZeroSumGame& game) const {
    if (game.fingerprint() != fingerprint_) {
      throw InvalidArgument("Player1Config: configured for a different game");
    }
  }

 private:
  SelectorSpec selector_;
  std::shared_ptr<const EquilibriumSolution> equilibrium_;
  ActionRule rule_;
  SupportSet candidates_;
  CandidateValues values_;
  DeltaMap delta_;
  std::uint64_t fingerprint_;
};

// Index of the candidate maximizing sum_s b(s) values(s, d); first wins ties.
inline std::size_t best_candidate(std::span<const double> belief, const CandidateValues& values) {
  std::vector<double> score(values.num_candidates(), 0.0);
  for (StateIndex s = 0; s < belief.size(); ++s) {
    if (belief[s] == 0.0) continue;
    auto row = values.row(s);
    for (std::size_t d = 0; d < row.size(); ++d) score[d] += belief[s] * row[d];
  }
  std::size_t best = 0;
  for (std::size_t d = 1; d < score.size(); ++d) {
    if (score[d] > score[best] + kDecisionTieTolerance * std::max(1.0, std::abs(score[best]))) best = d;
  }
  return best;
}

// Q_MDP action: argmax_a sum_s b'(s) Q*(s, a), lowest index on ties.
// `q` is row-major [s][a].
inline ActionIndex p1_act_mdp(const Belief& belief, std::span<const double> q, std::size_t num_actions) {
  if (q.size() != belief.size() * num_actions) throw InvalidArgument("p1_act_mdp: Q size mismatch");
  std::vector<double> score(num_actions, 0.0);
  for (StateIndex s = 0; s < belief.size(); ++s) {
    if (belief[s] == 0.0) continue;
    for (ActionIndex a = 0; a < num_actions; ++a) score[a] += belief[s] * q[s * num_actions + a];
  }
  ActionIndex best = 0;
  for (ActionIndex a = 1; a < num_actions; ++a) {
    if (score[a] > score[best] + kDecisionTieTolerance * std::max(1.0, std::abs(score[best]))) best = a;
  }
  return best;
}

inline ActionIndex p1_act_mdp(const Belief& belief, const MdpSolution& solution) {
  return p1_act_mdp(belief, solution.q, solution.num_actions);
}

// argmax over d in D of sum_s b'(s) Q*(s, d).
inline ActionDistribution p1_act_game(const Belief& belief, const EquilibriumSolution& solution,
                                      const SupportSet& support) {
  CandidateValues values(solution, support);
  return support[best_candidate(belief.probs(), values)];
}

// Prediction step: b(s') proportional to
// sum_s sum_a2 b'(s) pi2(s, a2) P(s, a1, a2, s').
inline std::vector<double> predict_weights(std::span<const double> belief, ActionIndex a1,
                                           const StationaryPolicy& assumed_pi2,
                                           const ZeroSumGame& game) {
  std::vector<double> next(game.num_states(), 0.0);
  for (StateIndex s = 0; s < belief.size(); ++s) {
    if (belief[s] == 0.0) continue;
    const auto& pi = assumed_pi2[s];
    for (ActionIndex a2 = 0; a2 < game.num_actions2(); ++a2) {
      const double w = belief[s] * pi[a2];
      if (w == 0.0) continue;
      for (const Transition& t : game.transition(s, a1, a2)) next[t.next] += w * t.prob;
    }
  }
  return next;
}

inline Belief p1_predict(const Belief& belief, ActionIndex a1, const StationaryPolicy& assumed_pi2,
                         const ZeroSumGame& game) {
  if (belief.size() != game.num_states() || a1 >= game.num_actions1() ||
      assumed_pi2.num_states() != game.num_states() ||
      assumed_pi2.num_actions() != game.num_actions2()) {
    throw InvalidArgument("p1_predict: dimension mismatch");
  }
  auto next = predict_weights(belief.probs(), a1, assumed_pi2, game);
  double total = 0.0;
  for (double p : next) total += p;
  if (!(total > 0.0)) throw NumericalError("p1_predict: predicted belief has no mass");
  for (double& p : next) p /= total;
  return Belief(std::move(next));
}

// g(a2) = sum_a1 d1(a1) (r(s, a1, a2) + gamma E[V*(s')]) = d1^T Q*(s)[:, a2].
inline std::vector<double> deceptive_scores(StateIndex s, std::span<const double> d1,
                                            const EquilibriumSolution& solution) {
  std::vector<double> g(solution.num_actions2(), 0.0);
  for (ActionIndex a1 = 0; a1 < solution.num_actions1(); ++a1) {
    if (d1[a1] == 0.0) continue;
    for (ActionIndex a2 = 0; a2 < solution.num_actions2(); ++a2) g[a2] += d1[a1] * solution.q(s, a1, a2);
  }
  return g;
}

// Minimizing vertex of g, lowest index on ties.
inline ActionIndex deceptive_action(StateIndex s, std::span<const double> d1,
                                    const EquilibriumSolution& solution) {
  auto g = deceptive_scores(s, d1, solution);
  ActionIndex best = 0;
  for (ActionIndex a2 = 1; a2 < g.size(); ++a2) {
    if (g[a2] < g[best] - kDecisionTieTolerance * std::max(1.0, std::abs(g[best]))) best = a2;
  }
  return best;
}

// Player 2's action at the true state. Equilibrium mode samples pi2*(s);
// deceptive mode best-responds to Player 1's chosen distribution d1.
inline ActionIndex p2_act(Player2Mode mode, StateIndex s, std::span<const double> d1,
                          const EquilibriumSolution& solution, RandomStream& rng) {
  if (s >= solution.num_states()) throw InvalidArgument("p2_act: state out of range");
  if (mode == Player2Mode::kEquilibrium) {
    return rng.categorical(solution.policy2()[s].probs());
  }
  if (d1.size() != solution.num_actions1()) throw InvalidArgument("p2_act: d1 size mismatch");
  return deceptive_action(s, d1, solution);
}

// Deceptive mode with read access to Player 1's posterior: recomputes d1*
// from the belief exactly as Player 1 does.
inline ActionIndex p2_act(Player2Mode mode, StateIndex s, const Belief& p1_belief,
                          const Player1Config& p1, RandomStream& rng) {
  const std::size_t d = best_candidate(p1_belief.probs(), p1.candidate_values());
  return p2_act(mode, s, p1.candidates()[d].probs(), p1.equilibrium(), rng);
}

}  // namespace inattention

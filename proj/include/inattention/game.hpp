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

// Finite MDPs and two-player zero-sum stochastic games, policies, beliefs.
//
// States and actions are dense indices. Transition rows are stored sparsely
// (compressed rows of (next state, probability)) so that structured games
// such as the line-defense grid stay small; rewards are dense.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "inattention/common.hpp"

namespace inattention {

struct Transition {
  StateIndex next = 0;
  double prob = 0.0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Compressed sparse rows of transitions. Entries within a row are sorted by
// next state, merged, and exact zeros are dropped. Nothing is normalized;
// row sums are checked by validate_game()/validate_mdp().
class TransitionTable {
 public:
  TransitionTable() = default;

  explicit TransitionTable(std::vector<std::vector<Transition>> rows) {
    offsets_.reserve(rows.size() + 1);
    offsets_.push_back(0);
    for (auto& row : rows) {
      std::sort(row.begin(), row.end(),
                [](const Transition& a, const Transition& b) { return a.next < b.next; });
      for (std::size_t i = 0; i < row.size();) {
        Transition merged = row[i];
        std::size_t j = i + 1;
        while (j < row.size() && row[j].next == merged.next) merged.prob += row[j++].prob;
        if (merged.prob != 0.0) entries_.push_back(merged);
        i = j;
      }
      offsets_.push_back(entries_.size());
    }
  }

  std::size_t num_rows() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  std::span<const Transition> row(std::size_t index) const {
    return {entries_.data() + offsets_[index], offsets_[index + 1] - offsets_[index]};
  }

  std::span<const Transition> entries() const { return entries_; }
  std::span<const std::size_t> offsets() const { return offsets_; }

  friend bool operator==(const TransitionTable&, const TransitionTable&) = default;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Transition> entries_;
};

// Dense probability rows (one per (state, action...)) to the sparse form.
inline std::vector<std::vector<Transition>> sparse_rows(
    const std::vector<std::vector<double>>& dense) {
  std::vector<std::vector<Transition>> rows(dense.size());
  for (std::size_t r = 0; r < dense.size(); ++r) {
    for (std::size_t q = 0; q < dense[r].size(); ++q) {
      if (dense[r][q] != 0.0) rows[r].push_back({q, dense[r][q]});
    }
  }
  return rows;
}

namespace detail {

inline double max_abs(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace detail

class Mdp {
 public:
  Mdp(std::size_t num_states, std::size_t num_actions,
      std::vector<std::vector<Transition>> transitions, std::vector<double> rewards,
      double gamma, StateIndex initial_state, std::optional<double> r_max = std::nullopt)
      : num_states_(num_states),
        num_actions_(num_actions),
        transitions_(std::move(transitions)),
        rewards_(std::move(rewards)),
        gamma_(gamma),
        initial_state_(initial_state) {
    if (num_states == 0 || num_actions == 0) {
      throw InvalidArgument("Mdp: state and action sets must be non-empty");
    }
    if (transitions_.num_rows() != num_states * num_actions) {
      throw InvalidArgument("Mdp: expected one transition row per (state, action)");
    }
    if (rewards_.size() != num_states * num_actions) {
      throw InvalidArgument("Mdp: expected one reward per (state, action)");
    }
    if (initial_state >= num_states) throw InvalidArgument("Mdp: initial state out of range");
    for (const Transition& t : transitions_.entries()) {
      if (t.next >= num_states) throw InvalidArgument("Mdp: successor state out of range");
    }
    r_max_ = r_max.value_or(detail::max_abs(rewards_));
  }

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  double gamma() const { return gamma_; }
  StateIndex initial_state() const { return initial_state_; }
  double r_max() const { return r_max_; }

  std::span<const Transition> transition(StateIndex s, ActionIndex a) const {
    return transitions_.row(s * num_actions_ + a);
  }
  double reward(StateIndex s, ActionIndex a) const { return rewards_[s * num_actions_ + a]; }

  const TransitionTable& transition_table() const { return transitions_; }
  std::span<const double> rewards() const { return rewards_; }

 private:
  std::size_t num_states_;
  std::size_t num_actions_;
  TransitionTable transitions_;
  std::vector<double> rewards_;
  double gamma_;
  StateIndex initial_state_;
  double r_max_ = 0.0;
};

struct GameLabels {
  std::vector<std::string> states;
  std::vector<std::string> actions1;
  std::vector<std::string> actions2;

  friend bool operator==(const GameLabels&, const GameLabels&) = default;
};

// Two-player zero-sum stochastic game; the reward is Player 1's.
class ZeroSumGame {
 public:
  ZeroSumGame(std::size_t num_states, std::size_t num_actions1, std::size_t num_actions2,
              std::vector<std::vector<Transition>> transitions, std::vector<double> rewards,
              double gamma, StateIndex initial_state, std::optional<double> r_max = std::nullopt)
      : num_states_(num_states),
        num_actions1_(num_actions1),
        num_actions2_(num_actions2),
        transitions_(std::move(transitions)),
        rewards_(std::move(rewards)),
        gamma_(gamma),
        initial_state_(initial_state) {
    if (num_states == 0 || num_actions1 == 0 || num_actions2 == 0) {
      throw InvalidArgument("ZeroSumGame: state and action sets must be non-empty");
    }
    const std::size_t rows = num_states * num_actions1 * num_actions2;
    if (transitions_.num_rows() != rows) {
      throw InvalidArgument("ZeroSumGame: expected one transition row per (s, a1, a2)");
    }
    if (rewards_.size() != rows) {
      throw InvalidArgument("ZeroSumGame: expected one reward per (s, a1, a2)");
    }
    if (initial_state >= num_states) {
      throw InvalidArgument("ZeroSumGame: initial state out of range");
    }
    for (const Transition& t : transitions_.entries()) {
      if (t.next >= num_states) throw InvalidArgument("ZeroSumGame: successor state out of range");
    }
    r_max_ = r_max.value_or(detail::max_abs(rewards_));
  }

  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions1() const { return num_actions1_; }
  std::size_t num_actions2() const { return num_actions2_; }
  double gamma() const { return gamma_; }
  StateIndex initial_state() const { return initial_state_; }
  double r_max() const { return r_max_; }

  std::size_t row_index(StateIndex s, ActionIndex a1, ActionIndex a2) const {
    return (s * num_actions1_ + a1) * num_actions2_ + a2;
  }
  std::span<const Transition> transition(StateIndex s, ActionIndex a1, ActionIndex a2) const {
    return transitions_.row(row_index(s, a1, a2));
  }
  double reward(StateIndex s, ActionIndex a1, ActionIndex a2) const {
    return rewards_[row_index(s, a1, a2)];
  }

  const TransitionTable& transition_table() const { return transitions_; }
  std::span<const double> rewards() const { return rewards_; }

  const GameLabels& labels() const { return labels_; }
  void set_labels(GameLabels labels) {
    if ((!labels.states.empty() && labels.states.size() != num_states_) ||
        (!labels.actions1.empty() && labels.actions1.size() != num_actions1_) ||
        (!labels.actions2.empty() && labels.actions2.size() != num_actions2_)) {
      throw InvalidArgument("ZeroSumGame: label count does not match dimensions");
    }
    labels_ = std::move(labels);
  }

  // Hash of dimensions, discount, initial state, transitions and rewards.
  std::uint64_t fingerprint() const {
    Fnv1a h;
    h.update_value(num_states_);
    h.update_value(num_actions1_);
    h.update_value(num_actions2_);
    h.update_value(gamma_);
    h.update_value(initial_state_);
    h.update_value(r_max_);
    h.update_span(transitions_.offsets());
    for (const Transition& t : transitions_.entries()) {
      h.update_value(t.next);
      h.update_value(t.prob);
    }
    h.update_span(std::span<const double>(rewards_));
    return h.digest();
  }

  // True when every action pair loops back to s with zero reward.
  bool is_absorbing_zero(StateIndex s) const {
    for (ActionIndex a1 = 0; a1 < num_actions1_; ++a1) {
      for (ActionIndex a2 = 0; a2 < num_actions2_; ++a2) {
        if (reward(s, a1, a2) != 0.0) return false;
        auto row = transition(s, a1, a2);
        if (row.size() != 1 || row[0].next != s || row[0].prob != 1.0) return false;
      }
    }
    return true;
  }

 private:
  std::size_t num_states_;
  std::size_t num_actions1_;
  std::size_t num_actions2_;
  TransitionTable transitions_;
  std::vector<double> rewards_;
  double gamma_;
  StateIndex initial_state_;
  double r_max_ = 0.0;
  GameLabels labels_;
};

// Single-player view of an MDP as a game in which Player 2 has one action.
inline ZeroSumGame as_game(const Mdp& mdp) {
  std::vector<std::vector<Transition>> rows(mdp.num_states() * mdp.num_actions());
  for (StateIndex s = 0; s < mdp.num_states(); ++s) {
    for (ActionIndex a = 0; a < mdp.num_actions(); ++a) {
      auto row = mdp.transition(s, a);
      rows[s * mdp.num_actions() + a].assign(row.begin(), row.end());
    }
  }
  return ZeroSumGame(mdp.num_states(), mdp.num_actions(), 1, std::move(rows),
                     std::vector<double>(mdp.rewards().begin(), mdp.rewards().end()),
                     mdp.gamma(), mdp.initial_state(), mdp.r_max());
}

namespace detail {

inline double sum(std::span<const double> v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

inline void check_distribution(std::span<const double> probs, double tolerance,
                               const char* what) {
  if (probs.empty()) throw InvalidArgument(std::string(what) + ": empty distribution");
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw InvalidArgument(std::string(what) + ": negative or non-finite probability");
    }
  }
  if (std::abs(sum(probs) - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": probabilities sum to " << sum(probs);
    throw InvalidArgument(os.str());
  }
}

}  // namespace detail

// Mixed strategy over one player's action set.
class ActionDistribution {
 public:
  explicit ActionDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
    detail::check_distribution(probs_, kInputProbTolerance, "ActionDistribution");
  }

  static ActionDistribution dirac(std::size_t num_actions, ActionIndex action) {
    if (action >= num_actions) throw InvalidArgument("ActionDistribution: action out of range");
    std::vector<double> p(num_actions, 0.0);
    p[action] = 1.0;
    return ActionDistribution(std::move(p));
  }
  static ActionDistribution uniform(std::size_t num_actions) {
    return ActionDistribution(std::vector<double>(num_actions, 1.0 / static_cast<double>(num_actions)));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](ActionIndex a) const { return probs_[a]; }
  std::span<const double> probs() const { return probs_; }

  double linf_distance(const ActionDistribution& other) const {
    double d = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) d = std::max(d, std::abs(probs_[i] - other.probs_[i]));
    return d;
  }

  friend bool operator==(const ActionDistribution&, const ActionDistribution&) = default;

 private:
  std::vector<double> probs_;
};

class StationaryPolicy {
 public:
  explicit StationaryPolicy(std::vector<ActionDistribution> per_state)
      : per_state_(std::move(per_state)) {
    if (per_state_.empty()) throw InvalidArgument("StationaryPolicy: no states");
    for (const auto& d : per_state_) {
      if (d.size() != per_state_.front().size()) {
        throw InvalidArgument("StationaryPolicy: inconsistent action counts");
      }
    }
  }

  static StationaryPolicy constant(std::size_t num_states, const ActionDistribution& d) {
    return StationaryPolicy(std::vector<ActionDistribution>(num_states, d));
  }

  std::size_t num_states() const { return per_state_.size(); }
  std::size_t num_actions() const { return per_state_.front().size(); }
  const ActionDistribution& operator[](StateIndex s) const { return per_state_[s]; }
  std::span<const ActionDistribution> distributions() const { return per_state_; }

 private:
  std::vector<ActionDistribution> per_state_;
};

// Probability vector over the state set.
class Belief {
 public:
  explicit Belief(std::vector<double> probs) : probs_(std::move(probs)) {
    detail::check_distribution(probs_, kBeliefTolerance, "Belief");
  }

  static Belief dirac(std::size_t num_states, StateIndex s) {
    if (s >= num_states) throw InvalidArgument("Belief: state index out of range");
    std::vector<double> p(num_states, 0.0);
    p[s] = 1.0;
    return Belief(std::move(p));
  }
  static Belief uniform(std::size_t num_states) {
    if (num_states == 0) throw InvalidArgument("Belief: empty state set");
    return Belief(std::vector<double>(num_states, 1.0 / static_cast<double>(num_states)));
  }
  // Normalizes non-negative weights; throws when they sum to zero.
  static Belief from_weights(std::vector<double> weights) {
    const double total = detail::sum(weights);
    if (!(total > 0.0)) throw InvalidArgument("Belief: weights sum to zero");
    for (double& w : weights) w /= total;
    return Belief(std::move(weights));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](StateIndex s) const { return probs_[s]; }
  std::span<const double> probs() const { return probs_; }

  friend bool operator==(const Belief&, const Belief&) = default;

 private:
  std::vector<double> probs_;
};

struct Violation {
  enum class Kind { kRowSum, kNegativeProbability, kRewardRange, kDiscount };
  Kind kind;
  StateIndex state = 0;
  ActionIndex action1 = 0;
  ActionIndex action2 = 0;
  std::string message;
};

inline std::vector<Violation> validate_game(const ZeroSumGame& game) {
  std::vector<Violation> out;
  if (!(game.gamma() >= 0.0 && game.gamma() < 1.0)) {
    out.push_back({Violation::Kind::kDiscount, 0, 0, 0,
                   "discount " + std::to_string(game.gamma()) + " outside [0, 1)"});
  }
  for (StateIndex s = 0; s < game.num_states(); ++s) {
    for (ActionIndex a1 = 0; a1 < game.num_actions1(); ++a1) {
      for (ActionIndex a2 = 0; a2 < game.num_actions2(); ++a2) {
        const std::string where = "(" + std::to_string(s) + ", " + std::to_string(a1) + ", " +
                                  std::to_string(a2) + ")";
        double total = 0.0;
        for (const Transition& t : game.transition(s, a1, a2)) {
          if (!(t.prob >= 0.0)) {
            out.push_back({Violation::Kind::kNegativeProbability, s, a1, a2,
                           "negative probability in row " + where});
          }
          total += t.prob;
        }
        if (!(std::abs(total - 1.0) <= kInputProbTolerance)) {
          std::ostringstream os;
          os.precision(17);
          os << "transition row " << where << " sums to " << total;
          out.push_back({Violation::Kind::kRowSum, s, a1, a2, os.str()});
        }
        const double r = game.reward(s, a1, a2);
        if (!std::isfinite(r) || std::abs(r) > game.r_max()) {
          out.push_back({Violation::Kind::kRewardRange, s, a1, a2,
                         "reward at " + where + " outside [-R_max, R_max]"});
        }
      }
    }
  }
  return out;
}

inline std::vector<Violation> validate_mdp(const Mdp& mdp) {
  return validate_game(as_game(mdp));
}

inline void require_valid(const ZeroSumGame& game) {
  auto violations = validate_game(game);
  if (!violations.empty()) {
    throw InvalidArgument("invalid game: " + violations.front().message +
                          (violations.size() > 1
                               ? " (+" + std::to_string(violations.size() - 1) + " more)"
                               : std::string()));
  }
}

// Player 1's MDP when Player 2 commits to pi2.
inline Mdp induced_mdp(const ZeroSumGame& game, const StationaryPolicy& pi2) {
  if (pi2.num_states() != game.num_states() || pi2.num_actions() != game.num_actions2()) {
    throw InvalidArgument("induced_mdp: policy dimensions do not match the game");
  }
  const std::size_t n_s = game.num_states();
  const std::size_t n_a = game.num_actions1();
  std::vector<std::vector<Transition>> rows(n_s * n_a);
  std::vector<double> rewards(n_s * n_a, 0.0);
  for (StateIndex s = 0; s < n_s; ++s) {
    for (ActionIndex a1 = 0; a1 < n_a; ++a1) {
      auto& row = rows[s * n_a + a1];
      double r = 0.0;
      for (ActionIndex a2 = 0; a2 < game.num_actions2(); ++a2) {
        const double w = pi2[s][a2];
        if (w == 0.0) continue;
        r += w * game.reward(s, a1, a2);
        for (const Transition& t : game.transition(s, a1, a2)) row.push_back({t.next, w * t.prob});
      }
      rewards[s * n_a + a1] = r;
    }
  }
  return Mdp(n_s, n_a, std::move(rows), std::move(rewards), game.gamma(), game.initial_state(),
             game.r_max());
}

inline Belief dirac_belief(std::size_t num_states, StateIndex s) { return Belief::dirac(num_states, s); }
inline Belief uniform_belief(std::size_t num_states) { return Belief::uniform(num_states); }

}  // namespace inattention

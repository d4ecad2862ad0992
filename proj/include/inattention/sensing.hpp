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

// Sensor models, exact joint-observation enumeration for conditionally
// independent sensors, Bayes observation updates and the sensor selectors.
//
// Joint observations are enumerated sparsely: only states in the support of
// the belief and symbols with non-zero likelihood are visited. A joint
// symbol is identified by its mixed-radix key over the selected sensors.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "inattention/common.hpp"
#include "inattention/equilibrium.hpp"
#include "inattention/game.hpp"
#include "inattention/rng.hpp"

namespace inattention {

inline constexpr std::uint64_t kJointObservationCap = 1'000'000;
// Evidence below this is treated as a zero-likelihood observation.
inline constexpr double kSurpriseThreshold = 1e-12;

class Sensor {
 public:
  // likelihood[s][w] = O(s, w).
  Sensor(std::vector<std::string> alphabet, std::vector<std::vector<double>> likelihood,
         double cost)
      : alphabet_(std::move(alphabet)), num_states_(likelihood.size()), cost_(cost) {
    if (alphabet_.empty()) throw InvalidArgument("Sensor: empty alphabet");
    if (num_states_ == 0) throw InvalidArgument("Sensor: no states");
    if (!(cost >= 0.0) || !std::isfinite(cost)) throw InvalidArgument("Sensor: negative cost");
    const std::size_t k = alphabet_.size();
    likelihood_.reserve(num_states_ * k);
    support_offsets_.push_back(0);
    for (std::size_t s = 0; s < num_states_; ++s) {
      if (likelihood[s].size() != k) {
        throw InvalidArgument("Sensor: likelihood row " + std::to_string(s) +
                              " does not match the alphabet size");
      }
      double total = 0.0;
      for (std::size_t w = 0; w < k; ++w) {
        const double p = likelihood[s][w];
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw InvalidArgument("Sensor: invalid likelihood at state " + std::to_string(s));
        }
        total += p;
        likelihood_.push_back(p);
        if (p > 0.0) support_.push_back(w);
      }
      if (std::abs(total - 1.0) > kInputProbTolerance) {
        throw InvalidArgument("Sensor: likelihood row " + std::to_string(s) + " does not sum to 1");
      }
      support_offsets_.push_back(support_.size());
    }
  }

  std::size_t num_states() const { return num_states_; }
  std::size_t alphabet_size() const { return alphabet_.size(); }
  const std::vector<std::string>& alphabet() const { return alphabet_; }
  double cost() const { return cost_; }
  double likelihood(StateIndex s, SymbolIndex w) const { return likelihood_[s * alphabet_.size() + w]; }
  std::span<const double> likelihood_row(StateIndex s) const {
    return {likelihood_.data() + s * alphabet_.size(), alphabet_.size()};
  }
  // Symbols with positive likelihood at s.
  std::span<const SymbolIndex> support(StateIndex s) const {
    return {support_.data() + support_offsets_[s], support_offsets_[s + 1] - support_offsets_[s]};
  }

 private:
  std::vector<std::string> alphabet_;
  std::size_t num_states_;
  double cost_;
  std::vector<double> likelihood_;
  std::vector<SymbolIndex> support_;
  std::vector<std::size_t> support_offsets_;
};

class SensorBank {
 public:
  SensorBank(std::vector<Sensor> sensors, double budget)
      : sensors_(std::move(sensors)), budget_(budget) {
    if (!(budget >= 0.0)) throw InvalidArgument("SensorBank: negative budget");
    std::unordered_set<std::string> symbols;
    for (const Sensor& sensor : sensors_) {
      if (sensor.num_states() != sensors_.front().num_states()) {
        throw InvalidArgument("SensorBank: sensors disagree on the state count");
      }
      for (const auto& name : sensor.alphabet()) {
        if (!symbols.insert(name).second) {
          throw InvalidArgument("SensorBank: observation symbol '" + name +
                                "' appears in more than one alphabet");
        }
      }
    }
  }

  std::size_t size() const { return sensors_.size(); }
  const Sensor& operator[](SensorIndex i) const { return sensors_[i]; }
  std::span<const Sensor> sensors() const { return sensors_; }
  double budget() const { return budget_; }

  double cost(std::span<const SensorIndex> selection) const {
    double c = 0.0;
    for (SensorIndex i : selection) c += sensors_[i].cost();
    return c;
  }

 private:
  std::vector<Sensor> sensors_;
  double budget_;
};

// One symbol per selected sensor, aligned with the selection order.
struct JointObservation {
  std::vector<SymbolIndex> symbols;
  friend bool operator==(const JointObservation&, const JointObservation&) = default;
};

struct ObservationOutcome {
  JointObservation observation;
  double probability = 0.0;
};

struct ObservationUpdate {
  Belief belief;
  double evidence = 0.0;  // p(w) under the prior
  bool surprise = false;  // evidence below kSurpriseThreshold; belief is the prior
};

// h(p) in bits with h(0) = h(1) = 0.
inline double binary_entropy(double p) {
  constexpr double kSlack = 1e-12;
  if (!(p >= -kSlack && p <= 1.0 + kSlack)) {
    throw InvalidArgument("binary_entropy: probability outside [0, 1]");
  }
  p = std::clamp(p, 0.0, 1.0);
  if (p == 0.0 || p == 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

namespace detail {

struct JointMass {
  std::uint64_t key;
  StateIndex state;
  double mass;  // b(s) * prod_i O^i(s, w^i)
};

inline void check_selection(const SensorBank& bank, std::span<const SensorIndex> selection,
                            std::size_t num_states, std::uint64_t cap) {
  std::uint64_t product = 1;
  std::vector<bool> seen(bank.size(), false);
  for (SensorIndex i : selection) {
    if (i >= bank.size()) throw InvalidArgument("sensor index " + std::to_string(i) + " out of range");
    if (seen[i]) throw InvalidArgument("sensor index " + std::to_string(i) + " selected twice");
    seen[i] = true;
    product *= bank[i].alphabet_size();
    if (product > cap) throw CapExceeded("joint observation alphabet exceeds the enumeration cap");
  }
  if (bank.size() > 0 && bank[0].num_states() != num_states) {
    throw InvalidArgument("sensor bank and belief disagree on the state count");
  }
}

// Non-zero (joint symbol, state) masses, sorted by key then state.
inline std::vector<JointMass> joint_masses(std::span<const double> belief, const SensorBank& bank,
                                           std::span<const SensorIndex> selection,
                                           std::uint64_t cap = kJointObservationCap) {
  check_selection(bank, selection, belief.size(), cap);
  std::vector<std::uint64_t> radix(selection.size());
  std::uint64_t r = 1;
  for (std::size_t k = 0; k < selection.size(); ++k) {
    radix[k] = r;
    r *= bank[selection[k]].alphabet_size();
  }
  std::vector<JointMass> out;
  std::vector<std::size_t> cursor(selection.size());
  for (StateIndex s = 0; s < belief.size(); ++s) {
    if (belief[s] <= 0.0) continue;
    bool empty = false;
    for (std::size_t k = 0; k < selection.size(); ++k) {
      cursor[k] = 0;
      if (bank[selection[k]].support(s).empty()) empty = true;
    }
    if (empty) continue;
    // Odometer over the per-sensor supports.
    for (;;) {
      std::uint64_t key = 0;
      double mass = belief[s];
      for (std::size_t k = 0; k < selection.size(); ++k) {
        const Sensor& sensor = bank[selection[k]];
        const SymbolIndex w = sensor.support(s)[cursor[k]];
        key += w * radix[k];
        mass *= sensor.likelihood(s, w);
      }
      if (mass > 0.0) out.push_back({key, s, mass});
      std::size_t k = 0;
      while (k < selection.size() && ++cursor[k] == bank[selection[k]].support(s).size()) {
        cursor[k] = 0;
        ++k;
      }
      if (k == selection.size()) break;
    }
  }
  std::sort(out.begin(), out.end(), [](const JointMass& a, const JointMass& b) {
    return a.key != b.key ? a.key < b.key : a.state < b.state;
  });
  return out;
}

inline JointObservation decode_key(std::uint64_t key, const SensorBank& bank,
                                   std::span<const SensorIndex> selection) {
  JointObservation obs;
  obs.symbols.reserve(selection.size());
  for (SensorIndex i : selection) {
    obs.symbols.push_back(static_cast<SymbolIndex>(key % bank[i].alphabet_size()));
    key /= bank[i].alphabet_size();
  }
  return obs;
}

// Calls group(first, last) for each run of equal keys.
template <typename Fn>
void for_each_group(const std::vector<JointMass>& masses, Fn&& group) {
  for (std::size_t i = 0; i < masses.size();) {
    std::size_t j = i;
    while (j < masses.size() && masses[j].key == masses[i].key) ++j;
    group(i, j);
    i = j;
  }
}

}  // namespace detail

// p(w) = sum_s b(s) prod_{i in I} O^i(s, w^i); zero-probability joints omitted.
inline std::vector<ObservationOutcome> joint_obs_dist(const Belief& belief, const SensorBank& bank,
                                                      std::span<const SensorIndex> selection,
                                                      std::uint64_t cap = kJointObservationCap) {
  if (selection.empty()) return {ObservationOutcome{JointObservation{}, 1.0}};
  auto masses = detail::joint_masses(belief.probs(), bank, selection, cap);
  std::vector<ObservationOutcome> out;
  detail::for_each_group(masses, [&](std::size_t first, std::size_t last) {
    double p = 0.0;
    for (std::size_t k = first; k < last; ++k) p += masses[k].mass;
    out.push_back({detail::decode_key(masses[first].key, bank, selection), p});
  });
  return out;
}

inline double joint_likelihood(const SensorBank& bank, std::span<const SensorIndex> selection,
                               const JointObservation& obs, StateIndex s) {
  double l = 1.0;
  for (std::size_t k = 0; k < selection.size(); ++k) l *= bank[selection[k]].likelihood(s, obs.symbols[k]);
  return l;
}

// Posterior after observing `obs` from the sensors in `selection`. When the
// observation has (numerically) zero probability under the prior, the prior
// is returned unchanged and the update is flagged as a surprise.
inline ObservationUpdate bayes_obs_update(const Belief& belief, const SensorBank& bank,
                                          std::span<const SensorIndex> selection,
                                          const JointObservation& obs) {
  if (obs.symbols.size() != selection.size()) {
    throw InvalidArgument("bayes_obs_update: observation does not match the selection");
  }
  if (selection.empty()) return {belief, 1.0, false};
  detail::check_selection(bank, selection, belief.size(), std::numeric_limits<std::uint64_t>::max());
  for (std::size_t k = 0; k < selection.size(); ++k) {
    if (obs.symbols[k] >= bank[selection[k]].alphabet_size()) {
      throw InvalidArgument("bayes_obs_update: symbol out of range");
    }
  }
  std::vector<double> post(belief.size(), 0.0);
  double evidence = 0.0;
  for (StateIndex s = 0; s < belief.size(); ++s) {
    if (belief[s] == 0.0) continue;
    post[s] = belief[s] * joint_likelihood(bank, selection, obs, s);
    evidence += post[s];
  }
  if (evidence < kSurpriseThreshold) return {belief, evidence, true};
  for (double& p : post) p /= evidence;
  return {Belief(std::move(post)), evidence, false};
}

// sum_s Delta(s) * H(1_s(S) | w_I): the value-weighted binary entropy.
inline double weighted_entropy_objective(const Belief& belief, const SensorBank& bank,
                                         std::span<const SensorIndex> selection,
                                         const DeltaMap& delta,
                                         std::uint64_t cap = kJointObservationCap) {
  if (delta.size() != belief.size()) {
    throw InvalidArgument("weighted_entropy_objective: delta map size mismatch");
  }
  if (selection.empty()) {
    double total = 0.0;
    for (StateIndex s = 0; s < belief.size(); ++s) {
      if (belief[s] > 0.0) total += delta[s] * binary_entropy(belief[s]);
    }
    return total;
  }
  auto masses = detail::joint_masses(belief.probs(), bank, selection, cap);
  double total = 0.0;
  detail::for_each_group(masses, [&](std::size_t first, std::size_t last) {
    double pw = 0.0;
    for (std::size_t k = first; k < last; ++k) pw += masses[k].mass;
    double inner = 0.0;
    for (std::size_t k = first; k < last; ++k) {
      inner += delta[masses[k].state] * binary_entropy(std::min(1.0, masses[k].mass / pw));
    }
    total += pw * inner;
  });
  return total;
}

// H(S | w_I) in bits.
inline double state_entropy(const Belief& belief, const SensorBank& bank,
                            std::span<const SensorIndex> selection,
                            std::uint64_t cap = kJointObservationCap) {
  auto plogp = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  if (selection.empty()) {
    double h = 0.0;
    for (double p : belief.probs()) h += plogp(p);
    return h;
  }
  auto masses = detail::joint_masses(belief.probs(), bank, selection, cap);
  double total = 0.0;
  detail::for_each_group(masses, [&](std::size_t first, std::size_t last) {
    double pw = 0.0;
    for (std::size_t k = first; k < last; ++k) pw += masses[k].mass;
    double h = 0.0;
    for (std::size_t k = first; k < last; ++k) h += plogp(masses[k].mass / pw);
    total += pw * h;
  });
  return total;
}

struct StopRule {
  enum class Kind { kBudget, kThreshold };
  Kind kind = Kind::kBudget;
  double value = 0.0;

  static StopRule budget(double c) { return {Kind::kBudget, c}; }
  static StopRule threshold(double alpha) { return {Kind::kThreshold, alpha}; }
};

struct Selection {
  std::vector<SensorIndex> sensors;  // in the order they were added
  double objective = 0.0;            // objective of the final set
};

// Objective values closer than this count as ties (lowest index wins).
inline constexpr double kSelectionTieTolerance = 1e-12;

namespace detail {

// Greedy descent on `objective`, starting from `initial`.
// Budget mode adds the best affordable sensor while one exists; threshold
// mode stops once the objective is at or below the threshold.
template <typename Objective>
Selection greedy_descent(const SensorBank& bank, const StopRule& stop,
                         std::vector<SensorIndex> initial, Objective&& objective) {
  Selection sel{std::move(initial), 0.0};
  std::vector<bool> chosen(bank.size(), false);
  for (SensorIndex i : sel.sensors) {
    if (i >= bank.size() || chosen[i]) throw InvalidArgument("greedy_select: bad initial set");
    chosen[i] = true;
  }
  double spent = bank.cost(sel.sensors);
  sel.objective = objective(sel.sensors);
  while (sel.sensors.size() < bank.size()) {
    if (stop.kind == StopRule::Kind::kThreshold && sel.objective <= stop.value) break;
    std::size_t best = bank.size();
    double best_value = std::numeric_limits<double>::infinity();
    std::vector<SensorIndex> trial = sel.sensors;
    trial.push_back(0);
    for (SensorIndex j = 0; j < bank.size(); ++j) {
      if (chosen[j]) continue;
      if (stop.kind == StopRule::Kind::kBudget && spent + bank[j].cost() > stop.value) continue;
      trial.back() = j;
      const double value = objective(trial);
      if (best == bank.size() || value < best_value - kSelectionTieTolerance) {
        best = j;
        best_value = value;
      }
    }
    if (best == bank.size()) break;
    chosen[best] = true;
    spent += bank[best].cost();
    sel.sensors.push_back(best);
    sel.objective = best_value;
  }
  return sel;
}

}  // namespace detail

// Greedy rational-inattention selector. `required` sensors (e.g. free
// self-localization) are included before the greedy loop starts.
inline Selection greedy_select(const Belief& belief, const SensorBank& bank, const DeltaMap& delta,
                               const StopRule& stop, std::vector<SensorIndex> required = {}) {
  if (!(stop.value >= 0.0)) throw InvalidArgument("greedy_select: negative budget or threshold");
  return detail::greedy_descent(bank, stop, std::move(required),
                                [&](std::span<const SensorIndex> sel) {
                                  return weighted_entropy_objective(belief, bank, sel, delta);
                                });
}

enum class BaselineMethod { kNonWeighted, kRandom, kAll, kNone };

// Baseline selectors. kNonWeighted greedily minimizes H(S | w_I) and kRandom
// draws k distinct sensors; both pick exactly k sensors beyond `required`.
inline std::vector<SensorIndex> baseline_select(const Belief& belief, const SensorBank& bank,
                                                std::size_t k, BaselineMethod method,
                                                RandomStream* rng = nullptr,
                                                std::vector<SensorIndex> required = {}) {
  if (k + required.size() > bank.size()) {
    throw InvalidArgument("baseline_select: k exceeds the number of sensors");
  }
  switch (method) {
    case BaselineMethod::kNone:
      return required;
    case BaselineMethod::kAll: {
      std::vector<SensorIndex> all(bank.size());
      std::iota(all.begin(), all.end(), SensorIndex{0});
      return all;
    }
    case BaselineMethod::kNonWeighted: {
      // Unit costs with budget k: exactly k additions.
      std::vector<SensorIndex> sel = std::move(required);
      std::vector<bool> chosen(bank.size(), false);
      for (SensorIndex i : sel) chosen[i] = true;
      for (std::size_t step = 0; step < k; ++step) {
        std::size_t best = bank.size();
        double best_value = std::numeric_limits<double>::infinity();
        sel.push_back(0);
        for (SensorIndex j = 0; j < bank.size(); ++j) {
          if (chosen[j]) continue;
          sel.back() = j;
          const double value = state_entropy(belief, bank, sel);
          if (best == bank.size() || value < best_value - kSelectionTieTolerance) {
            best = j;
            best_value = value;
          }
        }
        sel.back() = best;
        chosen[best] = true;
      }
      return sel;
    }
    case BaselineMethod::kRandom: {
      if (rng == nullptr) throw InvalidArgument("baseline_select: random method needs a stream");
      std::vector<SensorIndex> pool;
      std::vector<bool> taken(bank.size(), false);
      for (SensorIndex i : required) taken[i] = true;
      for (SensorIndex i = 0; i < bank.size(); ++i) {
        if (!taken[i]) pool.push_back(i);
      }
      std::vector<SensorIndex> sel = std::move(required);
      // Partial Fisher-Yates.
      for (std::size_t step = 0; step < k; ++step) {
        const std::size_t j = step + static_cast<std::size_t>(rng->below(pool.size() - step));
        std::swap(pool[step], pool[j]);
        sel.push_back(pool[step]);
      }
      return sel;
    }
  }
  return {};
}

}  // namespace inattention

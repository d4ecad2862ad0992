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

// Episode simulation, Monte Carlo return estimates and exact finite-horizon
// evaluation of the two-player sensing/acting loop.
//
// One step of the loop:
//   1. Player 1 selects sensors from its prior belief b_t.
//   2. Observations are drawn at the true state; b_t -> b'_t by Bayes' rule.
//   3. Player 1 picks d1 from b'_t and samples a1; Player 2 acts
//      (equilibrium or deceptive); reward and transition.
//   4. Player 1 predicts b_{t+1} from b'_t, a1 and the assumed pi2*.

#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "inattention/agents.hpp"
#include "inattention/common.hpp"
#include "inattention/equilibrium.hpp"
#include "inattention/game.hpp"
#include "inattention/parallel.hpp"
#include "inattention/rng.hpp"
#include "inattention/sensing.hpp"

namespace inattention {

// Smallest T >= 0 with r_max * gamma^T / (1 - gamma) <= tol.
inline std::size_t horizon_for(double tol, double r_max, double gamma) {
  if (!(tol > 0.0)) throw InvalidArgument("horizon_for: tolerance must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidArgument("horizon_for: discount outside [0, 1)");
  auto tail = [&](std::size_t t) { return r_max * std::pow(gamma, static_cast<double>(t)) / (1.0 - gamma); };
  if (tail(0) <= tol) return 0;
  if (gamma == 0.0) return 1;
  const double guess = std::log(tol * (1.0 - gamma) / r_max) / std::log(gamma);
  auto t = static_cast<std::size_t>(std::max(0.0, std::floor(guess) - 1.0));
  while (tail(t) > tol) ++t;
  while (t > 0 && tail(t - 1) <= tol) --t;
  return t;
}

inline std::size_t default_horizon(const ZeroSumGame& game) {
  return horizon_for(1e-3, std::max(game.r_max(), 1e-12), game.gamma());
}

struct SparseBelief {
  std::vector<StateIndex> states;
  std::vector<double> probs;

  static SparseBelief from_dense(std::span<const double> dense) {
    SparseBelief out;
    for (StateIndex s = 0; s < dense.size(); ++s) {
      if (dense[s] != 0.0) {
        out.states.push_back(s);
        out.probs.push_back(dense[s]);
      }
    }
    return out;
  }
  double at(StateIndex s) const {
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (states[i] == s) return probs[i];
    }
    return 0.0;
  }
  friend bool operator==(const SparseBelief&, const SparseBelief&) = default;
};

struct SurpriseEvent {
  std::size_t step = 0;
  std::vector<SensorIndex> sensors;
  JointObservation observation;
  double predicted_probability = 0.0;
  friend bool operator==(const SurpriseEvent&, const SurpriseEvent&) = default;
};

struct StepRecord {
  std::size_t t = 0;
  StateIndex state = 0;
  std::vector<SensorIndex> sensors;
  JointObservation observation;
  SparseBelief prior;
  SparseBelief posterior;
  std::size_t d1_index = 0;  // into Player 1's candidate set
  ActionIndex a1 = 0;
  ActionIndex a2 = 0;
  double reward = 0.0;
  bool surprise = false;
  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::vector<StepRecord> steps;
  std::vector<SurpriseEvent> surprises;
  double discounted_return = 0.0;
  bool absorbed = false;  // stopped early in an absorbing zero-reward state
  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct EpisodeOptions {
  bool record_beliefs = true;
  // Stop once the true state is absorbing with zero reward; the remaining
  // steps would contribute nothing to the return.
  bool stop_when_absorbed = true;
};

namespace detail {

inline std::vector<bool> absorbing_states(const ZeroSumGame& game) {
  std::vector<bool> out(game.num_states());
  for (StateIndex s = 0; s < game.num_states(); ++s) out[s] = game.is_absorbing_zero(s);
  return out;
}

inline std::vector<SensorIndex> select_sensors(const SelectorSpec& spec, const Belief& prior,
                                               const SensorBank& bank, const DeltaMap& delta,
                                               RandomStream* rng) {
  switch (spec.kind) {
    case SelectorKind::kWeighted:
      return greedy_select(prior, bank, delta, spec.stop, spec.required).sensors;
    case SelectorKind::kNonWeighted:
      return baseline_select(prior, bank, spec.k, BaselineMethod::kNonWeighted, nullptr, spec.required);
    case SelectorKind::kRandom:
      return baseline_select(prior, bank, spec.k, BaselineMethod::kRandom, rng, spec.required);
    case SelectorKind::kAll:
      return baseline_select(prior, bank, 0, BaselineMethod::kAll);
    case SelectorKind::kNone:
      return spec.required;
    case SelectorKind::kPerfect:
      return {};
  }
  return {};
}

inline std::vector<double> normalized(std::vector<double> w) {
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) throw NumericalError("belief update produced no mass");
  for (double& x : w) x /= total;
  return w;
}

// Number of leading sensors in `sensors` that come from the selector's
// required set.
inline std::size_t required_prefix(const SelectorSpec& spec, std::span<const SensorIndex> sensors) {
  std::size_t n = 0;
  while (n < sensors.size() && n < spec.required.size() && sensors[n] == spec.required[n]) ++n;
  return n;
}

struct StagedUpdate {
  Belief belief;
  bool surprise = false;
  double evidence = 1.0;  // of the stage that was discarded, if any
};

// Bayes update in two stages: the required (free) sensors first, then the
// chosen ones. A zero-probability reading discards only its own stage, so
// a surprising paid observation never erases what the free sensors showed.
inline StagedUpdate staged_update(const Belief& prior, const SensorBank& bank,
                                  std::span<const SensorIndex> sensors, const JointObservation& obs,
                                  std::size_t split) {
  StagedUpdate out{prior};
  const std::size_t cut[3] = {0, split, sensors.size()};
  for (int stage = 0; stage < 2; ++stage) {
    if (cut[stage] == cut[stage + 1]) continue;
    JointObservation part;
    part.symbols.assign(obs.symbols.begin() + static_cast<std::ptrdiff_t>(cut[stage]),
                        obs.symbols.begin() + static_cast<std::ptrdiff_t>(cut[stage + 1]));
    ObservationUpdate upd =
        bayes_obs_update(out.belief, bank, sensors.subspan(cut[stage], cut[stage + 1] - cut[stage]), part);
    if (upd.surprise) {
      out.surprise = true;
      out.evidence = upd.evidence;
    } else {
      out.belief = std::move(upd.belief);
    }
  }
  return out;
}

}  // namespace detail

// Simulates one episode of at most `horizon` steps from the game's initial
// state. All randomness comes from labeled substreams of the seed's stream.
inline EpisodeRecord run_episode(const ZeroSumGame& game, const SensorBank& bank,
                                 const Player1Config& p1, Player2Mode p2_mode, std::uint64_t seed,
                                 std::size_t horizon, const Belief& initial_belief,
                                 const EpisodeOptions& options = {}) {
  p1.check_game(game);
  if (initial_belief.size() != game.num_states()) {
    throw InvalidArgument("run_episode: initial belief size does not match the game");
  }
  if (bank.size() > 0 && bank[0].num_states() != game.num_states()) {
    throw InvalidArgument("run_episode: sensor bank size does not match the game");
  }
  const RandomStream root = episode_stream(seed);
  RandomStream obs_rng = root.substream("observation");
  RandomStream selector_rng = root.substream("selector");
  RandomStream p1_rng = root.substream("player1");
  RandomStream p2_rng = root.substream("player2");
  RandomStream env_rng = root.substream("transition");

  const auto absorbing = options.stop_when_absorbed ? detail::absorbing_states(game) : std::vector<bool>{};
  const EquilibriumSolution& eq = p1.equilibrium();

  EpisodeRecord rec;
  rec.seed = seed;
  StateIndex s = game.initial_state();
  Belief prior = initial_belief;
  double discount = 1.0;
  for (std::size_t t = 0; t < horizon; ++t) {
    if (options.stop_when_absorbed && absorbing[s]) {
      rec.absorbed = true;
      break;
    }
    StepRecord step;
    step.t = t;
    step.state = s;
    step.sensors = detail::select_sensors(p1.selector(), prior, bank, p1.delta(), &selector_rng);

    Belief posterior = prior;
    if (p1.selector().kind == SelectorKind::kPerfect) {
      posterior = Belief::dirac(game.num_states(), s);
    } else if (!step.sensors.empty()) {
      for (SensorIndex i : step.sensors) {
        step.observation.symbols.push_back(obs_rng.categorical(bank[i].likelihood_row(s)));
      }
      detail::StagedUpdate upd =
          detail::staged_update(prior, bank, step.sensors, step.observation,
                                detail::required_prefix(p1.selector(), step.sensors));
      posterior = std::move(upd.belief);
      if (upd.surprise) {
        step.surprise = true;
        rec.surprises.push_back({t, step.sensors, step.observation, upd.evidence});
      }
    }

    step.d1_index = best_candidate(posterior.probs(), p1.candidate_values());
    const ActionDistribution& d1 = p1.candidates()[step.d1_index];
    step.a1 = p1_rng.categorical(d1.probs());
    step.a2 = p2_act(p2_mode, s, d1.probs(), eq, p2_rng);
    step.reward = game.reward(s, step.a1, step.a2);
    rec.discounted_return += discount * step.reward;
    discount *= game.gamma();

    auto row = game.transition(s, step.a1, step.a2);
    std::vector<double> probs(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) probs[k] = row[k].prob;
    const StateIndex next = row[env_rng.categorical(probs)].next;

    Belief predicted(detail::normalized(predict_weights(posterior.probs(), step.a1, p1.assumed_pi2(), game)));
    if (options.record_beliefs) {
      step.prior = SparseBelief::from_dense(prior.probs());
      step.posterior = SparseBelief::from_dense(posterior.probs());
    }
    rec.steps.push_back(std::move(step));
    prior = std::move(predicted);
    s = next;
  }
  if (!rec.absorbed && options.stop_when_absorbed && horizon > 0 && absorbing[s]) rec.absorbed = true;
  return rec;
}

struct ReturnEstimate {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
  std::size_t runs = 0;
  double half_width = 0.0;  // 95% normal-approximation half-width, 1.96 sd / sqrt(n)
};

inline ReturnEstimate summarize_returns(std::span<const double> returns) {
  ReturnEstimate est;
  est.runs = returns.size();
  if (returns.empty()) return est;
  double sum = 0.0;
  for (double r : returns) sum += r;
  est.mean = sum / static_cast<double>(returns.size());
  if (returns.size() > 1) {
    double ss = 0.0;
    for (double r : returns) ss += (r - est.mean) * (r - est.mean);
    est.sd = std::sqrt(ss / static_cast<double>(returns.size() - 1));
  }
  est.half_width = 1.96 * est.sd / std::sqrt(static_cast<double>(returns.size()));
  return est;
}

struct EstimateOptions {
  std::size_t threads = 1;
  EpisodeOptions episode = {false, true};
};

// Runs n independent episodes with seeds base_seed + i. The per-episode
// returns are reduced in index order, so the result does not depend on the
// thread count.
inline ReturnEstimate estimate_return(std::size_t n, std::uint64_t base_seed,
                                      const ZeroSumGame& game, const SensorBank& bank,
                                      const Player1Config& p1, Player2Mode p2_mode,
                                      std::size_t horizon, const Belief& initial_belief,
                                      const EstimateOptions& options = {},
                                      std::vector<double>* returns_out = nullptr) {
  if (n < 2) throw InvalidArgument("estimate_return: need at least two runs");
  std::vector<double> returns(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    returns[i] = run_episode(game, bank, p1, p2_mode, base_seed + i, horizon, initial_belief,
                             options.episode)
                     .discounted_return;
  });
  if (returns_out) *returns_out = returns;
  return summarize_returns(returns);
}

struct ExactEvaluation {
  double lower = 0.0;
  double upper = 0.0;
  double truncated_expectation = 0.0;  // E[sum_{t<T} gamma^t r_t]
  double tail = 0.0;                   // r_max gamma^T / (1 - gamma)
  std::size_t nodes = 0;
  // Largest weighted-entropy objective of any selected sensor set on the
  // tree (only meaningful for the weighted selector).
  double max_objective = 0.0;
};

inline constexpr std::size_t kExactEvalNodeCap = 10'000'000;

// Exact expectation of the truncated discounted return over every
// stochastic branch (true state, observations, both players' actions,
// transitions). Tree nodes with equal (true state, belief) are merged,
// since the belief is a deterministic function of the observable history.
// The true initial state is drawn from `true_initial` (defaults to the
// belief itself: a matched prior).
inline ExactEvaluation exact_eval(const ZeroSumGame& game, const SensorBank& bank,
                                  const Player1Config& p1, Player2Mode p2_mode, std::size_t horizon,
                                  const Belief& initial_belief,
                                  std::optional<Belief> true_initial = std::nullopt,
                                  std::size_t node_cap = kExactEvalNodeCap) {
  p1.check_game(game);
  if (p1.selector().kind == SelectorKind::kRandom) {
    throw InvalidArgument("exact_eval: the random selector is not deterministic");
  }
  const Belief& start = true_initial ? *true_initial : initial_belief;
  if (start.size() != game.num_states() || initial_belief.size() != game.num_states()) {
    throw InvalidArgument("exact_eval: belief size does not match the game");
  }
  const EquilibriumSolution& eq = p1.equilibrium();
  using Key = std::pair<StateIndex, std::vector<double>>;
  std::map<Key, double> layer;
  for (StateIndex s = 0; s < game.num_states(); ++s) {
    if (start[s] > 0.0) {
      layer[{s, std::vector<double>(initial_belief.probs().begin(), initial_belief.probs().end())}] += start[s];
    }
  }

  ExactEvaluation out;
  out.nodes = layer.size();
  double discount = 1.0;
  for (std::size_t t = 0; t < horizon && !layer.empty(); ++t) {
    std::map<Key, double> next_layer;
    for (const auto& [key, weight] : layer) {
      const StateIndex s = key.first;
      const Belief prior(key.second);
      auto sensors = detail::select_sensors(p1.selector(), prior, bank, p1.delta(), nullptr);
      if (p1.selector().kind == SelectorKind::kWeighted) {
        out.max_objective = std::max(out.max_objective,
                                     weighted_entropy_objective(prior, bank, sensors, p1.delta()));
      }
      // Observation outcomes at the true state.
      std::vector<std::pair<Belief, double>> posteriors;
      if (p1.selector().kind == SelectorKind::kPerfect) {
        posteriors.emplace_back(Belief::dirac(game.num_states(), s), 1.0);
      } else if (sensors.empty()) {
        posteriors.emplace_back(prior, 1.0);
      } else {
        const Belief at_state = Belief::dirac(game.num_states(), s);
        const std::size_t split = detail::required_prefix(p1.selector(), sensors);
        for (const ObservationOutcome& o : joint_obs_dist(at_state, bank, sensors)) {
          posteriors.emplace_back(detail::staged_update(prior, bank, sensors, o.observation, split).belief,
                                  o.probability);
        }
      }
      for (const auto& [posterior, p_obs] : posteriors) {
        const std::size_t d = best_candidate(posterior.probs(), p1.candidate_values());
        const ActionDistribution& d1 = p1.candidates()[d];
        std::vector<double> p2_probs(game.num_actions2(), 0.0);
        if (p2_mode == Player2Mode::kEquilibrium) {
          auto pi = eq.policy2()[s].probs();
          p2_probs.assign(pi.begin(), pi.end());
        } else {
          p2_probs[deceptive_action(s, d1.probs(), eq)] = 1.0;
        }
        for (ActionIndex a1 = 0; a1 < game.num_actions1(); ++a1) {
          if (d1[a1] == 0.0) continue;
          std::vector<double> predicted =
              detail::normalized(predict_weights(posterior.probs(), a1, p1.assumed_pi2(), game));
          for (ActionIndex a2 = 0; a2 < game.num_actions2(); ++a2) {
            if (p2_probs[a2] == 0.0) continue;
            const double w = weight * p_obs * d1[a1] * p2_probs[a2];
            out.truncated_expectation += discount * w * game.reward(s, a1, a2);
            if (t + 1 == horizon) continue;
            for (const Transition& tr : game.transition(s, a1, a2)) {
              next_layer[{tr.next, predicted}] += w * tr.prob;
              if (next_layer.size() > node_cap) throw CapExceeded("exact_eval: node cap exceeded");
            }
          }
        }
      }
    }
    out.nodes += next_layer.size();
    if (out.nodes > node_cap) throw CapExceeded("exact_eval: node cap exceeded");
    layer = std::move(next_layer);
    discount *= game.gamma();
  }
  out.tail = game.r_max() * std::pow(game.gamma(), static_cast<double>(horizon)) / (1.0 - game.gamma());
  out.lower = out.truncated_expectation - out.tail;
  out.upper = out.truncated_expectation + out.tail;
  return out;
}

// One row per step. Columns:
// episode,seed,t,state,sensors,observation,surprise,d1_index,a1,a2,reward,posterior_true
inline void write_episode_csv(std::ostream& os, std::span<const EpisodeRecord> episodes,
                              const SensorBank& bank, bool header = true) {
  if (header) os << "episode,seed,t,state,sensors,observation,surprise,d1_index,a1,a2,reward,posterior_true\n";
  const auto old_precision = os.precision(12);
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    for (const StepRecord& st : episodes[e].steps) {
      os << e << ',' << episodes[e].seed << ',' << st.t << ',' << st.state << ',';
      for (std::size_t k = 0; k < st.sensors.size(); ++k) os << (k ? ";" : "") << st.sensors[k];
      os << ',';
      for (std::size_t k = 0; k < st.observation.symbols.size(); ++k) {
        os << (k ? ";" : "") << bank[st.sensors[k]].alphabet()[st.observation.symbols[k]];
      }
      os << ',' << (st.surprise ? 1 : 0) << ',' << st.d1_index << ',' << st.a1 << ',' << st.a2 << ','
         << st.reward << ',' << st.posterior.at(st.state) << '\n';
    }
  }
  os.precision(old_precision);
}

// One summary line per episode. Columns: episode,seed,steps,return,surprises,absorbed
inline void write_episode_summary_csv(std::ostream& os, std::span<const EpisodeRecord> episodes,
                                      bool header = true) {
  if (header) os << "episode,seed,steps,return,surprises,absorbed\n";
  const auto old_precision = os.precision(12);
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    const auto& ep = episodes[e];
    os << e << ',' << ep.seed << ',' << ep.steps.size() << ',' << ep.discounted_return << ','
       << ep.surprises.size() << ',' << (ep.absorbed ? 1 : 0) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace inattention

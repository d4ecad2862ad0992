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

// JSON documents for games, sensor banks, scenarios and cached solutions;
// CSV export of solutions; run manifests with content digests.
//
// Doubles are written with 17 significant digits in JSON, so a game or a
// solution survives a write/read cycle bit for bit.

#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "inattention/agents.hpp"
#include "inattention/common.hpp"
#include "inattention/equilibrium.hpp"
#include "inattention/game.hpp"
#include "inattention/scenarios.hpp"
#include "inattention/sensing.hpp"

namespace inattention {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// Malformed document. The message names the offending field.
class ConfigError : public InvalidArgument {
 public:
  explicit ConfigError(const std::string& what) : InvalidArgument(what) {}
};

namespace detail {

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(path + "." + key + ": missing field");
  return *it;
}

template <typename T>
T as(const Json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + ": wrong type");
  }
}

template <typename T>
T get(const Json& j, const std::string& key, const std::string& path) {
  return as<T>(field(j, key, path), path + "." + key);
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return as<T>(j.at(key), path + "." + key);
}

// Rethrows validation failures from constructors as config errors.
template <typename F>
auto building(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Games.

// transitions[s][a1][a2] is a list of [next, prob] pairs (sparse). Readers
// also accept a dense row of num_states probabilities.
inline Json game_to_json(const ZeroSumGame& game) {
  Json j;
  j["num_states"] = game.num_states();
  j["num_actions1"] = game.num_actions1();
  j["num_actions2"] = game.num_actions2();
  j["gamma"] = game.gamma();
  j["initial_state"] = game.initial_state();
  j["r_max"] = game.r_max();
  Json trans = Json::array(), rew = Json::array();
  for (StateIndex s = 0; s < game.num_states(); ++s) {
    Json ts = Json::array(), rs = Json::array();
    for (ActionIndex a1 = 0; a1 < game.num_actions1(); ++a1) {
      Json ta = Json::array(), ra = Json::array();
      for (ActionIndex a2 = 0; a2 < game.num_actions2(); ++a2) {
        Json row = Json::array();
        for (const Transition& t : game.transition(s, a1, a2)) row.push_back({t.next, t.prob});
        ta.push_back(std::move(row));
        ra.push_back(game.reward(s, a1, a2));
      }
      ts.push_back(std::move(ta));
      rs.push_back(std::move(ra));
    }
    trans.push_back(std::move(ts));
    rew.push_back(std::move(rs));
  }
  j["transitions"] = std::move(trans);
  j["rewards"] = std::move(rew);
  const GameLabels& l = game.labels();
  if (!l.states.empty() || !l.actions1.empty() || !l.actions2.empty()) {
    j["labels"] = {{"states", l.states}, {"actions1", l.actions1}, {"actions2", l.actions2}};
  }
  return j;
}

inline ZeroSumGame game_from_json(const Json& j, const std::string& path = "game") {
  using detail::get;
  const auto n_s = get<std::size_t>(j, "num_states", path);
  const auto n_a1 = get<std::size_t>(j, "num_actions1", path);
  const auto n_a2 = get<std::size_t>(j, "num_actions2", path);
  const auto gamma = get<double>(j, "gamma", path);
  const auto s0 = detail::get_or<std::size_t>(j, "initial_state", 0, path);
  if (n_s == 0 || n_a1 == 0 || n_a2 == 0) throw ConfigError(path + ": dimensions must be positive");
  const Json& trans = detail::field(j, "transitions", path);
  const Json& rew = detail::field(j, "rewards", path);
  auto check_len = [&](const Json& a, std::size_t n, const std::string& p) {
    if (!a.is_array() || a.size() != n) {
      throw ConfigError(p + ": expected an array of length " + std::to_string(n));
    }
  };
  check_len(trans, n_s, path + ".transitions");
  check_len(rew, n_s, path + ".rewards");
  std::vector<std::vector<Transition>> rows;
  rows.reserve(n_s * n_a1 * n_a2);
  std::vector<double> rewards;
  rewards.reserve(n_s * n_a1 * n_a2);
  for (StateIndex s = 0; s < n_s; ++s) {
    const std::string ps = "[" + std::to_string(s) + "]";
    check_len(trans[s], n_a1, path + ".transitions" + ps);
    check_len(rew[s], n_a1, path + ".rewards" + ps);
    for (ActionIndex a1 = 0; a1 < n_a1; ++a1) {
      const std::string pa = ps + "[" + std::to_string(a1) + "]";
      check_len(trans[s][a1], n_a2, path + ".transitions" + pa);
      check_len(rew[s][a1], n_a2, path + ".rewards" + pa);
      for (ActionIndex a2 = 0; a2 < n_a2; ++a2) {
        const std::string p = path + ".transitions" + pa + "[" + std::to_string(a2) + "]";
        const Json& row = trans[s][a1][a2];
        if (!row.is_array()) throw ConfigError(p + ": expected an array");
        std::vector<Transition> out;
        if (!row.empty() && row[0].is_array()) {
          for (const Json& pair : row) {
            if (!pair.is_array() || pair.size() != 2) throw ConfigError(p + ": expected [next, prob] pairs");
            out.push_back({detail::as<StateIndex>(pair[0], p), detail::as<double>(pair[1], p)});
          }
        } else {
          check_len(row, n_s, p);
          for (StateIndex q = 0; q < n_s; ++q) out.push_back({q, detail::as<double>(row[q], p)});
        }
        rows.push_back(std::move(out));
        rewards.push_back(detail::as<double>(rew[s][a1][a2], path + ".rewards" + pa));
      }
    }
  }
  std::optional<double> r_max;
  if (j.contains("r_max")) r_max = detail::get<double>(j, "r_max", path);
  ZeroSumGame game = detail::building(path, [&] {
    return ZeroSumGame(n_s, n_a1, n_a2, std::move(rows), std::move(rewards), gamma, s0, r_max);
  });
  if (j.contains("labels")) {
    const Json& l = j["labels"];
    GameLabels labels{detail::get_or<std::vector<std::string>>(l, "states", {}, path + ".labels"),
                      detail::get_or<std::vector<std::string>>(l, "actions1", {}, path + ".labels"),
                      detail::get_or<std::vector<std::string>>(l, "actions2", {}, path + ".labels")};
    detail::building(path + ".labels", [&] {
      game.set_labels(std::move(labels));
      return 0;
    });
  }
  const auto violations = validate_game(game);
  if (!violations.empty()) throw ConfigError(path + ": " + violations.front().message);
  return game;
}

// ---------------------------------------------------------------------------
// Sensor banks.

inline Json bank_to_json(const SensorBank& bank) {
  Json sensors = Json::array();
  for (const Sensor& sensor : bank.sensors()) {
    Json lik = Json::array();
    for (StateIndex s = 0; s < sensor.num_states(); ++s) {
      auto row = sensor.likelihood_row(s);
      lik.push_back(std::vector<double>(row.begin(), row.end()));
    }
    sensors.push_back({{"alphabet", sensor.alphabet()}, {"likelihood", std::move(lik)}, {"cost", sensor.cost()}});
  }
  return {{"budget", bank.budget()}, {"sensors", std::move(sensors)}};
}

inline SensorBank bank_from_json(const Json& j, const std::string& path = "sensors") {
  const Json& list = detail::field(j, "sensors", path);
  if (!list.is_array()) throw ConfigError(path + ".sensors: expected an array");
  std::vector<Sensor> sensors;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string p = path + ".sensors[" + std::to_string(i) + "]";
    auto alphabet = detail::get<std::vector<std::string>>(list[i], "alphabet", p);
    auto lik = detail::get<std::vector<std::vector<double>>>(list[i], "likelihood", p);
    const double cost = detail::get_or<double>(list[i], "cost", 1.0, p);
    sensors.push_back(detail::building(p, [&] { return Sensor(std::move(alphabet), std::move(lik), cost); }));
  }
  const double budget = detail::get_or<double>(j, "budget", 0.0, path);
  return detail::building(path, [&] { return SensorBank(std::move(sensors), budget); });
}

// ---------------------------------------------------------------------------
// Solutions.

inline Json solution_to_json(const EquilibriumSolution& sol) {
  auto policy = [](const StationaryPolicy& p) {
    Json out = Json::array();
    for (const auto& d : p.distributions()) out.push_back(std::vector<double>(d.probs().begin(), d.probs().end()));
    return out;
  };
  return {{"num_states", sol.num_states()},
          {"num_actions1", sol.num_actions1()},
          {"num_actions2", sol.num_actions2()},
          {"gamma", sol.gamma()},
          {"values", std::vector<double>(sol.values().begin(), sol.values().end())},
          {"policy1", policy(sol.policy1())},
          {"policy2", policy(sol.policy2())},
          {"q", std::vector<double>(sol.q_tensor().begin(), sol.q_tensor().end())},
          {"residual", sol.residual()},
          {"residual_history",
           std::vector<double>(sol.residual_history().begin(), sol.residual_history().end())},
          {"game_fingerprint", to_hex(sol.game_fingerprint())}};
}

inline EquilibriumSolution solution_from_json(const Json& j, const std::string& path = "solution") {
  using detail::get;
  auto policy = [&](const std::string& key) {
    std::vector<ActionDistribution> out;
    for (auto& probs : get<std::vector<std::vector<double>>>(j, key, path)) {
      out.push_back(detail::building(path + "." + key, [&] { return ActionDistribution(std::move(probs)); }));
    }
    return StationaryPolicy(std::move(out));
  };
  const auto fp = get<std::string>(j, "game_fingerprint", path);
  return detail::building(path, [&] {
    return EquilibriumSolution(get<std::size_t>(j, "num_states", path), get<std::size_t>(j, "num_actions1", path),
                               get<std::size_t>(j, "num_actions2", path), get<double>(j, "gamma", path),
                               get<std::vector<double>>(j, "values", path), policy("policy1"), policy("policy2"),
                               get<std::vector<double>>(j, "q", path), get<double>(j, "residual", path),
                               get<std::vector<double>>(j, "residual_history", path),
                               std::stoull(fp, nullptr, 16));
  });
}

// state,value,p1_<action>...,p2_<action>...
inline void write_solution_csv(std::ostream& os, const EquilibriumSolution& sol, const GameLabels& labels = {}) {
  auto name = [](const std::vector<std::string>& names, std::size_t i) {
    return i < names.size() ? names[i] : std::to_string(i);
  };
  os << "state,value";
  for (ActionIndex a = 0; a < sol.num_actions1(); ++a) os << ",p1_" << name(labels.actions1, a);
  for (ActionIndex a = 0; a < sol.num_actions2(); ++a) os << ",p2_" << name(labels.actions2, a);
  os << '\n';
  const auto old = os.precision(12);
  for (StateIndex s = 0; s < sol.num_states(); ++s) {
    os << '"' << name(labels.states, s) << '"' << ',' << sol.value(s);
    for (double p : sol.policy1()[s].probs()) os << ',' << p;
    for (double p : sol.policy2()[s].probs()) os << ',' << p;
    os << '\n';
  }
  os.precision(old);
}

// On-disk cache of solved games keyed by game fingerprint and tolerance.
class SolutionCache {
 public:
  explicit SolutionCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

  // INATTENTION_CACHE_DIR, else a directory under the system temp path.
  static SolutionCache from_environment() {
    if (const char* env = std::getenv("INATTENTION_CACHE_DIR"); env != nullptr && *env != '\0') {
      return SolutionCache(env);
    }
    return SolutionCache(std::filesystem::temp_directory_path() / "inattention-cache");
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path path_for(const ZeroSumGame& game, double tol) const {
    std::ostringstream name;
    name << "solution-" << to_hex(game.fingerprint()) << "-tol" << std::setprecision(3) << tol << ".json";
    return dir_ / name.str();
  }

  std::optional<EquilibriumSolution> load(const ZeroSumGame& game, double tol) const {
    std::ifstream in(path_for(game, tol));
    if (!in) return std::nullopt;
    try {
      Json j = Json::parse(in);
      EquilibriumSolution sol = solution_from_json(j);
      if (sol.game_fingerprint() != game.fingerprint()) return std::nullopt;
      return sol;
    } catch (const std::exception&) {
      return std::nullopt;  // unreadable entries are re-solved
    }
  }

  void store(const ZeroSumGame& game, double tol, const EquilibriumSolution& sol) const {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    const auto target = path_for(game, tol);
    const auto tmp = target.string() + ".tmp";
    {
      std::ofstream out(tmp);
      if (!out) return;  // caching is best effort
      out << solution_to_json(sol).dump();
    }
    std::filesystem::rename(tmp, target, ec);
  }

  // Loads or solves, then stores.
  std::shared_ptr<const EquilibriumSolution> solve(const ZeroSumGame& game, const GameSolveOptions& options,
                                                   bool* hit = nullptr) const {
    if (auto cached = load(game, options.tol)) {
      if (hit) *hit = true;
      return std::make_shared<const EquilibriumSolution>(std::move(*cached));
    }
    if (hit) *hit = false;
    auto sol = std::make_shared<const EquilibriumSolution>(game_solve(game, options));
    store(game, options.tol, *sol);
    return sol;
  }

 private:
  std::filesystem::path dir_;
};

// ---------------------------------------------------------------------------
// Scenario documents.

struct ScenarioInstance {
  std::string name;
  ZeroSumGame game;
  SensorBank bank;
  Belief initial_belief;
  SelectorSpec selector;
  ActionRule rule = ActionRule::kSupport;
  std::optional<GridScenario> grid;
};

namespace detail {

inline SelectorSpec selector_from_json(const Json& j, const std::string& path) {
  const auto kind = get_or<std::string>(j, "selector", "weighted", path);
  const auto required = get_or<std::vector<SensorIndex>>(j, "required", {}, path);
  if (kind == "weighted") {
    if (j.contains("threshold")) {
      return SelectorSpec::weighted(StopRule::threshold(get<double>(j, "threshold", path)), required);
    }
    return SelectorSpec::weighted(StopRule::budget(get_or<double>(j, "budget", 1.0, path)), required);
  }
  if (kind == "non_weighted") return SelectorSpec::non_weighted(get<std::size_t>(j, "k", path), required);
  if (kind == "random") return SelectorSpec::random(get<std::size_t>(j, "k", path), required);
  if (kind == "none") return SelectorSpec::none(required);
  if (kind == "all") return SelectorSpec::all();
  if (kind == "perfect") return SelectorSpec::perfect();
  throw ConfigError(path + ".selector: unknown selector '" + kind + "'");
}

inline ActionRule rule_from_json(const Json& j, const std::string& path, ActionRule fallback) {
  const auto rule = get_or<std::string>(j, "rule", fallback == ActionRule::kQmdp ? "qmdp" : "support", path);
  if (rule == "qmdp") return ActionRule::kQmdp;
  if (rule == "support") return ActionRule::kSupport;
  throw ConfigError(path + ".rule: unknown rule '" + rule + "'");
}

inline Belief belief_from_json(const Json& j, const std::string& key, const ZeroSumGame& game,
                               const std::string& path) {
  if (!j.contains(key)) return Belief::dirac(game.num_states(), game.initial_state());
  const Json& b = j.at(key);
  if (b.is_number_unsigned()) {
    const auto s = as<StateIndex>(b, path + "." + key);
    if (s >= game.num_states()) throw ConfigError(path + "." + key + ": state out of range");
    return Belief::dirac(game.num_states(), s);
  }
  if (b.is_string()) {
    const auto& names = game.labels().states;
    for (StateIndex s = 0; s < names.size(); ++s) {
      if (names[s] == b.get<std::string>()) return Belief::dirac(game.num_states(), s);
    }
    throw ConfigError(path + "." + key + ": unknown state '" + b.get<std::string>() + "'");
  }
  auto probs = as<std::vector<double>>(b, path + "." + key);
  if (probs.size() != game.num_states()) throw ConfigError(path + "." + key + ": wrong length");
  return building(path + "." + key, [&] { return Belief(std::move(probs)); });
}

}  // namespace detail

// Builds a scenario from a document with a `scenario` discriminator:
// fig1, fig3, grid, random or custom. Builtins take their parameters as
// top-level fields.
inline ScenarioInstance scenario_from_json(const Json& doc) {
  using detail::get_or;
  const std::string path = "config";
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  const auto name = detail::get<std::string>(doc, "scenario", path);
  const Json p1 = doc.contains("player1") ? doc.at("player1") : Json::object();
  const std::string p1_path = path + ".player1";

  if (name == "fig1") {
    const double gamma = get_or<double>(doc, "gamma", 0.9, path);
    auto sc = detail::building(path, [&] { return build_fig1_mdp(gamma); });
    ZeroSumGame game = fig1_game(sc);
    Belief b0 = detail::belief_from_json(doc, "initial_belief", game, path);
    return {name, std::move(game), std::move(sc.bank), std::move(b0),
            p1.contains("selector") ? detail::selector_from_json(p1, p1_path) : SelectorSpec::weighted(StopRule::budget(0.0)),
            detail::rule_from_json(p1, p1_path, ActionRule::kQmdp), std::nullopt};
  }
  if (name == "fig3") {
    const double eps = get_or<double>(doc, "epsilon", 0.5, path);
    const double gamma = get_or<double>(doc, "gamma", 0.9, path);
    auto sc = detail::building(path, [&] { return build_fig3_game(eps, gamma); });
    Belief b0 = detail::belief_from_json(doc, "initial_belief", sc.game, path);
    return {name, std::move(sc.game), std::move(sc.bank), std::move(b0),
            p1.contains("selector") ? detail::selector_from_json(p1, p1_path) : SelectorSpec::weighted(StopRule::budget(1.0)),
            detail::rule_from_json(p1, p1_path, ActionRule::kSupport), std::nullopt};
  }
  if (name == "grid") {
    GridConfig cfg;
    cfg.width = get_or<int>(doc, "width", cfg.width, path);
    cfg.height = get_or<int>(doc, "height", cfg.height, path);
    cfg.p1_start = get_or<int>(doc, "p1_start", cfg.p1_start, path);
    cfg.p2_start = get_or<std::array<int, 2>>(doc, "p2_start", cfg.p2_start, path);
    cfg.move_success = get_or<double>(doc, "move_success", cfg.move_success, path);
    const auto noise = get_or<std::string>(doc, "move_noise", "attacker", path);
    if (noise == "attacker") cfg.move_noise = MoveNoise::kAttacker;
    else if (noise == "shared") cfg.move_noise = MoveNoise::kShared;
    else if (noise == "independent") cfg.move_noise = MoveNoise::kIndependent;
    else throw ConfigError(path + ".move_noise: unknown value '" + noise + "'");
    cfg.sensor_true = get_or<double>(doc, "sensor_true", cfg.sensor_true, path);
    cfg.sensor_adjacent = get_or<double>(doc, "sensor_adjacent", cfg.sensor_adjacent, path);
    cfg.budget = get_or<double>(doc, "budget", cfg.budget, path);
    cfg.gamma = get_or<double>(doc, "gamma", cfg.gamma, path);
    GridScenario sc = detail::building(path, [&] { return build_line_defense(cfg); });
    Belief b0 = Belief::dirac(sc.game.num_states(), sc.game.initial_state());
    SelectorSpec sel = p1.contains("selector") ? detail::selector_from_json(p1, p1_path) : grid_selector(sc);
    ZeroSumGame game = sc.game;
    SensorBank bank = sc.bank;
    return {name, std::move(game), std::move(bank), std::move(b0), std::move(sel),
            detail::rule_from_json(p1, p1_path, ActionRule::kSupport), std::move(sc)};
  }
  if (name == "random") {
    RandomGameConfig cfg;
    cfg.n_states = get_or<std::size_t>(doc, "n_states", cfg.n_states, path);
    cfg.n_actions = get_or<std::size_t>(doc, "n_actions", cfg.n_actions, path);
    cfg.n_sensors = get_or<std::size_t>(doc, "n_sensors", cfg.n_sensors, path);
    cfg.obs_per_sensor = get_or<std::size_t>(doc, "obs_per_sensor", cfg.obs_per_sensor, path);
    cfg.gamma = get_or<double>(doc, "gamma", cfg.gamma, path);
    cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed, path);
    auto sc = detail::building(path, [&] { return build_random_game(cfg); });
    const auto k = get_or<double>(doc, "k", 2.0, path);
    return {name, std::move(sc.game), std::move(sc.bank), std::move(sc.initial_belief),
            p1.contains("selector") ? detail::selector_from_json(p1, p1_path) : SelectorSpec::weighted(StopRule::budget(k)),
            detail::rule_from_json(p1, p1_path, ActionRule::kSupport), std::nullopt};
  }
  if (name == "custom") {
    ZeroSumGame game = game_from_json(detail::field(doc, "game", path), path + ".game");
    SensorBank bank = doc.contains("sensors") ? bank_from_json(doc.at("sensors"), path + ".sensors")
                                              : SensorBank({}, 0.0);
    if (bank.size() > 0 && bank[0].num_states() != game.num_states()) {
      throw ConfigError(path + ".sensors: likelihood rows do not match the state count");
    }
    Belief b0 = detail::belief_from_json(doc, "initial_belief", game, path);
    return {name, std::move(game), std::move(bank), std::move(b0), detail::selector_from_json(p1, p1_path),
            detail::rule_from_json(p1, p1_path, ActionRule::kSupport), std::nullopt};
  }
  throw ConfigError(path + ".scenario: unknown scenario '" + name + "'");
}

// Custom scenario document for an existing game and bank.
inline Json scenario_to_json(const ZeroSumGame& game, const SensorBank& bank) {
  return {{"scenario", "custom"}, {"game", game_to_json(game)}, {"sensors", bank_to_json(bank)}};
}

// ---------------------------------------------------------------------------
// Run manifests.

inline std::string digest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("digest_file: cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return to_hex(digest_bytes(buf.str()));
}

struct RunManifest {
  std::string command;
  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> outputs;  // file name, digest

  void add_output(const std::filesystem::path& file) {
    outputs.emplace_back(file.filename().string(), digest_file(file));
  }

  // The wall clock is kept out of the reproducible part.
  Json reproducible_json() const {
    Json files = Json::array();
    for (const auto& [name, digest] : outputs) files.push_back({{"file", name}, {"fnv1a64", digest}});
    return {{"command", command}, {"config", config_path}, {"seeds", seeds},
            {"tool_version", tool_version}, {"outputs", std::move(files)}};
  }

  Json to_json() const {
    Json j = reproducible_json();
    j["wall_clock_seconds"] = wall_clock_seconds;
    return j;
  }
};

}  // namespace inattention

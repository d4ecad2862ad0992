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

// inattention: solve, simulate and reproduce experiments from the command line.
//
//   inattention solve --scenario grid
//   inattention simulate --scenario grid --p2 deceptive --runs 1000 --seed 1
//   inattention experiment --name random --games 100 --runs 100 --seed 11
//
// Exit codes: 0 ok, 2 usage or config error, 3 numerical failure.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "inattention/harness.hpp"
#include "inattention/io.hpp"
#include "inattention/scenarios.hpp"

namespace fs = std::filesystem;
using namespace inattention;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct CommonFlags {
  std::string scenario;
  std::string config;
  std::optional<double> epsilon;
  std::optional<double> gamma;
  double tol = 1e-6;
  std::size_t threads = default_thread_count();
  std::string out = "out";
};

struct SimulateFlags {
  std::string p2 = "equilibrium";
  std::size_t runs = 1000;
  std::uint64_t seed = 1;
};

struct ExperimentFlags {
  std::string name;
  std::size_t games = 100;
  std::size_t runs = 0;  // 0: 1000 for grid, 100 for random
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--scenario", f.scenario, "builtin scenario: fig1, fig3, grid, random");
  cmd->add_option("--config", f.config, "JSON scenario document");
  cmd->add_option("--epsilon", f.epsilon, "fig3 reward gap");
  cmd->add_option("--gamma", f.gamma, "discount factor override");
  cmd->add_option("--tol", f.tol, "value tolerance of the equilibrium solve")->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output directory");
}

Json load_document(const CommonFlags& f) {
  Json doc;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw ConfigError("--config: cannot open '" + f.config + "'");
    try {
      doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error&) {
      throw ConfigError("config: '" + f.config + "' is empty or not valid JSON");
    }
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    if (!f.scenario.empty() && doc.value("scenario", f.scenario) != f.scenario) {
      throw ConfigError("--scenario: disagrees with config.scenario");
    }
  } else if (!f.scenario.empty()) {
    doc = {{"scenario", f.scenario}};
  } else {
    throw ConfigError("--scenario or --config is required");
  }
  if (f.epsilon) doc["epsilon"] = *f.epsilon;
  if (f.gamma) {
    if (doc.value("scenario", "") == "custom" && doc.contains("game")) {
      doc["game"]["gamma"] = *f.gamma;
    } else {
      doc["gamma"] = *f.gamma;
    }
  }
  return doc;
}

std::string command_line(int argc, char** argv) {
  std::string out;
  for (int i = 1; i < argc; ++i) {
    if (i > 1) out += ' ';
    out += argv[i];
  }
  return out;
}

class Outputs {
 public:
  Outputs(const std::string& dir, RunManifest manifest) : dir_(dir), manifest_(std::move(manifest)) {
    fs::create_directories(dir_);
  }

  template <typename Writer>
  void write(const std::string& name, Writer&& writer) {
    const fs::path path = dir_ / name;
    {
      std::ofstream os(path);
      if (!os) throw ConfigError("--out: cannot write '" + path.string() + "'");
      writer(os);
    }
    manifest_.add_output(path);
  }

  RunManifest& manifest() { return manifest_; }

  void finish(std::chrono::steady_clock::time_point start) {
    manifest_.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream os(dir_ / "manifest.json");
    os << manifest_.to_json().dump(2) << '\n';
  }

 private:
  fs::path dir_;
  RunManifest manifest_;
};

std::shared_ptr<const EquilibriumSolution> solve_cached(const ZeroSumGame& game, const CommonFlags& f,
                                                        bool* hit = nullptr) {
  return SolutionCache::from_environment().solve(game, {f.tol, kDefaultMaxIterations, f.threads}, hit);
}

Player2Mode parse_mode(const std::string& s) {
  return s == "deceptive" ? Player2Mode::kDeceptive : Player2Mode::kEquilibrium;
}

void print_estimate(const char* label, const ReturnEstimate& e) {
  std::cout << label << " mean return " << e.mean << " +/- " << e.half_width << " (sd " << e.sd << ", n "
            << e.runs << ")\n";
}

int cmd_solve(const CommonFlags& f, RunManifest manifest) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioInstance sc = scenario_from_json(load_document(f));
  bool hit = false;
  auto sol = solve_cached(sc.game, f, &hit);
  Outputs out(f.out, std::move(manifest));
  out.write("solution.csv", [&](std::ostream& os) { write_solution_csv(os, *sol, sc.game.labels()); });
  out.write("solution.json", [&](std::ostream& os) { os << solution_to_json(*sol).dump() << '\n'; });
  out.finish(start);
  std::cout.precision(12);
  std::cout << "V*(s0) = " << sol->value(sc.game.initial_state()) << "\n"
            << "residual = " << sol->residual() << " after " << sol->sweeps() << " sweeps"
            << (hit ? " (cached)" : "") << "\n";
  return kExitOk;
}

int cmd_simulate(const CommonFlags& f, const SimulateFlags& s, RunManifest manifest) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioInstance sc = scenario_from_json(load_document(f));
  auto sol = solve_cached(sc.game, f);
  const Player1Config p1(sc.game, sol, sc.selector, sc.rule);
  const Player2Mode mode = parse_mode(s.p2);
  const std::size_t horizon = default_horizon(sc.game);
  std::vector<EpisodeRecord> records(s.runs);
  parallel_for(s.runs, f.threads, [&](std::size_t i) {
    records[i] = run_episode(sc.game, sc.bank, p1, mode, s.seed + i, horizon, sc.initial_belief, {true, true});
  });
  std::vector<double> returns(s.runs);
  for (std::size_t i = 0; i < s.runs; ++i) returns[i] = records[i].discounted_return;
  const ReturnEstimate est = summarize_returns(returns);

  manifest.seeds = {s.seed};
  Outputs out(f.out, std::move(manifest));
  out.write("episodes.csv", [&](std::ostream& os) { write_episode_csv(os, records, sc.bank); });
  out.write("episode_returns.csv", [&](std::ostream& os) { write_episode_summary_csv(os, records); });
  out.write("aggregate.csv", [&](std::ostream& os) {
    os.precision(12);
    os << "p2_mode,runs,mean_return,sd,ci_half_width,horizon\n"
       << s.p2 << ',' << est.runs << ',' << est.mean << ',' << est.sd << ',' << est.half_width << ','
       << horizon << '\n';
  });
  out.finish(start);
  std::cout.precision(6);
  print_estimate(s.p2.c_str(), est);
  return kExitOk;
}

int experiment_grid(const CommonFlags& f, const ExperimentFlags& e, RunManifest manifest) {
  const auto start = std::chrono::steady_clock::now();
  Json doc = f.config.empty() && f.scenario.empty() ? Json{{"scenario", "grid"}} : load_document(f);
  if (doc.value("scenario", "") != "grid") throw ConfigError("config.scenario: the grid experiment needs 'grid'");
  if (f.gamma) doc["gamma"] = *f.gamma;
  ScenarioInstance sc = scenario_from_json(doc);
  auto sol = solve_cached(sc.game, f);
  const std::size_t runs = e.runs == 0 ? 1000 : e.runs;
  std::cout.precision(6);
  std::cout << "V*(s0) = " << sol->value(sc.game.initial_state()) << "\n";

  manifest.seeds = {e.seed};
  Outputs out(f.out, std::move(manifest));
  std::vector<GridExperimentResult> results;
  for (Player2Mode mode : {Player2Mode::kEquilibrium, Player2Mode::kDeceptive}) {
    GridExperimentResult r = run_grid_experiment(*sc.grid, sol, runs, mode, e.seed, {f.threads, 30});
    const std::string tag = to_string(mode);
    out.write("sensor_frequency_" + tag + ".csv", [&](std::ostream& os) { write_sensor_frequency_csv(os, r); });
    out.write("confusion_" + tag + ".csv", [&](std::ostream& os) { write_confusion_csv(os, r); });
    print_estimate(tag.c_str(), r.estimate);
    std::cout << "  depth-sensor share t<6: " << depth_sensor_share(r, 6) << ", surprises: " << r.surprises << "\n";
    results.push_back(std::move(r));
  }
  out.write("grid_returns.csv", [&](std::ostream& os) {
    os.precision(12);
    os << "p2_mode,runs,mean_return,sd,ci_half_width,surprises,value\n";
    for (const auto& r : results) {
      os << to_string(r.mode) << ',' << r.estimate.runs << ',' << r.estimate.mean << ',' << r.estimate.sd << ','
         << r.estimate.half_width << ',' << r.surprises << ',' << sol->value(sc.game.initial_state()) << '\n';
    }
  });
  out.finish(start);
  return kExitOk;
}

int experiment_random(const CommonFlags& f, const ExperimentFlags& e, RunManifest manifest) {
  const auto start = std::chrono::steady_clock::now();
  RandomExperimentOptions opts;
  opts.threads = f.threads;
  opts.solve_tol = f.tol;
  if (f.gamma) opts.game_template.gamma = *f.gamma;
  const std::size_t runs = e.runs == 0 ? 100 : e.runs;
  const auto rows = run_random_experiment(e.games, runs, e.seed, opts);

  manifest.seeds = {e.seed};
  Outputs out(f.out, std::move(manifest));
  out.write("random_experiment.csv", [&](std::ostream& os) { write_random_experiment_csv(os, rows); });
  out.finish(start);
  std::cout.precision(4);
  std::cout << std::fixed;
  for (const auto& r : rows) {
    std::cout << std::left << std::setw(18) << r.method << std::setw(13) << to_string(r.mode) << std::right
              << std::setw(8) << r.mean << " +/- " << r.half_width << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rational-inattention agents in zero-sum stochastic games"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonFlags common;
  SimulateFlags sim;
  ExperimentFlags exp;

  CLI::App* solve = app.add_subcommand("solve", "solve a scenario and export the equilibrium");
  add_common(solve, common);

  CLI::App* simulate = app.add_subcommand("simulate", "simulate episodes against a solved scenario");
  add_common(simulate, common);
  simulate->add_option("--p2", sim.p2, "Player 2 rule")->check(CLI::IsMember({"equilibrium", "deceptive"}));
  simulate->add_option("--runs", sim.runs, "episodes")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "base seed; episode i uses seed + i");

  CLI::App* experiment = app.add_subcommand("experiment", "reproduce the grid or random-game experiment");
  add_common(experiment, common);
  experiment->add_option("--name", exp.name, "grid or random")
      ->required()
      ->check(CLI::IsMember({"grid", "random"}));
  experiment->add_option("--games", exp.games, "random games")->check(CLI::PositiveNumber);
  experiment->add_option("--runs", exp.runs, "episodes per game or per mode")->check(CLI::PositiveNumber);
  experiment->add_option("--seed", exp.seed, "base seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  RunManifest manifest;
  manifest.command = command_line(argc, argv);
  manifest.config_path = common.config;
  manifest.tool_version = kToolVersion;

  try {
    if (*solve) return cmd_solve(common, std::move(manifest));
    if (*simulate) return cmd_simulate(common, sim, std::move(manifest));
    if (exp.name == "grid") return experiment_grid(common, exp, std::move(manifest));
    return experiment_random(common, exp, std::move(manifest));
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

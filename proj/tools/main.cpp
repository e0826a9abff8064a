#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wetbeam/errors.hpp"
#include "wetbeam/experiment.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  long trials = 0;
  bool has_seed = false;
  bool has_trials = false;
  bool bounds = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wetbeam::ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run(wetbeam::ExperimentKind kind, const CliOverrides& overrides) {
  const std::string text =
      overrides.config_path.empty() ? std::string() : read_file(overrides.config_path);
  wetbeam::ExperimentConfig config = wetbeam::parse_config(text, kind);
  if (!overrides.out.empty()) config.out = overrides.out;
  if (overrides.has_seed) config.seed = overrides.seed;
  if (overrides.has_trials) config.trials = overrides.trials;
  if (overrides.bounds) config.bounds = true;
  wetbeam::validate_config(config);
  return wetbeam::run_experiment(config, std::cout);
}

void add_common_options(CLI::App* cmd, CliOverrides& overrides) {
  cmd->add_option("--config", overrides.config_path, "experiment config file (key = value lines)");
  cmd->add_option("--out", overrides.out, "output path (overrides the config)");
  cmd->add_option("--seed", overrides.seed, "RNG seed (overrides the config)")
      ->each([&overrides](const std::string&) { overrides.has_seed = true; });
  cmd->add_option("--trials", overrides.trials, "fading trials per point (overrides the config)")
      ->each([&overrides](const std::string&) { overrides.has_trials = true; });
  cmd->add_flag("--bounds", overrides.bounds, "append closed-form bound rows to the CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-min fair energy beamforming experiments for a multi-antenna power beacon"};
  app.require_subcommand(1);

  CliOverrides overrides;
  wetbeam::ExperimentKind kind = wetbeam::ExperimentKind::kappa;

  auto* kappa = app.add_subcommand("sweep-kappa", "mean worst-case energy vs Rician factor");
  kappa->callback([&]() { kind = wetbeam::ExperimentKind::kappa; });
  auto* antennas =
      app.add_subcommand("sweep-antennas", "mean worst-case energy vs antenna count");
  antennas->callback([&]() { kind = wetbeam::ExperimentKind::antennas; });
  auto* rotation =
      app.add_subcommand("sweep-rotation", "mean worst-case energy vs array rotation");
  rotation->callback([&]() { kind = wetbeam::ExperimentKind::rotation; });
  auto* solve = app.add_subcommand("solve", "solve one scenario and print the allocation");
  solve->callback([&]() { kind = wetbeam::ExperimentKind::solve_once; });
  for (CLI::App* cmd : {kappa, antennas, rotation, solve}) add_common_options(cmd, overrides);

  CLI11_PARSE(app, argc, argv);

  try {
    return run(kind, overrides);
  } catch (const wetbeam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wetbeam::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

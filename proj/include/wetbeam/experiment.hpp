#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "wetbeam/simulate.hpp"

namespace wetbeam {

enum class ExperimentKind { kappa, antennas, rotation, solve_once };

std::string to_string(ExperimentKind kind);

/// Fully validated experiment description. Angles are configured in degrees
/// and Rician factors in dB, matching the usual presentation; both are
/// converted on ingestion.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kappa;
  ScenarioKind scenario = ScenarioKind::annulus_random;
  int num_devices = 8;
  int num_antennas = 8;
  std::vector<double> kappa_db = {10.0};    // single value or one per device
  std::vector<double> distances_m;          // explicit scenario only
  std::vector<double> azimuths_deg;         // explicit scenario only
  std::vector<Scheme> schemes;              // defaulted per kind when omitted
  std::vector<double> kappa_db_grid = {0, 5, 10, 15, 20, 25, 30, 35, 40};
  std::vector<int> m_grid = {8, 16, 32, 64, 128};
  std::vector<int> n_list = {4, 16, 64};
  std::vector<double> alpha_deg_grid;       // default 0..179 step 1
  double delta = 0.9;
  double epsilon = 1e-5;
  double eta = 1e-4;
  long trials = 10000;
  int geometry_redraws = 100;
  long full_csi_trials = 500;
  double sdp_tol = 1e-4;
  int sdp_max_sweeps = 2000;
  std::uint64_t seed = 1;
  std::string out;                          // defaulted per kind when omitted
  bool bounds = false;
};

/// Parses the flat key-value config format (one `key = value` per line,
/// `#` comments, comma lists, `start:step:stop` ranges) and applies the
/// documented defaults for omitted keys. Malformed or unknown keys raise
/// ConfigError with the offending line; nothing is silently coerced.
ExperimentConfig parse_config(const std::string& text, ExperimentKind kind);

/// Re-checks the invariants of an assembled config (grids strictly
/// increasing, parameter ranges, scenario/device-count consistency).
void validate_config(const ExperimentConfig& config);

ScenarioSpec scenario_spec(const ExperimentConfig& config);

/// Renders rows in the stable CSV layout:
/// sweep,scheme,mean_energy,mean_energy_db,ci_halfwidth,mean_iters,trials
std::string render_csv(const SweepResult& result);

/// Runs the configured experiment, writes the CSV (sweeps) or the solution
/// summary (solve-once) to `config.out`, and prints a per-scheme summary to
/// `summary`. Returns the process exit status.
int run_experiment(const ExperimentConfig& config, std::ostream& summary);

}  // namespace wetbeam

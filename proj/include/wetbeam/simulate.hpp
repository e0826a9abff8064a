#pragma once

#include <string>
#include <vector>

#include "wetbeam/beamforming.hpp"
#include "wetbeam/channel.hpp"
#include "wetbeam/sdp.hpp"

namespace wetbeam {

enum class Scheme { lp_avg_csi, sdp_avg_csi, sdp_full_csi, sa_csi_free };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Received RF energy of one realization: beta * sum_k |h^T w_k|^2.
double realized_energy(const BeamSet& beams, const VectorXcd& h, double beta);

/// Switching-antennas baseline: full power cycled one antenna at a time over
/// the block, so the block average is (beta/M) * sum_m |h_m|^2.
double sa_energy(const VectorXcd& h, double beta);

struct EvalOptions {
  AffineScalingOptions lp;
  SdpOptions sdp;
  /// Budget for the per-trial full-CSI solves, the cost hotspot of the
  /// Monte-Carlo runs; looser than the scenario-level default since the
  /// residual optimality slack sits far below the sampling noise.
  SdpOptions full_csi_sdp{.rel_tol = 1e-3, .max_sweeps = 500, .max_bisections = 60,
                          .feas_tol = 1e-8};
  double rank_tol = 1e-10;  // eigen-beam retention threshold for SDP schemes
};

struct EvalStats {
  double mean = 0.0;
  double half_width = 0.0;       // 95% normal-approximation confidence half-width
  double mean_iterations = 0.0;  // NaN for schemes without the LP solver
  long trials = 0;
};

/// Monte-Carlo estimate of the mean worst-case energy of one scheme on a
/// fixed scenario. Per trial, fading is drawn for every device from
/// substreams keyed by (trial, device) only, so different schemes evaluated
/// with the same stream see identical channel realizations.
EvalStats evaluate_scheme(Scheme scheme, const Scenario& scenario, long trials,
                          const RngStream& stream, const EvalOptions& options = {});

/// Batch variant sharing the per-trial draws across schemes; results are
/// bit-identical to separate `evaluate_scheme` calls with the same stream.
std::vector<EvalStats> evaluate_schemes(const std::vector<Scheme>& schemes,
                                        const Scenario& scenario,
                                        const std::vector<long>& trials_per_scheme,
                                        const RngStream& stream,
                                        const EvalOptions& options = {});

/// Geometry recipe the sweeps can re-instantiate per grid point / redraw.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::annulus_random;
  int num_devices = 8;
  int num_antennas = 8;
  std::vector<double> kappa_linear = {10.0};
  std::vector<DeviceGeometry> explicit_devices;  // used when kind == explicit_list
  PathLossModel path_loss;
};

/// Instantiates the spec; annulus placement draws from `rng`.
Scenario realize_scenario(const ScenarioSpec& spec, RngStream* rng = nullptr);

struct ResultRow {
  double sweep = 0.0;
  std::string scheme;
  double mean_energy = 0.0;
  double mean_energy_db = 0.0;
  double ci_halfwidth = 0.0;
  double mean_iters = 0.0;
  bool has_iters = false;
  long trials = 0;
};

struct SweepResult {
  std::string sweep_name;
  std::vector<double> grid;
  std::vector<ResultRow> rows;
  std::uint64_t seed = 0;
};

struct SweepOptions {
  long trials = 10000;        // fading trials per scenario instance
  long full_csi_trials = 500; // total full-CSI trials per sweep point (split over redraws)
  int geometry_redraws = 100; // annulus scenarios only
  bool include_bounds = true; // attach closed-form bound rows where defined
  EvalOptions eval;
};

/// Rician-factor sweep (grid in dB). Fixed scenarios run once per point;
/// annulus scenarios share their geometry redraws across the grid. Bound
/// rows carry the closed-form Rician lower/upper worst-case energies.
SweepResult sweep_kappa(const ScenarioSpec& spec, const std::vector<double>& kappa_db_grid,
                        const std::vector<Scheme>& schemes, const SweepOptions& options,
                        std::uint64_t seed);

/// Antenna-count sweep over random annulus drops for each device count in
/// `n_list`; geometry is shared across the M grid within a redraw. Scheme
/// labels carry an [N=..] suffix so every curve keeps one row per (M, label).
SweepResult sweep_antennas(const std::vector<int>& n_list, const std::vector<int>& m_grid,
                           double kappa_db, const std::vector<Scheme>& schemes,
                           const SweepOptions& options, std::uint64_t seed);

/// Array-rotation sweep; the grid is in degrees.
SweepResult sweep_rotation(const ScenarioSpec& spec, const std::vector<double>& alpha_deg_grid,
                           const std::vector<Scheme>& schemes, const SweepOptions& options,
                           std::uint64_t seed);

}  // namespace wetbeam

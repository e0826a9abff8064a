#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "wetbeam/channel.hpp"

namespace wetbeam {

/// Cross-beam power coupling under mean-aligned (MRT-style) precoding.
/// Entry (k, i) = |<mean_k, mean_i>|^2 / ||mean_k||^2: the power the beam
/// serving device k deposits at device i, per unit of allocated power.
MatrixXd coupling_matrix(const std::vector<ChannelStats>& stats);

/// Path gains of a device list as a vector.
VectorXd gains(const std::vector<ChannelStats>& stats);

/// Closed-form allocation that equalizes energies when the coupling matrix
/// is diagonal: p_i proportional to 1/(beta_i * Q_ii).
VectorXd initial_allocation(const MatrixXd& coupling, const VectorXd& beta);

/// Worst-case deterministic energy bounds; q_diag holds ||mean_i||^2.
double bound_lower(const VectorXd& q_diag, const VectorXd& beta);
double bound_upper(const VectorXd& q_diag, const VectorXd& beta);
double bound_lower(const std::vector<ChannelStats>& stats);
double bound_upper(const std::vector<ChannelStats>& stats);

/// The same bounds specialized to ULA Rician channels, where
/// ||mean_i||^2 = M * kappa_i / (1 + kappa_i). Requires kappa > 0.
std::pair<double, double> rician_bounds(int num_antennas, const VectorXd& kappa,
                                        const VectorXd& beta);

/// Average energy carried by the scattered component for any unit-trace
/// transmit covariance: beta / (1 + kappa).
double scattered_energy(double path_gain, double rician_factor);

/// Per-device deterministic energies diag(beta) * Q^T * p.
VectorXd deterministic_energy(const VectorXd& p, const MatrixXd& coupling, const VectorXd& beta);

struct AffineScalingOptions {
  double step = 0.9;         // delta, in (0,1): fraction of the way to the boundary
  double tolerance = 1e-5;   // epsilon, duality-gap exit threshold (normalized units)
  double cost_slack = 1e-4;  // eta, tolerated reduced-cost negativity (normalized units)
  int max_iterations = 500;
  /// Energies are rescaled so the starting objective equals this level
  /// before the exit thresholds apply. This keeps termination invariant
  /// under rescaling the gains and pins the effective tightness of
  /// `tolerance`: the duality gap at exit is below tolerance/reference_level
  /// relative to the starting objective. Lower values trade accuracy for
  /// fewer iterations.
  double reference_level = 0.02;
  /// Test hook, called once per iteration with (tau, z, scale); z is the
  /// solver's normalized iterate [xi, p, slacks], scale the energy unit.
  std::function<void(int, const VectorXd&, double)> observer;
};

struct PowerAllocation {
  VectorXd p;                    // simplex allocation over the N beams
  double xi_bar = 0.0;           // achieved min_i deterministic energy
  int iterations = 0;            // tau
  bool converged = true;         // false when the iteration cap was hit
  double duality_gap = 0.0;      // 1^T Z r at exit (normalized units)
  double min_reduced_cost = 0.0; // min r at exit (normalized units)
};

/// Max-min power allocation over MRT beams by primal affine scaling.
///
/// Solves: maximize xi s.t. diag(beta) Q^T p >= xi*1, 1^T p = 1, p >= 0,
/// in standard form with variables z = [xi, p, slacks]. Each iteration
/// computes dual estimates lambda = (A Z^2 A^T)^-1 A Z^2 mu and reduced
/// costs r = mu - A^T lambda, then moves along -Z^2 r with the ratio step
/// (the fastest-shrinking coordinate travels `step` of the way to zero).
/// It stops once the duality-gap proxy 1^T Z r drops below `tolerance`
/// with all reduced costs above -cost_slack, both evaluated on the
/// pre-update iterate; the returned allocation is the post-update one and
/// xi_bar its achieved min energy in the caller's units.
PowerAllocation solve_p3_affine_scaling(const MatrixXd& coupling, const VectorXd& beta,
                                        const AffineScalingOptions& options = {});

/// K precoding vectors with their squared norms; total power <= 1.
struct BeamSet {
  MatrixXcd beams;  // M x K, column k is w_k
  VectorXd powers;  // squared norms, one per beam
};

/// Mean-aligned precoders w_k = conj(mean_k)/||mean_k|| * sqrt(p_k), so the
/// k-th beam adds up coherently at device k (w_k^T mean_k real positive).
BeamSet build_precoders(const VectorXd& p, const std::vector<ChannelStats>& stats);

}  // namespace wetbeam

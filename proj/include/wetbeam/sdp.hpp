#pragma once

#include <utility>
#include <vector>

#include "wetbeam/beamforming.hpp"
#include "wetbeam/channel.hpp"

namespace wetbeam {

struct SdpOptions {
  double rel_tol = 1e-4;   // bisection bracket tolerance, relative to the energy scale
  int max_sweeps = 2000;   // projection sweeps per feasibility probe
  int max_bisections = 60;
  double feas_tol = 1e-8;  // accepted constraint residual, relative to the energy scale
};

struct SdpResiduals {
  double hermitian = 0.0;  // max |W - W^H| entry
  double trace = 0.0;      // |tr W - 1|
  double psd = 0.0;        // max(0, -lambda_min(W))
  double energy = 0.0;     // max(0, xi - min_i beta_i tr(W H_i))
};

struct SdpReport {
  double xi = 0.0;       // achieved max-min energy of the returned covariance
  int iterations = 0;    // total projection sweeps across all probes
  int bisections = 0;
  /// The bisection bracket closed to rel_tol. xi is always the exact
  /// min-energy of the returned covariance; on hard instances a sweep-capped
  /// probe can close the bracket conservatively, leaving xi below the true
  /// optimum by more than rel_tol.
  bool converged = true;
  SdpResiduals residuals;
};

/// Hermitian PSD kernel G = conj(h) h^T, chosen so that
/// tr(W G) = sum_k |h^T w_k|^2 for W = sum_k w_k w_k^H, i.e. trace-form
/// energies agree exactly with the received-signal convention used by
/// `realized_energy`.
MatrixXcd energy_kernel(const VectorXcd& h);

/// Max-min transmit covariance: maximize xi over Hermitian W >= 0 with
/// tr(W) = 1 and beta_i tr(W H_i) >= xi for all i.
///
/// The caller picks the kernels: per-realization kernels give the full-CSI
/// optimum, mean kernels the average-CSI optimum, and mean + scattered
/// covariance the statistical variant.
///
/// Method: bisection over xi with an inner Dykstra feasibility solve
/// alternating projections onto the trace hyperplane, the per-device energy
/// halfspaces and the PSD cone. The bracket starts from feasible candidates
/// (isotropic, best mixture of dominant eigenvector beams) below and an
/// eigenvalue certificate min over simplex weights of
/// lambda_max(sum_i t_i beta_i H_i) above. The returned xi is the exact
/// min-energy of the returned (PSD, unit-trace) covariance.
std::pair<MatrixXcd, SdpReport> solve_p2(const std::vector<MatrixXcd>& kernels,
                                         const VectorXd& beta, const SdpOptions& options = {});

/// Eigen-decomposes W and keeps components with eigenvalue above
/// rank_tol * lambda_max; beam k is sqrt(lambda_k) * u_k.
BeamSet extract_beams(const MatrixXcd& covariance, double rank_tol = 1e-10);

/// beta * tr(W H), returned as the (real) energy value.
double covariance_energy(const MatrixXcd& covariance, const MatrixXcd& kernel, double beta);

}  // namespace wetbeam

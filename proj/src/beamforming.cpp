#include "wetbeam/beamforming.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wetbeam/errors.hpp"

namespace wetbeam {

namespace {

void check_sizes(Eigen::Index n, const VectorXd& beta, const char* who) {
  if (beta.size() != n) throw std::invalid_argument(std::string(who) + ": beta size mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(beta(i) > 0.0))
      throw std::domain_error(std::string(who) + ": path gains must be positive");
}

VectorXd mean_norms_sq(const std::vector<ChannelStats>& stats) {
  VectorXd q(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) q(i) = stats[i].mean.squaredNorm();
  return q;
}

}  // namespace

MatrixXd coupling_matrix(const std::vector<ChannelStats>& stats) {
  const int n = static_cast<int>(stats.size());
  if (n < 1) throw std::invalid_argument("coupling_matrix: empty device list");
  const Eigen::Index m = stats[0].mean.size();
  for (int k = 0; k < n; ++k) {
    if (stats[k].mean.size() != m)
      throw std::invalid_argument("coupling_matrix: mean vectors differ in length");
    if (stats[k].mean.squaredNorm() <= 0.0)
      throw std::domain_error("coupling_matrix: device " + std::to_string(k) +
                              " has a zero mean channel (kappa = 0?)");
  }
  MatrixXd coupling(n, n);
  for (int k = 0; k < n; ++k) {
    const double norm_sq = stats[k].mean.squaredNorm();
    for (int i = 0; i < n; ++i)
      coupling(k, i) = std::norm(stats[k].mean.dot(stats[i].mean)) / norm_sq;
  }
  return coupling;
}

VectorXd gains(const std::vector<ChannelStats>& stats) {
  VectorXd beta(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) beta(i) = stats[i].path_gain;
  return beta;
}

VectorXd initial_allocation(const MatrixXd& coupling, const VectorXd& beta) {
  const Eigen::Index n = coupling.rows();
  if (coupling.cols() != n) throw std::invalid_argument("initial_allocation: coupling not square");
  check_sizes(n, beta, "initial_allocation");
  VectorXd weights(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = beta(i) * coupling(i, i);
    if (!(d > 0.0)) throw std::domain_error("initial_allocation: zero diagonal coupling entry");
    weights(i) = 1.0 / d;
  }
  return weights / weights.sum();
}

double bound_lower(const VectorXd& q_diag, const VectorXd& beta) {
  check_sizes(q_diag.size(), beta, "bound_lower");
  double acc = 0.0;
  for (Eigen::Index k = 0; k < q_diag.size(); ++k) {
    if (!(q_diag(k) > 0.0)) throw std::domain_error("bound_lower: zero mean channel norm");
    acc += 1.0 / (beta(k) * q_diag(k));
  }
  return 1.0 / acc;
}

double bound_upper(const VectorXd& q_diag, const VectorXd& beta) {
  check_sizes(q_diag.size(), beta, "bound_upper");
  return (beta.array() * q_diag.array()).minCoeff();
}

double bound_lower(const std::vector<ChannelStats>& stats) {
  return bound_lower(mean_norms_sq(stats), gains(stats));
}

double bound_upper(const std::vector<ChannelStats>& stats) {
  return bound_upper(mean_norms_sq(stats), gains(stats));
}

std::pair<double, double> rician_bounds(int num_antennas, const VectorXd& kappa,
                                        const VectorXd& beta) {
  if (num_antennas < 1) throw std::domain_error("rician_bounds: need at least one antenna");
  check_sizes(kappa.size(), beta, "rician_bounds");
  double acc = 0.0;
  double ub = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < kappa.size(); ++k) {
    if (!(kappa(k) > 0.0))
      throw std::domain_error("rician_bounds: Rician factor must be positive");
    acc += (kappa(k) + 1.0) / (beta(k) * kappa(k));
    ub = std::min(ub, beta(k) * kappa(k) / (1.0 + kappa(k)));
  }
  return {static_cast<double>(num_antennas) / acc, static_cast<double>(num_antennas) * ub};
}

double scattered_energy(double path_gain, double rician_factor) {
  if (!(rician_factor >= 0.0))
    throw std::domain_error("scattered_energy: Rician factor must be >= 0");
  return path_gain / (1.0 + rician_factor);
}

VectorXd deterministic_energy(const VectorXd& p, const MatrixXd& coupling, const VectorXd& beta) {
  if (coupling.rows() != coupling.cols() || coupling.rows() != p.size())
    throw std::invalid_argument("deterministic_energy: dimension mismatch");
  check_sizes(p.size(), beta, "deterministic_energy");
  return beta.cwiseProduct(coupling.transpose() * p);
}

PowerAllocation solve_p3_affine_scaling(const MatrixXd& coupling, const VectorXd& beta,
                                        const AffineScalingOptions& options) {
  const Eigen::Index n = coupling.rows();
  if (coupling.cols() != n || n < 1)
    throw std::invalid_argument("solve_p3_affine_scaling: coupling not square");
  check_sizes(n, beta, "solve_p3_affine_scaling");
  if (coupling.minCoeff() < -1e-12)
    throw std::domain_error("solve_p3_affine_scaling: coupling entries must be nonnegative");
  if (!(options.step > 0.0 && options.step < 1.0))
    throw std::domain_error("solve_p3_affine_scaling: step must lie in (0,1)");
  if (!(options.tolerance > 0.0 && options.tolerance < 1.0))
    throw std::domain_error("solve_p3_affine_scaling: tolerance must lie in (0,1)");
  if (!(options.cost_slack >= 0.0))
    throw std::domain_error("solve_p3_affine_scaling: cost slack must be >= 0");
  if (options.max_iterations < 1)
    throw std::domain_error("solve_p3_affine_scaling: need at least one iteration");

  if (!(options.reference_level > 0.0))
    throw std::domain_error("solve_p3_affine_scaling: reference level must be positive");

  const VectorXd p0 = initial_allocation(coupling, beta);
  const VectorXd e0 = deterministic_energy(p0, coupling, beta);
  // rescale energies so the starting objective sits at the reference level;
  // the exit thresholds then act at a fixed relative tightness regardless of
  // the caller's units
  const double scale = e0.minCoeff() / options.reference_level;
  if (!(scale > 0.0))
    throw std::domain_error("solve_p3_affine_scaling: nonpositive starting energy");

  // constraint rows: energies(p) - xi = slacks, 1^T p = 1
  const MatrixXd energy_op = (beta / scale).asDiagonal() * coupling.transpose();  // n x n

  VectorXd slacks = energy_op * p0;
  double xi = options.reference_level;
  slacks.array() -= xi;
  // the min-achieving device has a zero slack; nudge into the strict interior
  const double bump = 1e-9 * std::max(slacks.maxCoeff(), 1.0);
  xi -= bump;
  slacks.array() += bump;

  const Eigen::Index dim = 2 * n + 1;
  VectorXd z(dim);
  z(0) = xi;
  z.segment(1, n) = p0;
  z.segment(n + 1, n) = slacks;

  MatrixXd constraints = MatrixXd::Zero(n + 1, dim);
  constraints.block(0, 0, n, 1).setOnes();
  constraints.block(0, 1, n, n) = -energy_op;
  constraints.block(0, n + 1, n, n).setIdentity();
  constraints.block(n, 1, 1, n).setOnes();

  VectorXd cost = VectorXd::Zero(dim);
  cost(0) = -1.0;

  int tau = 0;
  bool converged = false;
  double gap = 0.0;
  double min_cost = 0.0;
  VectorXd reduced(dim);
  while (tau < options.max_iterations) {
    const VectorXd z_sq = z.array().square();
    const MatrixXd weighted = constraints * z_sq.asDiagonal();       // A Z^2
    const MatrixXd normal_mat = weighted * constraints.transpose();  // A Z^2 A^T
    const VectorXd rhs = weighted * cost;

    Eigen::LLT<MatrixXd> chol(normal_mat);
    if (chol.info() != Eigen::Success) {
      MatrixXd jittered = normal_mat;
      jittered.diagonal().array() += 1e-12 * normal_mat.trace();
      chol.compute(jittered);
      if (chol.info() != Eigen::Success)
        throw SolverError("solve_p3_affine_scaling: singular scaled normal equations", tau);
    }
    const VectorXd lambda = chol.solve(rhs);
    reduced = cost - constraints.transpose() * lambda;

    gap = z.dot(reduced);  // 1^T Z r
    min_cost = reduced.minCoeff();

    // ratio step: the fastest-shrinking coordinate travels `step` of the way
    // to its bound, so the iterate stays strictly positive for step < 1
    const VectorXd scaled_cost = z.cwiseProduct(reduced);
    const double largest_shrink = scaled_cost.maxCoeff();
    const double largest_abs = scaled_cost.cwiseAbs().maxCoeff();
    if (largest_abs < 1e-13 * std::max(1.0, std::abs(gap))) {
      // reduced costs at roundoff; the iterate cannot move further
      ++tau;
      converged = gap < options.tolerance && min_cost >= -options.cost_slack;
      break;
    }
    const double norm = largest_shrink > 0.0 ? largest_shrink : largest_abs;
    z -= options.step / norm * z_sq.cwiseProduct(reduced);
    ++tau;
    if (options.observer) options.observer(tau, z, scale);
    if (gap < options.tolerance && min_cost >= -options.cost_slack) {
      converged = true;
      break;
    }
  }

  VectorXd p = z.segment(1, n).cwiseMax(0.0);
  p /= p.sum();

  PowerAllocation result;
  result.p = p;
  result.xi_bar = deterministic_energy(p, coupling, beta).minCoeff();
  result.iterations = tau;
  result.converged = converged;
  result.duality_gap = gap;
  result.min_reduced_cost = min_cost;
  return result;
}

BeamSet build_precoders(const VectorXd& p, const std::vector<ChannelStats>& stats) {
  const int n = static_cast<int>(stats.size());
  if (p.size() != n) throw std::invalid_argument("build_precoders: allocation size mismatch");
  if (p.minCoeff() < -1e-12)
    throw std::domain_error("build_precoders: negative power allocation entry");
  if (std::abs(p.sum() - 1.0) > 1e-8)
    throw std::domain_error("build_precoders: allocation must sum to 1");
  const Eigen::Index m = stats.empty() ? 0 : stats[0].mean.size();
  BeamSet set;
  set.beams.resize(m, n);
  set.powers.resize(n);
  for (int k = 0; k < n; ++k) {
    const double norm = stats[k].mean.norm();
    if (!(norm > 0.0))
      throw std::domain_error("build_precoders: device " + std::to_string(k) +
                              " has a zero mean channel");
    const double power = std::max(p(k), 0.0);
    set.beams.col(k) = stats[k].mean.conjugate() * (std::sqrt(power) / norm);
    set.powers(k) = power;
  }
  return set;
}

}  // namespace wetbeam

#include "wetbeam/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wetbeam/errors.hpp"

namespace wetbeam {

namespace {

double real_inner(const MatrixXcd& a, const MatrixXcd& b) {
  // trace inner product on Hermitian matrices; real by symmetry
  return (a.array().conjugate() * b.array()).sum().real();
}

void check_hermitian(const MatrixXcd& h, int index) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("solve_p2: kernel " + std::to_string(index) +
                                " is not Hermitian");
}

MatrixXcd project_psd(const MatrixXcd& x, Eigen::SelfAdjointEigenSolver<MatrixXcd>& eig) {
  eig.compute(0.5 * (x + x.adjoint()));
  VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint();
}

double min_energy(const MatrixXcd& w, const std::vector<MatrixXcd>& kernels,
                  const VectorXd& beta) {
  double value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kernels.size(); ++i)
    value = std::min(value, beta(i) * real_inner(kernels[i], w));
  return value;
}

// Renormalizes a projection iterate into an exactly feasible covariance.
MatrixXcd cleanup(const MatrixXcd& x, Eigen::SelfAdjointEigenSolver<MatrixXcd>& eig) {
  MatrixXcd w = project_psd(x, eig);
  const double tr = w.trace().real();
  if (tr > 0.0) w /= tr;
  return w;
}

struct FeasibilityResult {
  bool feasible = false;
  int sweeps = 0;
};

// Dykstra cycle over {energy halfspaces} -> {trace hyperplane} -> {PSD cone}.
// On success `x` holds a point meeting every constraint within `energy_tol`;
// the caller widens that tolerance while the bisection bracket is still wide.
FeasibilityResult probe_feasibility(MatrixXcd& x, double target,
                                    const std::vector<MatrixXcd>& scaled_kernels,
                                    const std::vector<double>& kernel_norm_sq,
                                    double energy_tol, int max_sweeps,
                                    Eigen::SelfAdjointEigenSolver<MatrixXcd>& eig) {
  const std::size_t n = scaled_kernels.size();
  const Eigen::Index m = x.rows();
  std::vector<MatrixXcd> corrections(n + 2, MatrixXcd::Zero(m, m));

  // empty-intersection certificate: the residual floor stops shrinking while
  // the Dykstra correction terms keep growing (they stay bounded on feasible
  // problems), so require both before giving up early
  double best_worst = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  double correction_reference = 0.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      const MatrixXcd y = x + corrections[i];
      const double violation = target - real_inner(scaled_kernels[i], y);
      if (violation > 0.0)
        x = y + (violation / kernel_norm_sq[i]) * scaled_kernels[i];
      else
        x = y;
      corrections[i] = y - x;
    }
    {
      const MatrixXcd y = x + corrections[n];
      x = y + ((1.0 - y.trace().real()) / static_cast<double>(m)) *
                  MatrixXcd::Identity(m, m);
      corrections[n] = y - x;
    }
    {
      const MatrixXcd y = x + corrections[n + 1];
      x = project_psd(y, eig);
      corrections[n + 1] = y - x;
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, target - real_inner(scaled_kernels[i], x));
    const double trace_res = std::abs(x.trace().real() - 1.0);
    if (worst <= energy_tol && trace_res <= energy_tol)
      return {true, sweep};

    if (worst < best_worst * 0.999) {
      best_worst = worst;
      since_improvement = 0;
      correction_reference = corrections[n + 1].norm();
    } else if (++since_improvement > 50) {
      const double correction_norm = corrections[n + 1].norm();
      if (correction_norm > 1.02 * std::max(correction_reference, 1e-12))
        return {false, sweep};
      since_improvement = 0;  // bounded corrections: keep grinding
      correction_reference = correction_norm;
    }
  }
  return {false, max_sweeps};
}

}  // namespace

MatrixXcd energy_kernel(const VectorXcd& h) {
  return h.conjugate() * h.transpose();
}

std::pair<MatrixXcd, SdpReport> solve_p2(const std::vector<MatrixXcd>& kernels,
                                         const VectorXd& beta, const SdpOptions& options) {
  const int n = static_cast<int>(kernels.size());
  if (n < 1) throw std::invalid_argument("solve_p2: empty kernel list");
  if (beta.size() != n) throw std::invalid_argument("solve_p2: beta size mismatch");
  const Eigen::Index m = kernels[0].rows();
  for (int i = 0; i < n; ++i) {
    if (kernels[i].rows() != m || kernels[i].cols() != m)
      throw std::invalid_argument("solve_p2: kernels must share one square dimension");
    check_hermitian(kernels[i], i);
    if (!(beta(i) > 0.0)) throw std::domain_error("solve_p2: path gains must be positive");
  }

  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig;

  // dominant eigenpairs of each kernel
  std::vector<VectorXcd> top_vec(n);
  VectorXd top_val(n);
  for (int i = 0; i < n; ++i) {
    eig.compute(kernels[i]);
    top_val(i) = eig.eigenvalues()(m - 1);
    top_vec[i] = eig.eigenvectors().col(m - 1);
  }

  SdpReport report;

  // upper bracket: any unit-trace PSD W gives beta_i tr(W H_i) <= beta_i lambda_max_i
  double hi = (beta.array() * top_val.array().max(0.0)).minCoeff();
  if (!(hi > 0.0)) {
    // degenerate instance; the isotropic covariance is as good as anything
    MatrixXcd w = MatrixXcd::Identity(m, m) / static_cast<double>(m);
    report.xi = min_energy(w, kernels, beta);
    return {w, report};
  }

  // certificate refinement: for simplex weights t,
  // lambda_max(sum_i t_i beta_i H_i) >= optimum; descend on t multiplicatively
  {
    VectorXd weights = VectorXd::Ones(n) / n;
    MatrixXcd combo(m, m);
    for (int it = 0; it < 24; ++it) {
      combo.setZero();
      for (int i = 0; i < n; ++i) combo += weights(i) * beta(i) * kernels[i];
      eig.compute(combo);
      hi = std::min(hi, eig.eigenvalues()(m - 1));
      const VectorXcd u = eig.eigenvectors().col(m - 1);
      VectorXd grad(n);
      for (int i = 0; i < n; ++i)
        grad(i) = beta(i) * u.dot(kernels[i] * u).real();
      const double gmax = grad.cwiseAbs().maxCoeff();
      if (!(gmax > 0.0)) break;
      weights = weights.array() * (-0.8 * grad.array() / gmax).exp();
      weights /= weights.sum();
    }
  }

  // lower bracket: start from the better of the isotropic covariance and the
  // max-min mixture of dominant-eigenvector beams (affine-scaling allocation)
  MatrixXcd best = MatrixXcd::Identity(m, m) / static_cast<double>(m);
  double best_value = min_energy(best, kernels, beta);
  if (top_val.minCoeff() > 0.0) {
    MatrixXd mix_coupling(n, n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        mix_coupling(k, i) = std::max(0.0, top_vec[k].dot(kernels[i] * top_vec[k]).real());
    if (mix_coupling.diagonal().minCoeff() > 0.0) {
      AffineScalingOptions lp;
      lp.tolerance = 1e-6;
      lp.cost_slack = 1e-5;
      lp.max_iterations = 300;
      const PowerAllocation alloc = solve_p3_affine_scaling(mix_coupling, beta, lp);
      MatrixXcd mixture = MatrixXcd::Zero(m, m);
      for (int k = 0; k < n; ++k)
        mixture += alloc.p(k) * (top_vec[k] * top_vec[k].adjoint());
      const double value = min_energy(mixture, kernels, beta);
      if (value > best_value) {
        best_value = value;
        best = mixture;
      }
    }
  }

  hi = std::max(hi, best_value);
  double bracket_lo = best_value;
  double bracket_hi = hi;
  const double scale = hi;

  std::vector<MatrixXcd> scaled_kernels(n);
  std::vector<double> kernel_norm_sq(n);
  for (int i = 0; i < n; ++i) {
    scaled_kernels[i] = beta(i) * kernels[i];
    kernel_norm_sq[i] = scaled_kernels[i].squaredNorm();
  }

  MatrixXcd iterate = best;
  while (report.bisections < options.max_bisections &&
         bracket_hi - bracket_lo > options.rel_tol * scale) {
    const double target = 0.5 * (bracket_lo + bracket_hi);
    // a probe only has to settle the verdict at the current bracket width;
    // the achieved value of the cleaned iterate keeps the bracket honest
    const double energy_tol =
        std::max(options.feas_tol * scale, 0.05 * (bracket_hi - bracket_lo));
    iterate = best;
    const FeasibilityResult fr = probe_feasibility(iterate, target, scaled_kernels,
                                                   kernel_norm_sq, energy_tol,
                                                   options.max_sweeps, eig);
    report.iterations += fr.sweeps;
    ++report.bisections;
    if (fr.feasible) {
      const MatrixXcd cleaned = cleanup(iterate, eig);
      const double value = min_energy(cleaned, kernels, beta);
      if (value > best_value) {
        best_value = value;
        best = cleaned;
      }
      bracket_lo = std::max(target, value);
    } else {
      bracket_hi = target;
    }
    bracket_hi = std::max(bracket_hi, bracket_lo);
  }
  report.converged = (bracket_hi - bracket_lo) <= options.rel_tol * scale;

  report.xi = best_value;
  report.residuals.hermitian = (best - best.adjoint()).cwiseAbs().maxCoeff();
  report.residuals.trace = std::abs(best.trace().real() - 1.0);
  eig.compute(0.5 * (best + best.adjoint()));
  report.residuals.psd = std::max(0.0, -eig.eigenvalues().minCoeff());
  report.residuals.energy = std::max(0.0, report.xi - min_energy(best, kernels, beta));
  return {best, report};
}

BeamSet extract_beams(const MatrixXcd& covariance, double rank_tol) {
  const Eigen::Index m = covariance.rows();
  if (covariance.cols() != m) throw std::invalid_argument("extract_beams: matrix not square");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(0.5 * (covariance + covariance.adjoint()));
  const VectorXd values = eig.eigenvalues();
  const double lambda_max = values(m - 1);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = m - 1; k >= 0; --k)
    if (values(k) > rank_tol * lambda_max && values(k) > 0.0) keep.push_back(k);

  BeamSet set;
  set.beams.resize(m, static_cast<Eigen::Index>(keep.size()));
  set.powers.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    set.beams.col(static_cast<Eigen::Index>(j)) =
        eig.eigenvectors().col(keep[j]) * std::sqrt(values(keep[j]));
    set.powers(static_cast<Eigen::Index>(j)) = values(keep[j]);
  }
  return set;
}

double covariance_energy(const MatrixXcd& covariance, const MatrixXcd& kernel, double beta) {
  if (covariance.rows() != kernel.rows() || covariance.cols() != kernel.cols())
    throw std::invalid_argument("covariance_energy: dimension mismatch");
  return beta * real_inner(kernel, covariance);
}

}  // namespace wetbeam

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "wetbeam/simulate.hpp"

using namespace wetbeam;

namespace {

Scenario random_instance(int n, int m, std::uint64_t seed, double kappa = 10.0) {
  RngStream rng(seed);
  return make_scenario(ScenarioKind::annulus_random, n, m, {kappa}, &rng);
}

Scenario scenario_a(double kappa = 10.0, int m = 8) {
  return make_scenario(ScenarioKind::scenario_A, 8, m, {kappa});
}

bool rows_identical(const SweepResult& a, const SweepResult& b) {
  if (a.rows.size() != b.rows.size()) return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto& x = a.rows[i];
    const auto& y = b.rows[i];
    if (x.sweep != y.sweep || x.scheme != y.scheme || x.mean_energy != y.mean_energy ||
        x.mean_energy_db != y.mean_energy_db || x.ci_halfwidth != y.ci_halfwidth ||
        x.mean_iters != y.mean_iters || x.has_iters != y.has_iters || x.trials != y.trials)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("realized energy") {
  const Scenario scenario = random_instance(3, 4, 1);
  RngStream rng(2);
  const VectorXcd h = draw_rician(scenario.stats[0], rng).channel;

  BeamSet empty;
  empty.beams.resize(4, 0);
  empty.powers.resize(0);
  CHECK(realized_energy(empty, h, 1.0) == 0.0);

  BeamSet mrt;
  mrt.beams = h.conjugate() / h.norm();
  mrt.powers = VectorXd::Ones(1);
  CHECK(realized_energy(mrt, h, 0.4) == doctest::Approx(0.4 * h.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("switching-antennas energy") {
  VectorXcd ones = VectorXcd::Constant(4, 1.0);
  CHECK(sa_energy(ones, 1.0) == doctest::Approx(1.0));
  VectorXcd one(1);
  one << std::complex<double>(0.3, -0.4);
  CHECK(sa_energy(one, 2.0) == doctest::Approx(2.0 * 0.25).epsilon(1e-12));

  // block average over Rician fading has mean beta
  DeviceGeometry device{1.0, 0.2, 10.0};
  const ChannelStats stats = make_channel_stats(device, 8);
  RngStream rng(5);
  double acc = 0.0;
  const int draws = 100000;
  for (int t = 0; t < draws; ++t) {
    RngStream s = rng.substream(t);
    acc += sa_energy(draw_rician(stats, s).channel, stats.path_gain);
  }
  CHECK(acc / draws == doctest::Approx(stats.path_gain).epsilon(0.02));
}

TEST_CASE("deterministic-limit evaluation matches the LP objective") {
  const Scenario scenario = scenario_a(1e12);
  const VectorXd beta = gains(scenario.stats);
  const double xi = solve_p3_affine_scaling(coupling_matrix(scenario.stats), beta).xi_bar;
  const EvalStats eval = evaluate_scheme(Scheme::lp_avg_csi, scenario, 200, RngStream(7));
  CHECK(eval.mean == doctest::Approx(xi).epsilon(1e-3));
  CHECK(eval.mean_iterations < 50);
  CHECK(eval.trials == 200);
}

TEST_CASE("evaluation is reproducible and scheme-paired") {
  const Scenario scenario = random_instance(4, 8, 3);
  const EvalStats a = evaluate_scheme(Scheme::sa_csi_free, scenario, 500, RngStream(42));
  const EvalStats b = evaluate_scheme(Scheme::sa_csi_free, scenario, 500, RngStream(42));
  CHECK(a.mean == b.mean);
  CHECK(a.half_width == b.half_width);

  // the batch evaluator sees the same draws as separate calls
  const auto batch = evaluate_schemes({Scheme::lp_avg_csi, Scheme::sa_csi_free}, scenario,
                                      {500, 500}, RngStream(42));
  CHECK(batch[1].mean == a.mean);
  const EvalStats lp_alone = evaluate_scheme(Scheme::lp_avg_csi, scenario, 500, RngStream(42));
  CHECK(batch[0].mean == lp_alone.mean);
}

TEST_CASE("full-CSI beats the average-CSI LP in the mean") {
  const Scenario scenario = random_instance(3, 6, 9);
  const auto stats = evaluate_schemes({Scheme::sdp_full_csi, Scheme::lp_avg_csi}, scenario,
                                      {150, 2000}, RngStream(11));
  CHECK(stats[0].mean >= stats[1].mean - stats[0].half_width - stats[1].half_width);
}

TEST_CASE("SA worst case cannot beat the weakest link") {
  const Scenario scenario = random_instance(8, 8, 13);
  const VectorXd beta = gains(scenario.stats);
  const EvalStats sa = evaluate_scheme(Scheme::sa_csi_free, scenario, 4000, RngStream(17));
  CHECK(sa.mean <= beta.minCoeff() + sa.half_width);
}

TEST_CASE("mean of the minimum never exceeds the minimum of the means") {
  const Scenario scenario = scenario_a();
  const VectorXd beta = gains(scenario.stats);
  const BeamSet beams = build_precoders(
      solve_p3_affine_scaling(coupling_matrix(scenario.stats), beta).p, scenario.stats);
  const RngStream stream(23);
  const int trials = 20000;
  VectorXd device_sums = VectorXd::Zero(8);
  double min_sum = 0.0;
  for (int t = 0; t < trials; ++t) {
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 8; ++i) {
      RngStream s = stream.substream(t, i);
      const double e =
          realized_energy(beams, draw_rician(scenario.stats[i], s).channel, beta(i));
      device_sums(i) += e;
      worst = std::min(worst, e);
    }
    min_sum += worst;
  }
  CHECK(min_sum / trials <= device_sums.minCoeff() / trials + 1e-12);
}

TEST_CASE("average energy splits into mean-kernel and scattered parts") {
  const Scenario scenario = scenario_a(10.0);
  const VectorXd beta = gains(scenario.stats);
  const BeamSet beams = build_precoders(
      solve_p3_affine_scaling(coupling_matrix(scenario.stats), beta).p, scenario.stats);
  MatrixXcd w = MatrixXcd::Zero(8, 8);
  for (int k = 0; k < beams.beams.cols(); ++k)
    w += beams.beams.col(k) * beams.beams.col(k).adjoint();

  const RngStream stream(29);
  const int trials = 100000;
  VectorXd acc = VectorXd::Zero(8);
  for (int t = 0; t < trials; ++t)
    for (int i = 0; i < 8; ++i) {
      RngStream s = stream.substream(t, i);
      acc(i) += realized_energy(beams, draw_rician(scenario.stats[i], s).channel, beta(i));
    }
  for (int i = 0; i < 8; ++i) {
    const double expected =
        covariance_energy(w, energy_kernel(scenario.stats[i].mean), beta(i)) +
        scattered_energy(beta(i), scenario.stats[i].rician_factor);
    CHECK(acc(i) / trials == doctest::Approx(expected).epsilon(0.02));
  }
}

TEST_CASE("kappa sweep emits scheme and bound rows that bracket the LP value") {
  SweepOptions options;
  options.trials = 400;
  options.full_csi_trials = 40;
  options.include_bounds = true;
  ScenarioSpec spec;
  spec.kind = ScenarioKind::scenario_A;
  const std::vector<double> grid = {0.0, 20.0, 40.0};
  const SweepResult result =
      sweep_kappa(spec, grid, {Scheme::lp_avg_csi, Scheme::sa_csi_free}, options, 101);
  CHECK(result.rows.size() == grid.size() * 4);  // 2 schemes + 2 bounds per point

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double kappa = std::pow(10.0, grid[gi] / 10.0);
    const Scenario scenario = make_scenario(ScenarioKind::scenario_A, 8, 8, {kappa});
    const double xi =
        solve_p3_affine_scaling(coupling_matrix(scenario.stats), gains(scenario.stats)).xi_bar;
    const ResultRow& lb = result.rows[gi * 4 + 2];
    const ResultRow& ub = result.rows[gi * 4 + 3];
    CHECK(lb.scheme == "bound_lb");
    CHECK(ub.scheme == "bound_ub");
    CHECK(lb.mean_energy <= xi + 1e-12);
    CHECK(ub.mean_energy >= xi - 1e-12);
  }
}

TEST_CASE("antenna sweep records growth and fast convergence") {
  SweepOptions options;
  options.trials = 300;
  options.geometry_redraws = 20;
  options.include_bounds = false;
  const SweepResult result =
      sweep_antennas({4}, {8, 128}, 10.0, {Scheme::lp_avg_csi}, options, 7);
  REQUIRE(result.rows.size() == 2);
  CHECK(result.rows[0].scheme == "lp_avg_csi[N=4]");
  CHECK(result.rows[1].mean_energy > result.rows[0].mean_energy);
  CHECK(result.rows[0].mean_iters < 10.0);
  // convergence speeds up as the coupling hardens towards diagonal
  CHECK(result.rows[1].mean_iters <= result.rows[0].mean_iters);
}

TEST_CASE("rotation sweep is periodic and reproducible") {
  SweepOptions options;
  options.trials = 2000;
  options.include_bounds = false;
  ScenarioSpec spec;
  spec.kind = ScenarioKind::scenario_A;
  const std::vector<double> grid = {0.0, 90.0, 360.0};
  const SweepResult result =
      sweep_rotation(spec, grid, {Scheme::lp_avg_csi}, options, 31);
  REQUIRE(result.rows.size() == 3);
  const auto& at0 = result.rows[0];
  const auto& at360 = result.rows[2];
  CHECK(std::abs(at0.mean_energy - at360.mean_energy) <=
        at0.ci_halfwidth + at360.ci_halfwidth);

  const SweepResult again =
      sweep_rotation(spec, grid, {Scheme::lp_avg_csi}, options, 31);
  CHECK(rows_identical(result, again));
}

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wetbeam/beamforming.hpp"
#include "wetbeam/channel.hpp"
#include "wetbeam/experiment.hpp"
#include "wetbeam/sdp.hpp"
#include "wetbeam/simulate.hpp"

namespace py = pybind11;
using namespace wetbeam;

namespace {

std::vector<double> as_kappas(const py::object& kappa) {
  if (py::isinstance<py::float_>(kappa) || py::isinstance<py::int_>(kappa))
    return {kappa.cast<double>()};
  return kappa.cast<std::vector<double>>();
}

ScenarioKind kind_from_string(const std::string& name) {
  if (name == "annulus") return ScenarioKind::annulus_random;
  if (name == "A") return ScenarioKind::scenario_A;
  if (name == "B") return ScenarioKind::scenario_B;
  if (name == "C") return ScenarioKind::scenario_C;
  throw std::invalid_argument("unknown scenario '" + name + "' (use annulus, A, B or C)");
}

}  // namespace

PYBIND11_MODULE(_wetbeam, m) {
  m.doc() = "Max-min fair energy beamforming for multi-antenna power beacons";

  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("substream", &RngStream::substream, py::arg("a"), py::arg("b") = 0)
      .def("uniform", py::overload_cast<>(&RngStream::uniform))
      .def("normal", &RngStream::normal);

  py::class_<PathLossModel>(m, "PathLossModel")
      .def(py::init<>())
      .def_readwrite("fixed_loss_db", &PathLossModel::fixed_loss_db)
      .def_readwrite("exponent", &PathLossModel::exponent);

  py::class_<DeviceGeometry>(m, "DeviceGeometry")
      .def(py::init<>())
      .def(py::init([](double distance_m, double azimuth_rad, double rician_factor) {
             return DeviceGeometry{distance_m, azimuth_rad, rician_factor};
           }),
           py::arg("distance_m"), py::arg("azimuth_rad"), py::arg("rician_factor"))
      .def_readwrite("distance_m", &DeviceGeometry::distance_m)
      .def_readwrite("azimuth_rad", &DeviceGeometry::azimuth_rad)
      .def_readwrite("rician_factor", &DeviceGeometry::rician_factor);

  py::class_<ChannelStats>(m, "ChannelStats")
      .def_readonly("mean", &ChannelStats::mean)
      .def_readonly("path_gain", &ChannelStats::path_gain)
      .def_readonly("rician_factor", &ChannelStats::rician_factor)
      .def_readonly("cov_scale", &ChannelStats::cov_scale);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("num_antennas", &Scenario::num_antennas)
      .def_readonly("devices", &Scenario::devices)
      .def_readonly("stats", &Scenario::stats);

  py::class_<PowerAllocation>(m, "PowerAllocation")
      .def_readonly("p", &PowerAllocation::p)
      .def_readonly("xi_bar", &PowerAllocation::xi_bar)
      .def_readonly("iterations", &PowerAllocation::iterations)
      .def_readonly("converged", &PowerAllocation::converged)
      .def_readonly("duality_gap", &PowerAllocation::duality_gap)
      .def_readonly("min_reduced_cost", &PowerAllocation::min_reduced_cost);

  py::class_<BeamSet>(m, "BeamSet")
      .def_readonly("beams", &BeamSet::beams)
      .def_readonly("powers", &BeamSet::powers);

  py::class_<SdpResiduals>(m, "SdpResiduals")
      .def_readonly("hermitian", &SdpResiduals::hermitian)
      .def_readonly("trace", &SdpResiduals::trace)
      .def_readonly("psd", &SdpResiduals::psd)
      .def_readonly("energy", &SdpResiduals::energy);

  py::class_<SdpReport>(m, "SdpReport")
      .def_readonly("xi", &SdpReport::xi)
      .def_readonly("iterations", &SdpReport::iterations)
      .def_readonly("bisections", &SdpReport::bisections)
      .def_readonly("converged", &SdpReport::converged)
      .def_readonly("residuals", &SdpReport::residuals);

  py::class_<EvalStats>(m, "EvalStats")
      .def_readonly("mean", &EvalStats::mean)
      .def_readonly("half_width", &EvalStats::half_width)
      .def_readonly("mean_iterations", &EvalStats::mean_iterations)
      .def_readonly("trials", &EvalStats::trials);

  py::class_<ResultRow>(m, "ResultRow")
      .def_readonly("sweep", &ResultRow::sweep)
      .def_readonly("scheme", &ResultRow::scheme)
      .def_readonly("mean_energy", &ResultRow::mean_energy)
      .def_readonly("mean_energy_db", &ResultRow::mean_energy_db)
      .def_readonly("ci_halfwidth", &ResultRow::ci_halfwidth)
      .def_readonly("mean_iters", &ResultRow::mean_iters)
      .def_readonly("has_iters", &ResultRow::has_iters)
      .def_readonly("trials", &ResultRow::trials);

  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("sweep_name", &SweepResult::sweep_name)
      .def_readonly("grid", &SweepResult::grid)
      .def_readonly("rows", &SweepResult::rows)
      .def_readonly("seed", &SweepResult::seed);

  // channel model
  m.def(
      "path_loss_gain",
      [](double distance_m, double fixed_loss_db, double exponent) {
        return path_loss_gain(distance_m, PathLossModel{fixed_loss_db, exponent});
      },
      py::arg("distance_m"), py::arg("fixed_loss_db") = 16.0, py::arg("exponent") = 2.7);
  m.def("ula_phase", &ula_phase, py::arg("azimuth_rad"), py::arg("num_antennas"));
  m.def("mean_channel", &mean_channel, py::arg("rician_factor"), py::arg("phase"));
  m.def(
      "draw_rician",
      [](const ChannelStats& stats, RngStream& rng) { return draw_rician(stats, rng).channel; },
      py::arg("stats"), py::arg("rng"));
  m.def(
      "make_scenario",
      [](const std::string& kind, int n, int num_antennas, const py::object& kappa,
         std::uint64_t seed) {
        RngStream rng = RngStream(seed).substream(0x67656f6d, 0);
        return make_scenario(kind_from_string(kind), n, num_antennas, as_kappas(kappa), &rng);
      },
      py::arg("kind"), py::arg("n"), py::arg("num_antennas"), py::arg("kappa"),
      py::arg("seed") = 1);
  m.def(
      "make_scenario_explicit",
      [](const std::vector<DeviceGeometry>& devices, int num_antennas) {
        return make_scenario(devices, num_antennas);
      },
      py::arg("devices"), py::arg("num_antennas"));
  m.def("rotate", &rotate, py::arg("scenario"), py::arg("angle_rad"));

  // MRT-restricted max-min allocation
  m.def("coupling_matrix", &coupling_matrix, py::arg("stats"));
  m.def("gains", &gains, py::arg("stats"));
  m.def("initial_allocation", &initial_allocation, py::arg("coupling"), py::arg("beta"));
  m.def("bound_lower",
        py::overload_cast<const std::vector<ChannelStats>&>(&bound_lower), py::arg("stats"));
  m.def("bound_upper",
        py::overload_cast<const std::vector<ChannelStats>&>(&bound_upper), py::arg("stats"));
  m.def("rician_bounds", &rician_bounds, py::arg("num_antennas"), py::arg("kappa"),
        py::arg("beta"));
  m.def("scattered_energy", &scattered_energy, py::arg("path_gain"), py::arg("rician_factor"));
  m.def("deterministic_energy", &deterministic_energy, py::arg("p"), py::arg("coupling"),
        py::arg("beta"));
  m.def(
      "solve_p3_affine_scaling",
      [](const MatrixXd& coupling, const VectorXd& beta, double step, double tolerance,
         double cost_slack, int max_iterations, double reference_level) {
        AffineScalingOptions options;
        options.step = step;
        options.tolerance = tolerance;
        options.cost_slack = cost_slack;
        options.max_iterations = max_iterations;
        options.reference_level = reference_level;
        return solve_p3_affine_scaling(coupling, beta, options);
      },
      py::arg("coupling"), py::arg("beta"), py::arg("step") = 0.9, py::arg("tolerance") = 1e-5,
      py::arg("cost_slack") = 1e-4, py::arg("max_iterations") = 500,
      py::arg("reference_level") = 0.02);
  m.def("build_precoders", &build_precoders, py::arg("p"), py::arg("stats"));

  // SDP benchmark
  m.def("energy_kernel", &energy_kernel, py::arg("h"));
  m.def(
      "solve_p2",
      [](const std::vector<MatrixXcd>& kernels, const VectorXd& beta, double rel_tol,
         int max_sweeps) {
        SdpOptions options;
        options.rel_tol = rel_tol;
        options.max_sweeps = max_sweeps;
        return solve_p2(kernels, beta, options);
      },
      py::arg("kernels"), py::arg("beta"), py::arg("rel_tol") = 1e-4,
      py::arg("max_sweeps") = 2000);
  m.def("extract_beams", &extract_beams, py::arg("covariance"), py::arg("rank_tol") = 1e-10);
  m.def("covariance_energy", &covariance_energy, py::arg("covariance"), py::arg("kernel"),
        py::arg("beta"));

  // Monte-Carlo harness
  m.def("realized_energy", &realized_energy, py::arg("beams"), py::arg("h"), py::arg("beta"));
  m.def("sa_energy", &sa_energy, py::arg("h"), py::arg("beta"));
  m.def(
      "evaluate_scheme",
      [](const std::string& scheme, const Scenario& scenario, long trials, std::uint64_t seed) {
        return evaluate_scheme(scheme_from_string(scheme), scenario, trials, RngStream(seed));
      },
      py::arg("scheme"), py::arg("scenario"), py::arg("trials"), py::arg("seed") = 1);
  m.def(
      "sweep_rotation",
      [](const std::string& scenario, const std::vector<double>& alpha_deg_grid,
         const std::vector<std::string>& schemes, long trials, std::uint64_t seed,
         double kappa_db) {
        ScenarioSpec spec;
        spec.kind = kind_from_string(scenario);
        spec.kappa_linear = {std::pow(10.0, kappa_db / 10.0)};
        std::vector<Scheme> parsed;
        for (const auto& s : schemes) parsed.push_back(scheme_from_string(s));
        SweepOptions options;
        options.trials = trials;
        options.include_bounds = false;
        return sweep_rotation(spec, alpha_deg_grid, parsed, options, seed);
      },
      py::arg("scenario"), py::arg("alpha_deg_grid"), py::arg("schemes"),
      py::arg("trials") = 1000, py::arg("seed") = 1, py::arg("kappa_db") = 10.0);
  m.def(
      "sweep_kappa",
      [](const std::string& scenario, const std::vector<double>& kappa_db_grid,
         const std::vector<std::string>& schemes, long trials, std::uint64_t seed,
         int geometry_redraws, long full_csi_trials, bool bounds) {
        ScenarioSpec spec;
        spec.kind = kind_from_string(scenario);
        std::vector<Scheme> parsed;
        for (const auto& s : schemes) parsed.push_back(scheme_from_string(s));
        SweepOptions options;
        options.trials = trials;
        options.geometry_redraws = geometry_redraws;
        options.full_csi_trials = full_csi_trials;
        options.include_bounds = bounds;
        return sweep_kappa(spec, kappa_db_grid, parsed, options, seed);
      },
      py::arg("scenario"), py::arg("kappa_db_grid"), py::arg("schemes"),
      py::arg("trials") = 1000, py::arg("seed") = 1, py::arg("geometry_redraws") = 10,
      py::arg("full_csi_trials") = 100, py::arg("bounds") = true);
  m.def(
      "sweep_antennas",
      [](const std::vector<int>& n_list, const std::vector<int>& m_grid, double kappa_db,
         const std::vector<std::string>& schemes, long trials, std::uint64_t seed,
         int geometry_redraws) {
        std::vector<Scheme> parsed;
        for (const auto& s : schemes) parsed.push_back(scheme_from_string(s));
        SweepOptions options;
        options.trials = trials;
        options.geometry_redraws = geometry_redraws;
        options.include_bounds = false;
        return sweep_antennas(n_list, m_grid, kappa_db, parsed, options, seed);
      },
      py::arg("n_list"), py::arg("m_grid"), py::arg("kappa_db"), py::arg("schemes"),
      py::arg("trials") = 1000, py::arg("seed") = 1, py::arg("geometry_redraws") = 10);
  m.def("render_csv", &render_csv, py::arg("result"));
}

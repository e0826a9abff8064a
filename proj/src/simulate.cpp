#include "wetbeam/simulate.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wetbeam {

namespace {

constexpr double kZ95 = 1.959963984540054;
constexpr std::uint64_t kGeomTag = 0x67656f6d;
constexpr std::uint64_t kEvalTag = 0x6576616c;

double to_db(double energy) { return 10.0 * std::log10(energy); }

struct RawEval {
  double sum = 0.0;
  double sum_sq = 0.0;
  long count = 0;
  double iter_sum = 0.0;
  long iter_count = 0;
  bool has_iters = false;

  void add_sample(double value) {
    sum += value;
    sum_sq += value * value;
    ++count;
  }
  void merge(const RawEval& other) {
    sum += other.sum;
    sum_sq += other.sum_sq;
    count += other.count;
    iter_sum += other.iter_sum;
    iter_count += other.iter_count;
    has_iters = has_iters || other.has_iters;
  }
  EvalStats stats() const {
    EvalStats out;
    out.trials = count;
    out.mean = count > 0 ? sum / count : 0.0;
    if (count > 1) {
      const double var = std::max(0.0, (sum_sq - sum * sum / count) / (count - 1));
      out.half_width = kZ95 * std::sqrt(var / count);
    }
    out.mean_iterations = has_iters && iter_count > 0
                              ? iter_sum / iter_count
                              : std::numeric_limits<double>::quiet_NaN();
    return out;
  }
};

std::vector<RawEval> evaluate_schemes_raw(const std::vector<Scheme>& schemes,
                                          const Scenario& scenario,
                                          const std::vector<long>& trials_per_scheme,
                                          const RngStream& stream, const EvalOptions& options) {
  const int n = static_cast<int>(scenario.devices.size());
  if (schemes.size() != trials_per_scheme.size())
    throw std::invalid_argument("evaluate_schemes: one trial count per scheme required");
  for (long t : trials_per_scheme)
    if (t < 1) throw std::invalid_argument("evaluate_schemes: trials must be >= 1");

  const VectorXd beta = gains(scenario.stats);

  // scenario-level precoders for the average-CSI schemes
  BeamSet lp_beams;
  double lp_iterations = 0.0;
  bool lp_ready = false;
  BeamSet sdp_beams;
  bool sdp_ready = false;
  for (Scheme scheme : schemes) {
    if (scheme == Scheme::lp_avg_csi && !lp_ready) {
      const MatrixXd coupling = coupling_matrix(scenario.stats);
      const PowerAllocation alloc = solve_p3_affine_scaling(coupling, beta, options.lp);
      lp_beams = build_precoders(alloc.p, scenario.stats);
      lp_iterations = alloc.iterations;
      lp_ready = true;
    } else if (scheme == Scheme::sdp_avg_csi && !sdp_ready) {
      std::vector<MatrixXcd> kernels;
      kernels.reserve(n);
      for (const auto& s : scenario.stats) kernels.push_back(energy_kernel(s.mean));
      const auto [w, report] = solve_p2(kernels, beta, options.sdp);
      sdp_beams = extract_beams(w, options.rank_tol);
      sdp_ready = true;
    }
  }

  long max_trials = 0;
  for (long t : trials_per_scheme) max_trials = std::max(max_trials, t);

  std::vector<RawEval> raw(schemes.size());
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    if (schemes[s] == Scheme::lp_avg_csi) {
      raw[s].has_iters = true;
      raw[s].iter_sum = lp_iterations;
      raw[s].iter_count = 1;
    }
  }

  std::vector<VectorXcd> draws(n);
  for (long t = 0; t < max_trials; ++t) {
    for (int i = 0; i < n; ++i) {
      RngStream device_stream = stream.substream(static_cast<std::uint64_t>(t),
                                                 static_cast<std::uint64_t>(i));
      draws[i] = draw_rician(scenario.stats[i], device_stream).channel;
    }
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      if (t >= trials_per_scheme[s]) continue;
      double worst = std::numeric_limits<double>::infinity();
      switch (schemes[s]) {
        case Scheme::lp_avg_csi:
          for (int i = 0; i < n; ++i)
            worst = std::min(worst, realized_energy(lp_beams, draws[i], beta(i)));
          break;
        case Scheme::sdp_avg_csi:
          for (int i = 0; i < n; ++i)
            worst = std::min(worst, realized_energy(sdp_beams, draws[i], beta(i)));
          break;
        case Scheme::sdp_full_csi: {
          std::vector<MatrixXcd> kernels;
          kernels.reserve(n);
          for (int i = 0; i < n; ++i) kernels.push_back(energy_kernel(draws[i]));
          try {
            const auto [w, report] = solve_p2(kernels, beta, options.full_csi_sdp);
            worst = report.xi;  // exact min-energy of the returned covariance
          } catch (const std::exception& e) {
            throw std::runtime_error("sdp_full_csi trial " + std::to_string(t) + ": " + e.what());
          }
          break;
        }
        case Scheme::sa_csi_free:
          for (int i = 0; i < n; ++i)
            worst = std::min(worst, sa_energy(draws[i], beta(i)));
          break;
      }
      raw[s].add_sample(worst);
    }
  }
  return raw;
}

void require_increasing_grid(const std::vector<double>& grid, const char* who) {
  if (grid.empty()) throw std::invalid_argument(std::string(who) + ": empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument(std::string(who) + ": grid must be strictly increasing");
}

std::vector<long> split_trials(const std::vector<Scheme>& schemes, long trials,
                               long full_csi_total, int redraws) {
  std::vector<long> out(schemes.size(), trials);
  for (std::size_t s = 0; s < schemes.size(); ++s)
    if (schemes[s] == Scheme::sdp_full_csi)
      out[s] = std::max<long>(1, (full_csi_total + redraws - 1) / redraws);
  return out;
}

void append_rows(SweepResult& result, double sweep_value, const std::vector<Scheme>& schemes,
                 const std::vector<RawEval>& raw, const std::string& label_suffix = "") {
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    const EvalStats stats = raw[s].stats();
    ResultRow row;
    row.sweep = sweep_value;
    row.scheme = to_string(schemes[s]) + label_suffix;
    row.mean_energy = stats.mean;
    row.mean_energy_db = to_db(stats.mean);
    row.ci_halfwidth = stats.half_width;
    row.has_iters = schemes[s] == Scheme::lp_avg_csi;
    row.mean_iters = row.has_iters ? stats.mean_iterations : 0.0;
    row.trials = stats.trials;
    result.rows.push_back(std::move(row));
  }
}

void append_bound_rows(SweepResult& result, double sweep_value, const RawEval& lb,
                       const RawEval& ub) {
  for (const auto* entry : {&lb, &ub}) {
    const EvalStats stats = entry->stats();
    ResultRow row;
    row.sweep = sweep_value;
    row.scheme = entry == &lb ? "bound_lb" : "bound_ub";
    row.mean_energy = stats.mean;
    row.mean_energy_db = to_db(stats.mean);
    row.ci_halfwidth = stats.half_width;
    row.trials = stats.trials;
    result.rows.push_back(std::move(row));
  }
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::lp_avg_csi: return "lp_avg_csi";
    case Scheme::sdp_avg_csi: return "sdp_avg_csi";
    case Scheme::sdp_full_csi: return "sdp_full_csi";
    case Scheme::sa_csi_free: return "sa_csi_free";
  }
  throw std::invalid_argument("unknown scheme");
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "lp_avg_csi") return Scheme::lp_avg_csi;
  if (name == "sdp_avg_csi") return Scheme::sdp_avg_csi;
  if (name == "sdp_full_csi") return Scheme::sdp_full_csi;
  if (name == "sa_csi_free") return Scheme::sa_csi_free;
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

double realized_energy(const BeamSet& beams, const VectorXcd& h, double beta) {
  if (beams.beams.cols() == 0) return 0.0;
  if (beams.beams.rows() != h.size())
    throw std::invalid_argument("realized_energy: dimension mismatch");
  return beta * (h.transpose() * beams.beams).squaredNorm();
}

double sa_energy(const VectorXcd& h, double beta) {
  if (h.size() < 1) throw std::invalid_argument("sa_energy: empty channel");
  return beta * h.squaredNorm() / static_cast<double>(h.size());
}

EvalStats evaluate_scheme(Scheme scheme, const Scenario& scenario, long trials,
                          const RngStream& stream, const EvalOptions& options) {
  return evaluate_schemes({scheme}, scenario, {trials}, stream, options).front();
}

std::vector<EvalStats> evaluate_schemes(const std::vector<Scheme>& schemes,
                                        const Scenario& scenario,
                                        const std::vector<long>& trials_per_scheme,
                                        const RngStream& stream, const EvalOptions& options) {
  const auto raw = evaluate_schemes_raw(schemes, scenario, trials_per_scheme, stream, options);
  std::vector<EvalStats> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(r.stats());
  return out;
}

Scenario realize_scenario(const ScenarioSpec& spec, RngStream* rng) {
  if (spec.kind == ScenarioKind::explicit_list)
    return make_scenario(spec.explicit_devices, spec.num_antennas, spec.path_loss);
  return make_scenario(spec.kind, spec.num_devices, spec.num_antennas, spec.kappa_linear, rng,
                       spec.path_loss);
}

SweepResult sweep_kappa(const ScenarioSpec& spec, const std::vector<double>& kappa_db_grid,
                        const std::vector<Scheme>& schemes, const SweepOptions& options,
                        std::uint64_t seed) {
  require_increasing_grid(kappa_db_grid, "sweep_kappa");
  SweepResult result;
  result.sweep_name = "kappa_db";
  result.grid = kappa_db_grid;
  result.seed = seed;

  const RngStream root(seed);
  const bool random_geometry = spec.kind == ScenarioKind::annulus_random;
  const int redraws = random_geometry ? options.geometry_redraws : 1;
  const std::vector<long> trials = split_trials(schemes, options.trials,
                                                options.full_csi_trials, redraws);

  for (std::size_t gi = 0; gi < kappa_db_grid.size(); ++gi) {
    const double kappa = std::pow(10.0, kappa_db_grid[gi] / 10.0);
    ScenarioSpec point_spec = spec;
    point_spec.kappa_linear = {kappa};
    for (auto& d : point_spec.explicit_devices) d.rician_factor = kappa;

    std::vector<RawEval> accum(schemes.size());
    RawEval lb_accum, ub_accum;
    for (int r = 0; r < redraws; ++r) {
      RngStream geom = root.substream(kGeomTag, static_cast<std::uint64_t>(r));
      Scenario scenario = realize_scenario(point_spec, random_geometry ? &geom : nullptr);
      const RngStream eval_stream =
          root.substream(kEvalTag, gi).substream(static_cast<std::uint64_t>(r));
      const auto raw =
          evaluate_schemes_raw(schemes, scenario, trials, eval_stream, options.eval);
      for (std::size_t s = 0; s < schemes.size(); ++s) accum[s].merge(raw[s]);
      if (options.include_bounds) {
        const VectorXd beta = gains(scenario.stats);
        const auto [lb, ub] = rician_bounds(
            scenario.num_antennas, VectorXd::Constant(beta.size(), kappa), beta);
        lb_accum.add_sample(lb);
        ub_accum.add_sample(ub);
      }
    }
    append_rows(result, kappa_db_grid[gi], schemes, accum);
    if (options.include_bounds) append_bound_rows(result, kappa_db_grid[gi], lb_accum, ub_accum);
  }
  return result;
}

SweepResult sweep_antennas(const std::vector<int>& n_list, const std::vector<int>& m_grid,
                           double kappa_db, const std::vector<Scheme>& schemes,
                           const SweepOptions& options, std::uint64_t seed) {
  {
    std::vector<double> as_double(m_grid.begin(), m_grid.end());
    require_increasing_grid(as_double, "sweep_antennas");
    std::vector<double> n_double(n_list.begin(), n_list.end());
    require_increasing_grid(n_double, "sweep_antennas");
  }
  SweepResult result;
  result.sweep_name = "num_antennas";
  for (int m : m_grid) result.grid.push_back(m);
  result.seed = seed;

  const RngStream root(seed);
  const double kappa = std::pow(10.0, kappa_db / 10.0);
  const int redraws = options.geometry_redraws;
  const std::vector<long> trials = split_trials(schemes, options.trials,
                                                options.full_csi_trials, redraws);

  // accum[n][m][scheme]; emitted grouped by M so each curve is contiguous
  std::vector<std::vector<std::vector<RawEval>>> accum(
      n_list.size(),
      std::vector<std::vector<RawEval>>(m_grid.size(), std::vector<RawEval>(schemes.size())));
  std::vector<std::vector<RawEval>> lb_accum(n_list.size(),
                                             std::vector<RawEval>(m_grid.size()));
  std::vector<std::vector<RawEval>> ub_accum = lb_accum;

  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    for (int r = 0; r < redraws; ++r) {
      // one geometry per (N, redraw), shared across the antenna grid
      RngStream geom = root.substream(kGeomTag, static_cast<std::uint64_t>(n))
                           .substream(static_cast<std::uint64_t>(r));
      std::vector<DeviceGeometry> devices(n);
      for (int i = 0; i < n; ++i) {
        devices[i].distance_m = geom.uniform(1.0, 10.0);
        devices[i].azimuth_rad = geom.uniform(-std::numbers::pi / 2.0, std::numbers::pi / 2.0);
        devices[i].rician_factor = kappa;
      }
      for (std::size_t mi = 0; mi < m_grid.size(); ++mi) {
        Scenario scenario = make_scenario(devices, m_grid[mi]);
        const RngStream eval_stream =
            root.substream(kEvalTag, static_cast<std::uint64_t>(n))
                .substream(static_cast<std::uint64_t>(r), mi);
        const auto raw =
            evaluate_schemes_raw(schemes, scenario, trials, eval_stream, options.eval);
        for (std::size_t s = 0; s < schemes.size(); ++s) accum[ni][mi][s].merge(raw[s]);
        if (options.include_bounds) {
          const VectorXd beta = gains(scenario.stats);
          const auto [lb, ub] = rician_bounds(
              m_grid[mi], VectorXd::Constant(beta.size(), kappa), beta);
          lb_accum[ni][mi].add_sample(lb);
          ub_accum[ni][mi].add_sample(ub);
        }
      }
    }
  }

  for (std::size_t mi = 0; mi < m_grid.size(); ++mi)
    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
      const std::string suffix = "[N=" + std::to_string(n_list[ni]) + "]";
      append_rows(result, m_grid[mi], schemes, accum[ni][mi], suffix);
      if (options.include_bounds) {
        const std::size_t before = result.rows.size();
        append_bound_rows(result, m_grid[mi], lb_accum[ni][mi], ub_accum[ni][mi]);
        for (std::size_t j = before; j < result.rows.size(); ++j)
          result.rows[j].scheme += suffix;
      }
    }
  return result;
}

SweepResult sweep_rotation(const ScenarioSpec& spec, const std::vector<double>& alpha_deg_grid,
                           const std::vector<Scheme>& schemes, const SweepOptions& options,
                           std::uint64_t seed) {
  require_increasing_grid(alpha_deg_grid, "sweep_rotation");
  SweepResult result;
  result.sweep_name = "alpha_deg";
  result.grid = alpha_deg_grid;
  result.seed = seed;

  const RngStream root(seed);
  const bool random_geometry = spec.kind == ScenarioKind::annulus_random;
  const int redraws = random_geometry ? options.geometry_redraws : 1;
  const std::vector<long> trials = split_trials(schemes, options.trials,
                                                options.full_csi_trials, redraws);

  for (std::size_t ai = 0; ai < alpha_deg_grid.size(); ++ai) {
    const double alpha_rad = alpha_deg_grid[ai] * std::numbers::pi / 180.0;
    std::vector<RawEval> accum(schemes.size());
    RawEval lb_accum, ub_accum;
    for (int r = 0; r < redraws; ++r) {
      RngStream geom = root.substream(kGeomTag, static_cast<std::uint64_t>(r));
      Scenario scenario = realize_scenario(spec, random_geometry ? &geom : nullptr);
      scenario = rotate(scenario, alpha_rad);
      const RngStream eval_stream =
          root.substream(kEvalTag, ai).substream(static_cast<std::uint64_t>(r));
      const auto raw =
          evaluate_schemes_raw(schemes, scenario, trials, eval_stream, options.eval);
      for (std::size_t s = 0; s < schemes.size(); ++s) accum[s].merge(raw[s]);
      if (options.include_bounds) {
        const VectorXd beta = gains(scenario.stats);
        VectorXd kappa(beta.size());
        for (Eigen::Index i = 0; i < kappa.size(); ++i)
          kappa(i) = scenario.stats[i].rician_factor;
        const auto [lb, ub] = rician_bounds(scenario.num_antennas, kappa, beta);
        lb_accum.add_sample(lb);
        ub_accum.add_sample(ub);
      }
    }
    append_rows(result, alpha_deg_grid[ai], schemes, accum);
    if (options.include_bounds) append_bound_rows(result, alpha_deg_grid[ai], lb_accum, ub_accum);
  }
  return result;
}

}  // namespace wetbeam

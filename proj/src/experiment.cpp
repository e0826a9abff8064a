#include "wetbeam/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "wetbeam/errors.hpp"

namespace wetbeam {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string fmt(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token, int line) {
  const std::string t = trim(token);
  double value = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("malformed number '" + t + "'", line);
  return value;
}

long parse_long(const std::string& token, int line) {
  const std::string t = trim(token);
  long value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("malformed integer '" + t + "'", line);
  return value;
}

std::uint64_t parse_u64(const std::string& token, int line) {
  const std::string t = trim(token);
  std::uint64_t value = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), value);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw ConfigError("malformed unsigned integer '" + t + "'", line);
  return value;
}

bool parse_bool(const std::string& token, int line) {
  const std::string t = trim(token);
  if (t == "true") return true;
  if (t == "false") return false;
  throw ConfigError("expected 'true' or 'false', got '" + t + "'", line);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string::size_type start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

// comma list or start:step:stop range (inclusive)
std::vector<double> parse_grid(const std::string& token, int line) {
  const std::string t = trim(token);
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) throw ConfigError("range must be start:step:stop", line);
    const double start = parse_double(parts[0], line);
    const double step = parse_double(parts[1], line);
    const double stop = parse_double(parts[2], line);
    if (!(step > 0.0)) throw ConfigError("range step must be positive", line);
    if (stop < start) throw ConfigError("range stop must be >= start", line);
    std::vector<double> out;
    const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& piece : split(t, ',')) out.push_back(parse_double(piece, line));
  return out;
}

std::vector<int> parse_int_grid(const std::string& token, int line) {
  std::vector<int> out;
  for (double v : parse_grid(token, line)) {
    if (v != std::floor(v)) throw ConfigError("expected integers in grid", line);
    out.push_back(static_cast<int>(v));
  }
  return out;
}

ScenarioKind parse_scenario(const std::string& token, int line) {
  const std::string t = trim(token);
  if (t == "A") return ScenarioKind::scenario_A;
  if (t == "B") return ScenarioKind::scenario_B;
  if (t == "C") return ScenarioKind::scenario_C;
  if (t == "annulus") return ScenarioKind::annulus_random;
  if (t == "explicit") return ScenarioKind::explicit_list;
  throw ConfigError("unknown scenario '" + t + "' (use A, B, C, annulus or explicit)", line);
}

std::vector<Scheme> parse_schemes(const std::string& token, int line) {
  std::vector<Scheme> out;
  for (const auto& piece : split(trim(token), ',')) {
    try {
      out.push_back(scheme_from_string(trim(piece)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), line);
    }
  }
  return out;
}

void require_increasing(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw ConfigError(std::string(name) + " must not be empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ConfigError(std::string(name) + " must be strictly increasing");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::vector<Scheme> default_schemes(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kappa:
      return {Scheme::lp_avg_csi, Scheme::sdp_avg_csi, Scheme::sdp_full_csi,
              Scheme::sa_csi_free};
    case ExperimentKind::antennas:
      return {Scheme::lp_avg_csi, Scheme::sa_csi_free};
    case ExperimentKind::rotation:
      return {Scheme::lp_avg_csi, Scheme::sdp_avg_csi};
    case ExperimentKind::solve_once:
      return {Scheme::lp_avg_csi};
  }
  return {};
}

SweepOptions sweep_options(const ExperimentConfig& config) {
  SweepOptions options;
  options.trials = config.trials;
  options.full_csi_trials = config.full_csi_trials;
  options.geometry_redraws = config.geometry_redraws;
  options.include_bounds = config.bounds;
  options.eval.lp.step = config.delta;
  options.eval.lp.tolerance = config.epsilon;
  options.eval.lp.cost_slack = config.eta;
  options.eval.sdp.rel_tol = config.sdp_tol;
  options.eval.sdp.max_sweeps = config.sdp_max_sweeps;
  return options;
}

void write_file(const std::string& path, const std::string& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

void print_summary(const SweepResult& result, std::ostream& os) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<const ResultRow*, const ResultRow*>> extremes;
  for (const auto& row : result.rows) {
    auto it = extremes.find(row.scheme);
    if (it == extremes.end()) {
      extremes[row.scheme] = {&row, &row};
      order.push_back(row.scheme);
    } else {
      if (row.mean_energy_db < it->second.first->mean_energy_db) it->second.first = &row;
      if (row.mean_energy_db > it->second.second->mean_energy_db) it->second.second = &row;
    }
  }
  for (const auto& scheme : order) {
    const auto& [lo, hi] = extremes[scheme];
    os << scheme << ": min " << fmt(lo->mean_energy_db) << " dB at " << result.sweep_name << "="
       << fmt(lo->sweep) << ", max " << fmt(hi->mean_energy_db) << " dB at " << result.sweep_name
       << "=" << fmt(hi->sweep) << "\n";
  }
}

int run_solve_once(const ExperimentConfig& config, std::ostream& os) {
  const ScenarioSpec spec = scenario_spec(config);
  RngStream geom = RngStream(config.seed).substream(0x67656f6d, 0);
  const Scenario scenario =
      realize_scenario(spec, spec.kind == ScenarioKind::annulus_random ? &geom : nullptr);
  const VectorXd beta = gains(scenario.stats);
  const Scheme scheme = config.schemes.front();

  std::ostringstream text;
  text << "scheme = " << to_string(scheme) << "\n";
  text << "devices = " << scenario.devices.size() << ", antennas = " << scenario.num_antennas
       << "\n";
  if (scheme == Scheme::lp_avg_csi) {
    const MatrixXd coupling = coupling_matrix(scenario.stats);
    const SweepOptions options = sweep_options(config);
    const PowerAllocation alloc = solve_p3_affine_scaling(coupling, beta, options.eval.lp);
    text << "p =";
    for (Eigen::Index i = 0; i < alloc.p.size(); ++i) text << " " << fmt(alloc.p(i));
    text << "\nsum_p = " << fmt(alloc.p.sum()) << "\n";
    text << "xi_bar = " << fmt(alloc.xi_bar) << " (" << fmt(10.0 * std::log10(alloc.xi_bar))
         << " dB)\n";
    text << "iterations = " << alloc.iterations << "\n";
    text << "converged = " << (alloc.converged ? "true" : "false") << "\n";
    text << "bound_lb = " << fmt(bound_lower(scenario.stats))
         << ", bound_ub = " << fmt(bound_upper(scenario.stats)) << "\n";
  } else if (scheme == Scheme::sdp_avg_csi) {
    std::vector<MatrixXcd> kernels;
    for (const auto& s : scenario.stats) kernels.push_back(energy_kernel(s.mean));
    const SweepOptions options = sweep_options(config);
    const auto [w, report] = solve_p2(kernels, beta, options.eval.sdp);
    const BeamSet beams = extract_beams(w);
    text << "xi = " << fmt(report.xi) << " (" << fmt(10.0 * std::log10(report.xi)) << " dB)\n";
    text << "rank = " << beams.beams.cols() << "\n";
    text << "projection_sweeps = " << report.iterations << "\n";
    text << "converged = " << (report.converged ? "true" : "false") << "\n";
  } else {
    throw ConfigError("solve supports lp_avg_csi and sdp_avg_csi only");
  }

  os << text.str();
  if (!config.out.empty()) write_file(config.out, text.str());
  return 0;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kappa: return "kappa";
    case ExperimentKind::antennas: return "antennas";
    case ExperimentKind::rotation: return "rotation";
    case ExperimentKind::solve_once: return "solve";
  }
  throw std::invalid_argument("unknown experiment kind");
}

ExperimentConfig parse_config(const std::string& text, ExperimentKind kind) {
  ExperimentConfig config;
  config.kind = kind;

  bool schemes_set = false;
  bool alpha_set = false;
  bool out_set = false;
  std::set<std::string> seen;

  std::istringstream stream(text);
  std::string raw_line;
  int line_no = 0;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    if (value.empty()) throw ConfigError("empty value for key '" + key + "'", line_no);
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no);

    if (key == "kind") {
      if (value != to_string(kind))
        throw ConfigError("config kind '" + value + "' does not match subcommand '" +
                              to_string(kind) + "'",
                          line_no);
    } else if (key == "scenario") {
      config.scenario = parse_scenario(value, line_no);
    } else if (key == "n") {
      config.num_devices = static_cast<int>(parse_long(value, line_no));
    } else if (key == "m") {
      config.num_antennas = static_cast<int>(parse_long(value, line_no));
    } else if (key == "kappa_db") {
      config.kappa_db = parse_grid(value, line_no);
    } else if (key == "schemes") {
      config.schemes = parse_schemes(value, line_no);
      schemes_set = true;
    } else if (key == "kappa_db_grid") {
      config.kappa_db_grid = parse_grid(value, line_no);
    } else if (key == "m_grid") {
      config.m_grid = parse_int_grid(value, line_no);
    } else if (key == "n_list") {
      config.n_list = parse_int_grid(value, line_no);
    } else if (key == "alpha_deg_grid") {
      config.alpha_deg_grid = parse_grid(value, line_no);
      alpha_set = true;
    } else if (key == "distances_m") {
      config.distances_m = parse_grid(value, line_no);
    } else if (key == "azimuths_deg") {
      config.azimuths_deg = parse_grid(value, line_no);
    } else if (key == "delta") {
      config.delta = parse_double(value, line_no);
    } else if (key == "epsilon") {
      config.epsilon = parse_double(value, line_no);
    } else if (key == "eta") {
      config.eta = parse_double(value, line_no);
    } else if (key == "trials") {
      config.trials = parse_long(value, line_no);
    } else if (key == "geometry_redraws") {
      config.geometry_redraws = static_cast<int>(parse_long(value, line_no));
    } else if (key == "full_csi_trials") {
      config.full_csi_trials = parse_long(value, line_no);
    } else if (key == "sdp_tol") {
      config.sdp_tol = parse_double(value, line_no);
    } else if (key == "sdp_max_sweeps") {
      config.sdp_max_sweeps = static_cast<int>(parse_long(value, line_no));
    } else if (key == "seed") {
      config.seed = parse_u64(value, line_no);
    } else if (key == "out") {
      config.out = value;
      out_set = true;
    } else if (key == "bounds") {
      config.bounds = parse_bool(value, line_no);
    } else {
      throw ConfigError("unknown key '" + key + "'", line_no);
    }
  }

  if (!schemes_set) config.schemes = default_schemes(kind);
  if (!alpha_set) {
    config.alpha_deg_grid.clear();
    for (int a = 0; a < 180; ++a) config.alpha_deg_grid.push_back(a);
  }
  if (!out_set) config.out = "wetbeam_" + to_string(kind) + ".csv";

  validate_config(config);
  return config;
}

void validate_config(const ExperimentConfig& config) {
  if (config.num_devices < 1) throw ConfigError("n must be >= 1");
  if (config.num_antennas < 1) throw ConfigError("m must be >= 1");
  if (config.scenario == ScenarioKind::scenario_A || config.scenario == ScenarioKind::scenario_B ||
      config.scenario == ScenarioKind::scenario_C) {
    if (config.num_devices != 8)
      throw ConfigError("scenarios A/B/C are defined for exactly 8 devices (n = 8)");
  }
  if (config.scenario == ScenarioKind::explicit_list) {
    if (static_cast<int>(config.distances_m.size()) != config.num_devices ||
        static_cast<int>(config.azimuths_deg.size()) != config.num_devices)
      throw ConfigError("explicit scenario needs distances_m and azimuths_deg with n entries");
    for (double d : config.distances_m)
      if (!(d > 0.0)) throw ConfigError("distances_m entries must be > 0");
  } else if (!config.distances_m.empty() || !config.azimuths_deg.empty()) {
    throw ConfigError("distances_m/azimuths_deg require scenario = explicit");
  }
  if (config.kappa_db.size() != 1 &&
      static_cast<int>(config.kappa_db.size()) != config.num_devices)
    throw ConfigError("kappa_db needs a single value or one per device");
  if (config.kind == ExperimentKind::antennas && config.kappa_db.size() != 1)
    throw ConfigError("the antennas sweep takes a single kappa_db value");
  if (config.schemes.empty()) throw ConfigError("schemes must not be empty");
  if (!(config.delta > 0.0 && config.delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0))
    throw ConfigError("epsilon must lie in (0,1)");
  if (!(config.eta > 0.0 && config.eta < 1.0)) throw ConfigError("eta must lie in (0,1)");
  if (config.trials < 1) throw ConfigError("trials must be >= 1");
  if (config.geometry_redraws < 1) throw ConfigError("geometry_redraws must be >= 1");
  if (config.full_csi_trials < 1) throw ConfigError("full_csi_trials must be >= 1");
  if (!(config.sdp_tol > 0.0 && config.sdp_tol < 1.0)) throw ConfigError("sdp_tol must lie in (0,1)");
  if (config.sdp_max_sweeps < 1) throw ConfigError("sdp_max_sweeps must be >= 1");

  require_increasing(config.kappa_db_grid, "kappa_db_grid");
  require_increasing(config.alpha_deg_grid, "alpha_deg_grid");
  std::vector<double> m_grid(config.m_grid.begin(), config.m_grid.end());
  require_increasing(m_grid, "m_grid");
  for (int m : config.m_grid)
    if (m < 1) throw ConfigError("m_grid entries must be >= 1");
  std::vector<double> n_list(config.n_list.begin(), config.n_list.end());
  require_increasing(n_list, "n_list");
  for (int n : config.n_list)
    if (n < 1) throw ConfigError("n_list entries must be >= 1");
}

ScenarioSpec scenario_spec(const ExperimentConfig& config) {
  ScenarioSpec spec;
  spec.kind = config.scenario;
  spec.num_devices = config.num_devices;
  spec.num_antennas = config.num_antennas;
  spec.kappa_linear.clear();
  for (double db : config.kappa_db) spec.kappa_linear.push_back(db_to_linear(db));
  if (config.scenario == ScenarioKind::explicit_list) {
    spec.explicit_devices.resize(config.num_devices);
    for (int i = 0; i < config.num_devices; ++i) {
      spec.explicit_devices[i].distance_m = config.distances_m[i];
      spec.explicit_devices[i].azimuth_rad =
          config.azimuths_deg[i] * std::numbers::pi / 180.0;
      spec.explicit_devices[i].rician_factor =
          spec.kappa_linear[config.kappa_db.size() == 1 ? 0 : i];
    }
  }
  return spec;
}

std::string render_csv(const SweepResult& result) {
  std::string csv = "sweep,scheme,mean_energy,mean_energy_db,ci_halfwidth,mean_iters,trials\n";
  for (const auto& row : result.rows) {
    csv += fmt(row.sweep);
    csv += ',';
    csv += row.scheme;
    csv += ',';
    csv += fmt(row.mean_energy);
    csv += ',';
    csv += fmt(row.mean_energy_db);
    csv += ',';
    csv += fmt(row.ci_halfwidth);
    csv += ',';
    if (row.has_iters) csv += fmt(row.mean_iters);
    csv += ',';
    csv += std::to_string(row.trials);
    csv += '\n';
  }
  return csv;
}

int run_experiment(const ExperimentConfig& config, std::ostream& summary) {
  validate_config(config);
  if (config.kind == ExperimentKind::solve_once) return run_solve_once(config, summary);

  const SweepOptions options = sweep_options(config);
  SweepResult result;
  switch (config.kind) {
    case ExperimentKind::kappa:
      result = sweep_kappa(scenario_spec(config), config.kappa_db_grid, config.schemes, options,
                           config.seed);
      break;
    case ExperimentKind::antennas:
      result = sweep_antennas(config.n_list, config.m_grid, config.kappa_db.front(),
                              config.schemes, options, config.seed);
      break;
    case ExperimentKind::rotation:
      result = sweep_rotation(scenario_spec(config), config.alpha_deg_grid, config.schemes,
                              options, config.seed);
      break;
    case ExperimentKind::solve_once:
      break;  // handled above
  }

  write_file(config.out, render_csv(result));
  summary << "wrote " << config.out << " (" << result.rows.size() << " rows)\n";
  print_summary(result, summary);
  return 0;
}

}  // namespace wetbeam

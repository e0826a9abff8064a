#include "wetbeam/channel.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wetbeam {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double deg) { return deg * kPi / 180.0; }

void validate_device(const DeviceGeometry& device, int index) {
  if (!(device.distance_m > 0.0))
    throw std::domain_error("device " + std::to_string(index) + ": distance must be > 0 m");
  if (!(device.rician_factor >= 0.0))
    throw std::domain_error("device " + std::to_string(index) + ": Rician factor must be >= 0");
  if (!std::isfinite(device.azimuth_rad))
    throw std::domain_error("device " + std::to_string(index) + ": azimuth must be finite");
}

std::vector<double> broadcast_kappas(const std::vector<double>& kappas, int num_devices) {
  if (kappas.size() == 1) return std::vector<double>(num_devices, kappas.front());
  if (static_cast<int>(kappas.size()) != num_devices)
    throw std::invalid_argument("need one Rician factor per device (or a single shared value)");
  return kappas;
}

Scenario finalize(std::vector<DeviceGeometry> devices, int num_antennas,
                  const PathLossModel& model) {
  if (num_antennas < 1) throw std::domain_error("need at least one antenna");
  static std::atomic<bool> warned{false};
  if (static_cast<int>(devices.size()) > num_antennas && !warned.exchange(true))
    std::cerr << "warning: " << devices.size() << " devices exceed " << num_antennas
              << " antennas; such setups are supported but atypical (warned once)\n";
  Scenario scenario;
  scenario.num_antennas = num_antennas;
  scenario.stats.reserve(devices.size());
  for (std::size_t i = 0; i < devices.size(); ++i) {
    validate_device(devices[i], static_cast<int>(i));
    scenario.stats.push_back(make_channel_stats(devices[i], num_antennas, model));
  }
  scenario.devices = std::move(devices);
  return scenario;
}

}  // namespace

double path_loss_gain(double distance_m, const PathLossModel& model) {
  if (!(distance_m > 0.0)) throw std::domain_error("path_loss_gain: distance must be > 0 m");
  return std::pow(10.0, -model.fixed_loss_db / 10.0) * std::pow(distance_m, -model.exponent);
}

VectorXd ula_phase(double azimuth_rad, int num_antennas) {
  if (num_antennas < 1) throw std::domain_error("ula_phase: need at least one antenna");
  VectorXd phase(num_antennas);
  const double s = std::sin(azimuth_rad);
  for (int m = 0; m < num_antennas; ++m) phase(m) = -static_cast<double>(m) * kPi * s;
  return phase;
}

VectorXcd mean_channel(double rician_factor, const VectorXd& phase) {
  if (!(rician_factor >= 0.0)) throw std::domain_error("mean_channel: Rician factor must be >= 0");
  const double amplitude = std::sqrt(rician_factor / (1.0 + rician_factor));
  VectorXcd mean(phase.size());
  for (Eigen::Index m = 0; m < phase.size(); ++m) mean(m) = std::polar(amplitude, phase(m));
  return mean;
}

ChannelStats make_channel_stats(const DeviceGeometry& device, int num_antennas,
                                const PathLossModel& model) {
  validate_device(device, 0);
  ChannelStats stats;
  stats.mean = mean_channel(device.rician_factor, ula_phase(device.azimuth_rad, num_antennas));
  stats.path_gain = path_loss_gain(device.distance_m, model);
  stats.rician_factor = device.rician_factor;
  stats.cov_scale = 1.0 / (1.0 + device.rician_factor);
  return stats;
}

FadingDraw draw_rician(const ChannelStats& stats, RngStream& rng) {
  // per-entry scattered variance is cov_scale, split evenly over re/im
  const double sigma = std::sqrt(0.5 * stats.cov_scale);
  FadingDraw draw;
  draw.channel.resize(stats.mean.size());
  for (Eigen::Index m = 0; m < stats.mean.size(); ++m) {
    const double re = rng.normal();
    const double im = rng.normal();
    draw.channel(m) = stats.mean(m) + std::complex<double>(sigma * re, sigma * im);
  }
  return draw;
}

Scenario make_scenario(ScenarioKind kind, int num_devices, int num_antennas,
                       const std::vector<double>& rician_factors, RngStream* rng,
                       const PathLossModel& model) {
  if (num_devices < 1) throw std::domain_error("need at least one device");
  if (rician_factors.empty()) throw std::invalid_argument("no Rician factors given");
  const std::vector<double> kappas = broadcast_kappas(rician_factors, num_devices);

  std::vector<DeviceGeometry> devices(num_devices);
  switch (kind) {
    case ScenarioKind::annulus_random: {
      if (rng == nullptr)
        throw std::invalid_argument("annulus_random placement needs an RNG stream");
      for (int i = 0; i < num_devices; ++i) {
        devices[i].distance_m = rng->uniform(1.0, 10.0);
        devices[i].azimuth_rad = rng->uniform(-kPi / 2.0, kPi / 2.0);
        devices[i].rician_factor = kappas[i];
      }
      break;
    }
    case ScenarioKind::scenario_A: {
      if (num_devices != 8) throw std::domain_error("scenario A is defined for exactly 8 devices");
      const double d[8] = {2, 2, 4, 4, 6, 6, 8, 8};
      for (int i = 0; i < 8; ++i)
        devices[i] = {d[i], deg2rad(10.0 * (i + 1)), kappas[i]};
      break;
    }
    case ScenarioKind::scenario_B: {
      if (num_devices != 8) throw std::domain_error("scenario B is defined for exactly 8 devices");
      for (int i = 0; i < 8; ++i)
        devices[i] = {2.0 + i, deg2rad(90.0 - 10.0 * (i + 1)), kappas[i]};
      break;
    }
    case ScenarioKind::scenario_C: {
      if (num_devices != 8) throw std::domain_error("scenario C is defined for exactly 8 devices");
      const double d[8] = {3, 3, 5, 5, 7, 7, 10, 10};
      const double theta[8] = {20, 20, 60, 60, 40, 40, 10, 80};
      for (int i = 0; i < 8; ++i)
        devices[i] = {d[i], deg2rad(theta[i]), kappas[i]};
      break;
    }
    case ScenarioKind::explicit_list:
      throw std::invalid_argument("explicit_list takes the device-vector overload");
  }
  return finalize(std::move(devices), num_antennas, model);
}

Scenario make_scenario(std::vector<DeviceGeometry> devices, int num_antennas,
                       const PathLossModel& model) {
  if (devices.empty()) throw std::domain_error("need at least one device");
  return finalize(std::move(devices), num_antennas, model);
}

Scenario rotate(const Scenario& scenario, double angle_rad) {
  Scenario rotated = scenario;
  for (std::size_t i = 0; i < rotated.devices.size(); ++i) {
    rotated.devices[i].azimuth_rad += angle_rad;
    rotated.stats[i].mean = mean_channel(
        rotated.devices[i].rician_factor,
        ula_phase(rotated.devices[i].azimuth_rad, rotated.num_antennas));
  }
  return rotated;
}

}  // namespace wetbeam

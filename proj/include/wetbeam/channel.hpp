#pragma once

#include <Eigen/Dense>
#include <vector>

#include "wetbeam/rng.hpp"

namespace wetbeam {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Log-distance path loss: gain = 10^(-fixed_loss_db/10) * d^(-exponent).
struct PathLossModel {
  double fixed_loss_db = 16.0;
  double exponent = 2.7;
};

double path_loss_gain(double distance_m, const PathLossModel& model = {});

struct DeviceGeometry {
  double distance_m = 1.0;
  double azimuth_rad = 0.0;     // measured from the array boresight
  double rician_factor = 1.0;   // linear kappa >= 0
};

/// First-order channel statistics of one device against the M-antenna array.
struct ChannelStats {
  VectorXcd mean;       // deterministic component, length M
  double path_gain;     // beta
  double rician_factor; // linear kappa
  double cov_scale;     // 1/(1+kappa); scattered covariance is cov_scale * I
};

struct FadingDraw {
  VectorXcd channel;  // mean + scattered realization
};

/// Half-wavelength ULA phase profile: element m is -m*pi*sin(azimuth).
VectorXd ula_phase(double azimuth_rad, int num_antennas);

/// Deterministic Rician component: sqrt(kappa/(1+kappa)) * exp(i*phase).
VectorXcd mean_channel(double rician_factor, const VectorXd& phase);

ChannelStats make_channel_stats(const DeviceGeometry& device, int num_antennas,
                                const PathLossModel& model = {});

/// One quasi-static block realization; entries of the scattered part are
/// i.i.d. complex Gaussian with per-entry variance 1/(1+kappa).
FadingDraw draw_rician(const ChannelStats& stats, RngStream& rng);

enum class ScenarioKind { annulus_random, scenario_A, scenario_B, scenario_C, explicit_list };

struct Scenario {
  int num_antennas = 0;
  std::vector<DeviceGeometry> devices;
  std::vector<ChannelStats> stats;
};

/// Builds geometry + statistics for one of the canned setups.
///
/// `rician_factors` holds linear kappa values, either one per device or a
/// single value broadcast to all. annulus_random places devices uniformly at
/// 1-10 m with azimuths in (-pi/2, pi/2) and needs `rng`; the fixed setups
/// A/B/C require exactly 8 devices.
Scenario make_scenario(ScenarioKind kind, int num_devices, int num_antennas,
                       const std::vector<double>& rician_factors, RngStream* rng = nullptr,
                       const PathLossModel& model = {});

/// Explicit device list variant.
Scenario make_scenario(std::vector<DeviceGeometry> devices, int num_antennas,
                       const PathLossModel& model = {});

/// Array rotation by `angle_rad`: every azimuth is shifted, distances and
/// path gains stay put, means are rebuilt.
Scenario rotate(const Scenario& scenario, double angle_rad);

}  // namespace wetbeam

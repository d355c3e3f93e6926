#pragma once

#include <cstdint>
#include <vector>

#include "ltvwc/launcher/trajectory.hpp"
#include "ltvwc/ltv.hpp"

namespace ltvwc::launcher {

/// Dryden lateral-turbulence shaping filter at a frozen flight condition:
/// white noise of unit power spectral density in, wind speed out.
LtiStateSpace dryden_filter(double V, double L, double sigma);

struct SimOptions {
  double t0 = 25.0;
  double tf = 95.0;
  double dt = 1e-3;        // integration step
  double noise_dt = 0.01;  // white-noise sample-and-hold period
  double noise_scale = 1.0;  // 0 disables the turbulence input
  std::uint64_t seed = 1;
  bool control_enabled = true;
};

struct SimResult {
  std::vector<double> t;        // output sample times (noise_dt spacing)
  std::vector<double> theta;    // rad
  std::vector<double> dtheta;   // rad, tracking error theta - theta_ref
  std::vector<double> qalpha;   // Pa deg
  std::vector<double> alpha;    // rad
  std::vector<double> delta;    // rad, TVC deflection
  std::vector<double> wind;     // m/s
  std::vector<double> noise_energy;  // cumulative integral of n^2 up to t
  bool unstable = false;
  double t_unstable = 0.0;
  double peak_qalpha = 0.0;  // max |qalpha|
  double t_peak = 0.0;

  double qalpha_at(double time) const;
  double noise_energy_at(double time) const;
};

/// Closed-loop nonlinear pitch-plane simulation along the reference
/// trajectory: PID with derivative filter, second-order TVC with a dead-time
/// buffer, Dryden turbulence driven by sampled white noise, fixed-step
/// fourth-order integration.
SimResult simulate_nonlinear(const LauncherParams& params, const TrajectoryRef& traj,
                             const UncertaintySample& sample, const SimOptions& opts);

}  // namespace ltvwc::launcher

#pragma once

#include <vector>

#include "ltvwc/launcher/dataset.hpp"

namespace ltvwc::launcher {

/// Gravity-turn reference flight path sampled on a uniform time grid.
struct TrajectoryRef {
  std::vector<double> t;       // s
  std::vector<double> h;       // m
  std::vector<double> theta;   // rad
  std::vector<double> xdot;    // m/s, body-axis speed

  double h_at(double time) const;
  double theta_at(double time) const;
  double xdot_at(double time) const;
  /// Pitch rate of the turn itself, -g cos(theta)/xdot.
  double theta_dot_at(double time) const;
  double mach_at(double time) const;
  double dyn_pressure_at(double time) const;  // Pa

 private:
  double interp(const std::vector<double>& y, double time) const;
};

/// Integrate the gravity-turn initial value problem (fixed-step fourth-order
/// scheme, 0.01 s) and iterate the initial pitch angle and speed with a
/// finite-difference Newton/secant scheme until the terminal altitude and
/// pitch angle match the dataset targets within 0.5 % relative.
/// Throws std::runtime_error after 100 iterations without convergence.
TrajectoryRef gravity_turn(const LauncherParams& params);

/// Single forward integration from the given initial values (exposed for
/// tests and the shooting iteration).
TrajectoryRef integrate_turn(const LauncherParams& params, double theta0, double xdot0);

}  // namespace ltvwc::launcher

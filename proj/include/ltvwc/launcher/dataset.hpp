#pragma once

#include <string>
#include <vector>

namespace ltvwc::launcher {

/// Piecewise-linear lookup table with clamped extrapolation.
class Table1D {
 public:
  Table1D() = default;
  Table1D(std::vector<double> x, std::vector<double> y);

  double eval(double x) const;
  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }

 private:
  std::vector<double> x_, y_;
};

/// PID tracking controller with a first-order derivative filter.
struct ControlGains {
  double kp = 0.0, ki = 0.0, kd = 0.0;
  double t_filter = 0.02;  // s, derivative filter time constant
};

/// One point of the Monte Carlo uncertainty space (relative perturbations).
struct UncertaintySample {
  double d_lcg = 0.0;   // |.| <= 0.1
  double d_lga = 0.0;   // |.| <= 0.2
  double d_gain = 0.0;  // TVC static gain, |.| <= 0.1
  double d_damp = 0.0;  // TVC damping ratio, |.| <= 0.1
  double d_freq = 0.0;  // TVC eigenfrequency, |.| <= 0.1
  double delay = 0.01;  // s, dead time in {0.005, 0.01}
};

/// Two-stage small-launcher dataset: tabulated mass/thrust/inertia and
/// geometry versus time, aerodynamic coefficients versus Mach, turbulence
/// intensity/scale versus altitude, and the control/trajectory constants.
struct LauncherParams {
  Table1D mass;      // t [s] -> kg
  Table1D inertia;   // t [s] -> kg m^2 (pitch axis)
  Table1D thrust;    // t [s] -> N
  Table1D l_cg;      // t [s] -> m, centre of gravity to nozzle pivot
  Table1D l_ga_t;    // t [s] -> m, time part of the static-margin arm
  Table1D l_ga_ma;   // Ma -> m, Mach-dependent centre-of-pressure shift
  Table1D c_n_alpha; // Ma -> 1/rad
  Table1D c_x0;      // Ma -> -
  Table1D c_x_alpha; // Ma -> 1/rad
  Table1D sigma_w;   // h [m] -> m/s, turbulence intensity
  Table1D scale_w;   // h [m] -> m, turbulence scale length
  double s_ref = 0.0;       // m^2
  double qalpha_lim = 0.0;  // Pa deg, structural limit load

  // TVC second-order actuator 1 / (a2 s^2 + a1 s + 1).
  double tvc_a2 = 0.0, tvc_a1 = 0.0;

  ControlGains gains;

  // Gravity-turn boundary data: fixed launch altitude, terminal targets at
  // t_end, and the shooting starting point.
  double turn_t_end = 0.0;
  double turn_h0 = 0.0;
  double turn_target_h = 0.0;      // m at t_end
  double turn_target_theta = 0.0;  // rad at t_end
  double turn_guess_theta = 0.0;   // rad at t = 0
  double turn_guess_xdot = 0.0;    // m/s at t = 0

  double l_ga(double t, double mach) const { return l_ga_t.eval(t) + l_ga_ma.eval(mach); }
};

/// The shipped toy vehicle (lift-off mass 140 t, stage 1 burning through the
/// whole analysis horizon). All values are constructed, not measured.
LauncherParams toy_dataset();

/// Structured-text (JSON) round trip of the dataset tables and constants.
void save_dataset(const LauncherParams& params, const std::string& path);
LauncherParams load_dataset(const std::string& path);

}  // namespace ltvwc::launcher

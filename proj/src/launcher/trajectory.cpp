#include "ltvwc/launcher/trajectory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "ltvwc/launcher/atmosphere.hpp"

namespace ltvwc::launcher {

namespace {
constexpr double kStep = 0.01;  // s
}

double TrajectoryRef::interp(const std::vector<double>& y, double time) const {
  if (time <= t.front()) return y.front();
  if (time >= t.back()) return y.back();
  const double dt = t[1] - t[0];
  const std::size_t k = std::min(y.size() - 2, std::size_t((time - t.front()) / dt));
  const double s = (time - t[k]) / dt;
  return y[k] + s * (y[k + 1] - y[k]);
}

double TrajectoryRef::h_at(double time) const { return interp(h, time); }
double TrajectoryRef::theta_at(double time) const { return interp(theta, time); }
double TrajectoryRef::xdot_at(double time) const { return interp(xdot, time); }

double TrajectoryRef::theta_dot_at(double time) const {
  return -gravity(h_at(time)) * std::cos(theta_at(time)) / xdot_at(time);
}

double TrajectoryRef::mach_at(double time) const {
  return xdot_at(time) / speed_of_sound(h_at(time));
}

double TrajectoryRef::dyn_pressure_at(double time) const {
  const double v = xdot_at(time);
  return 0.5 * isa_density(h_at(time)) * v * v;
}

TrajectoryRef integrate_turn(const LauncherParams& p, double theta0, double xdot0) {
  // State [h, theta, xdot] at zero angle of attack; thrust minus zero-lift
  // drag minus the gravity component along the body axis.
  auto rhs = [&](double t, const std::array<double, 3>& x) {
    const double h = std::max(x[0], 0.0);
    const double theta = x[1];
    const double v = x[2];
    const double mach = v / speed_of_sound(h);
    const double q = 0.5 * isa_density(h) * v * v;
    const double drag = q * p.s_ref * p.c_x0.eval(mach);
    const double g = gravity(h);
    return std::array<double, 3>{
        v * std::sin(theta),
        -g * std::cos(theta) / v,
        (p.thrust.eval(t) - drag) / p.mass.eval(t) - g * std::sin(theta)};
  };

  const std::size_t n = std::size_t(std::lround(p.turn_t_end / kStep)) + 1;
  TrajectoryRef traj;
  traj.t.resize(n);
  traj.h.resize(n);
  traj.theta.resize(n);
  traj.xdot.resize(n);

  std::array<double, 3> x{p.turn_h0, theta0, xdot0};
  for (std::size_t k = 0; k < n; ++k) {
    const double t = double(k) * kStep;
    traj.t[k] = t;
    traj.h[k] = x[0];
    traj.theta[k] = x[1];
    traj.xdot[k] = x[2];
    if (k + 1 == n) break;
    const auto k1 = rhs(t, x);
    auto add = [&](const std::array<double, 3>& a, double s, const std::array<double, 3>& b) {
      return std::array<double, 3>{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
    };
    const auto k2 = rhs(t + 0.5 * kStep, add(x, 0.5 * kStep, k1));
    const auto k3 = rhs(t + 0.5 * kStep, add(x, 0.5 * kStep, k2));
    const auto k4 = rhs(t + kStep, add(x, kStep, k3));
    for (int i = 0; i < 3; ++i)
      x[std::size_t(i)] += kStep / 6.0 * (k1[std::size_t(i)] + 2.0 * k2[std::size_t(i)] +
                                          2.0 * k3[std::size_t(i)] + k4[std::size_t(i)]);
  }
  return traj;
}

TrajectoryRef gravity_turn(const LauncherParams& p) {
  double theta0 = p.turn_guess_theta;
  double xdot0 = p.turn_guess_xdot;

  auto residual = [&](double th, double xd) {
    const TrajectoryRef traj = integrate_turn(p, th, xd);
    return std::array<double, 2>{
        (traj.h.back() - p.turn_target_h) / p.turn_target_h,
        (traj.theta.back() - p.turn_target_theta) / p.turn_target_theta};
  };

  for (int it = 0; it < 100; ++it) {
    const auto r = residual(theta0, xdot0);
    if (std::abs(r[0]) < 5e-3 && std::abs(r[1]) < 5e-3)
      return integrate_turn(p, theta0, xdot0);

    // Finite-difference Jacobian of the two residuals in the two unknowns.
    const double dth = 1e-4, dxd = 0.1;
    const auto r_th = residual(theta0 + dth, xdot0);
    const auto r_xd = residual(theta0, xdot0 + dxd);
    const double j11 = (r_th[0] - r[0]) / dth, j12 = (r_xd[0] - r[0]) / dxd;
    const double j21 = (r_th[1] - r[1]) / dth, j22 = (r_xd[1] - r[1]) / dxd;
    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-14) throw std::runtime_error("gravity-turn shooting is singular");
    // Damped Newton step: the terminal state is extremely sensitive to the
    // initial pitch near vertical, so clamp the update.
    const double step_th = (j22 * r[0] - j12 * r[1]) / det;
    const double step_xd = (-j21 * r[0] + j11 * r[1]) / det;
    theta0 -= std::clamp(step_th, -0.005, 0.005);
    xdot0 -= std::clamp(step_xd, -2.0, 2.0);
    if (!(xdot0 > 1.0) || !(theta0 > 0.5) || !(theta0 < 1.6))
      throw std::runtime_error("gravity-turn shooting diverged");
  }
  throw std::runtime_error("gravity-turn shooting did not converge in 100 iterations");
}

}  // namespace ltvwc::launcher

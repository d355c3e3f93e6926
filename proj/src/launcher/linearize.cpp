#include "ltvwc/launcher/linearize.hpp"

#include <cmath>

#include "ltvwc/launcher/atmosphere.hpp"

namespace ltvwc::launcher {

namespace {
constexpr double kPi = 3.14159265358979323846;

struct Point {
  double theta, theta_dot, zdot;  // states
  double delta, vw;               // inputs
};

/// Pitch dynamics with altitude and body-axis speed frozen at the reference.
void eval_dynamics(const LauncherParams& p, const TrajectoryRef& traj, double t,
                   const Point& s, double f[3], double y[2]) {
  const double h = traj.h_at(t);
  const double xdot = traj.xdot_at(t);
  const double mach = xdot / speed_of_sound(h);
  const double q = 0.5 * isa_density(h) * xdot * xdot;
  const double grav = gravity(h);
  const double l_ga = p.l_ga(t, mach);
  const double l_cg = p.l_cg.eval(t);
  const double mass = p.mass.eval(t);
  const double J = p.inertia.eval(t);
  const double thrust = p.thrust.eval(t);

  const double alpha = (s.zdot - s.vw) / xdot;
  const double alpha_n = (s.zdot - s.vw - l_ga * s.theta_dot) / xdot;
  const double N = q * p.s_ref * p.c_n_alpha.eval(mach) * alpha_n;

  f[0] = s.theta_dot;
  f[1] = N * l_ga / J - thrust * l_cg / J * std::sin(s.delta);
  f[2] = -N / mass - thrust / mass * std::sin(s.delta) + grav * std::cos(s.theta) +
         s.theta_dot * xdot;
  y[0] = s.theta;
  y[1] = q * alpha * 180.0 / kPi;
}

}  // namespace

TimeVaryingStateSpace linearize(const LauncherParams& p, const TrajectoryRef& traj,
                                double t_start, double t_end, double dt) {
  const TimeGrid grid = TimeGrid::uniform(t_start, t_end, dt);
  std::vector<MatrixXd> As, Bs, Cs, Ds;
  As.reserve(grid.size());
  Bs.reserve(grid.size());
  Cs.reserve(grid.size());
  Ds.reserve(grid.size());

  const double eps[5] = {1e-6, 1e-6, 1e-4, 1e-6, 1e-4};

  for (double t : grid.times()) {
    const Point ref{traj.theta_at(t), traj.theta_dot_at(t), 0.0, 0.0, 0.0};
    MatrixXd A(3, 3), B(3, 2), C(2, 3), D(2, 2);
    for (int j = 0; j < 5; ++j) {
      Point lo = ref, hi = ref;
      double* fields_lo[5] = {&lo.theta, &lo.theta_dot, &lo.zdot, &lo.delta, &lo.vw};
      double* fields_hi[5] = {&hi.theta, &hi.theta_dot, &hi.zdot, &hi.delta, &hi.vw};
      *fields_lo[j] -= eps[j];
      *fields_hi[j] += eps[j];
      double f_lo[3], f_hi[3], y_lo[2], y_hi[2];
      eval_dynamics(p, traj, t, lo, f_lo, y_lo);
      eval_dynamics(p, traj, t, hi, f_hi, y_hi);
      for (int i = 0; i < 3; ++i) {
        const double d = (f_hi[i] - f_lo[i]) / (2.0 * eps[j]);
        if (j < 3) A(i, j) = d;
        else B(i, j - 3) = d;
      }
      for (int i = 0; i < 2; ++i) {
        const double d = (y_hi[i] - y_lo[i]) / (2.0 * eps[j]);
        if (j < 3) C(i, j) = d;
        else D(i, j - 3) = d;
      }
    }
    As.push_back(A);
    Bs.push_back(B);
    Cs.push_back(C);
    Ds.push_back(D);
  }

  ChannelMap in{{"delta", {0, 1}}, {"vw", {1, 1}}};
  ChannelMap out{{"theta", {0, 1}}, {"qalpha", {1, 1}}};
  return {MatrixFunction(grid, As), MatrixFunction(grid, Bs), MatrixFunction(grid, Cs),
          MatrixFunction(grid, Ds), in, out};
}

}  // namespace ltvwc::launcher

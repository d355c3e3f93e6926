#include "ltvwc/launcher/simulation.hpp"

#include <array>
#include <cmath>
#include <deque>
#include <random>

#include "ltvwc/launcher/atmosphere.hpp"

namespace ltvwc::launcher {

namespace {
constexpr double kPi = 3.14159265358979323846;

double interp_series(const std::vector<double>& t, const std::vector<double>& y,
                     double time) {
  if (time <= t.front()) return y.front();
  if (time >= t.back()) return y.back();
  const double dt = t[1] - t[0];
  const std::size_t k = std::min(y.size() - 2, std::size_t((time - t.front()) / dt));
  const double s = (time - t[k]) / dt;
  return y[k] + s * (y[k + 1] - y[k]);
}
}  // namespace

LtiStateSpace dryden_filter(double V, double L, double sigma) {
  if (!(V > 0.0) || !(L > 0.0) || sigma < 0.0)
    throw std::invalid_argument("dryden filter needs V, L > 0 and sigma >= 0");
  const double a = V / L;
  MatrixXd A(2, 2), B(2, 1), C(1, 2), D(1, 1);
  A << 0.0, 1.0, -a * a, -2.0 * a;
  B << 0.0, a * a;
  C << sigma * std::sqrt(L / (kPi * V)), sigma * (L / V) * std::sqrt(3.0 * L / (kPi * V));
  D << 0.0;
  return {A, B, C, D};
}

double SimResult::qalpha_at(double time) const { return interp_series(t, qalpha, time); }
double SimResult::noise_energy_at(double time) const {
  return interp_series(t, noise_energy, time);
}

SimResult simulate_nonlinear(const LauncherParams& p, const TrajectoryRef& traj,
                             const UncertaintySample& sample, const SimOptions& opts) {
  // State layout: [theta, theta_dot, xdot, zdot, h, ctrl integrator,
  // derivative-filter state, tvc deflection, tvc rate, dryden x1, dryden x2].
  constexpr int kN = 11;
  using State = std::array<double, kN>;

  const double wn0 = 1.0 / std::sqrt(p.tvc_a2);
  const double zeta0 = 0.5 * p.tvc_a1 * wn0;
  const double wn = wn0 * (1.0 + sample.d_freq);
  const double zeta = zeta0 * (1.0 + sample.d_damp);
  const double tvc_gain = 1.0 + sample.d_gain;
  const ControlGains& g = p.gains;

  // Dead-time buffer on the commanded deflection, one slot per step.
  const std::size_t delay_steps = std::size_t(std::lround(sample.delay / opts.dt));
  std::deque<double> delay_line(delay_steps, 0.0);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double noise_std = opts.noise_scale * std::sqrt(kPi / opts.noise_dt);

  double noise = 0.0;

  auto rhs = [&](double t, const State& x, double delta_cmd_delayed) {
    const double theta = x[0], theta_dot = x[1], xdot = x[2], zdot = x[3];
    const double h = std::max(x[4], 0.0);
    const double v = std::sqrt(xdot * xdot + zdot * zdot);
    const double mach = v / speed_of_sound(h);
    const double q = 0.5 * isa_density(h) * v * v;
    const double grav = gravity(h);

    const double sig = p.sigma_w.eval(h), len = p.scale_w.eval(h);
    const double a = v / len;
    const double vw = opts.noise_scale == 0.0
                          ? 0.0
                          : sig * std::sqrt(len / (kPi * v)) * x[9] +
                                sig * (len / v) * std::sqrt(3.0 * len / (kPi * v)) * x[10];

    const double l_ga = p.l_ga(t, mach) * (1.0 + sample.d_lga);
    const double l_cg = p.l_cg.eval(t) * (1.0 + sample.d_lcg);
    const double mass = p.mass.eval(t);
    const double J = p.inertia.eval(t);
    const double thrust = p.thrust.eval(t);

    const double alpha = (zdot - vw) / xdot;
    // Local angle of attack at the centre of pressure: the pitch rate sweeps
    // the nose through the air and damps the rotation.
    const double alpha_n = (zdot - vw - l_ga * theta_dot) / xdot;
    const double N = q * p.s_ref * p.c_n_alpha.eval(mach) * alpha_n;
    const double X = q * p.s_ref * (p.c_x0.eval(mach) + p.c_x_alpha.eval(mach) * alpha);
    const double delta = x[7];

    const double e = traj.theta_at(t) - theta;
    State dx{};
    dx[0] = theta_dot;
    dx[1] = N * l_ga / J - thrust * l_cg / J * std::sin(delta);
    dx[2] = (thrust * std::cos(delta) - X) / mass - grav * std::sin(theta) -
            theta_dot * zdot;
    dx[3] = -N / mass - thrust / mass * std::sin(delta) + grav * std::cos(theta) +
            theta_dot * xdot;
    dx[4] = xdot * std::sin(theta) - zdot * std::cos(theta);
    dx[5] = e;
    dx[6] = (e - x[6]) / g.t_filter;
    dx[7] = x[8];
    dx[8] = wn * wn * (tvc_gain * delta_cmd_delayed - x[7]) - 2.0 * zeta * wn * x[8];
    dx[9] = x[10];
    dx[10] = -a * a * x[9] - 2.0 * a * x[10] + a * a * noise;
    return dx;
  };

  auto command = [&](double t, const State& x) {
    if (!opts.control_enabled) return 0.0;
    const double e = traj.theta_at(t) - x[0];
    // Positive deflection pitches the nose down, hence the sign flip.
    return -(g.kp * e + g.ki * x[5] + g.kd * (e - x[6]) / g.t_filter);
  };

  State x{};
  x[0] = traj.theta_at(opts.t0);
  x[1] = traj.theta_dot_at(opts.t0);
  x[2] = traj.xdot_at(opts.t0);
  x[3] = 0.0;
  x[4] = traj.h_at(opts.t0);

  SimResult res;
  const std::size_t n_steps = std::size_t(std::lround((opts.tf - opts.t0) / opts.dt));
  const std::size_t record_every = std::size_t(std::lround(opts.noise_dt / opts.dt));
  double noise_energy = 0.0;
  double next_noise_t = opts.t0;

  auto record = [&](double t, const State& s) {
    const double h = std::max(s[4], 0.0);
    const double v = std::sqrt(s[2] * s[2] + s[3] * s[3]);
    const double q = 0.5 * isa_density(h) * v * v;
    const double sig = p.sigma_w.eval(h), len = p.scale_w.eval(h);
    const double vw = opts.noise_scale == 0.0
                          ? 0.0
                          : sig * std::sqrt(len / (kPi * v)) * s[9] +
                                sig * (len / v) * std::sqrt(3.0 * len / (kPi * v)) * s[10];
    const double alpha = (s[3] - vw) / s[2];
    const double qalpha = q * alpha * 180.0 / kPi;
    res.t.push_back(t);
    res.theta.push_back(s[0]);
    res.dtheta.push_back(s[0] - traj.theta_at(t));
    res.qalpha.push_back(qalpha);
    res.alpha.push_back(alpha);
    res.delta.push_back(s[7]);
    res.wind.push_back(vw);
    res.noise_energy.push_back(noise_energy);
    if (std::abs(qalpha) > res.peak_qalpha) {
      res.peak_qalpha = std::abs(qalpha);
      res.t_peak = t;
    }
  };

  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double t = opts.t0 + double(k) * opts.dt;
    if (t >= next_noise_t - 0.5 * opts.dt) {
      noise = noise_std == 0.0 ? 0.0 : noise_std * gauss(rng);
      noise_energy += noise * noise * opts.noise_dt;
      next_noise_t += opts.noise_dt;
    }
    if (k % record_every == 0) record(t, x);
    if (std::abs(x[0] - traj.theta_at(t)) > kPi / 2.0) {
      res.unstable = true;
      res.t_unstable = t;
      break;
    }
    if (k == n_steps) break;

    const double u_now = command(t, x);
    double u_delayed = u_now;
    if (delay_steps > 0) {
      delay_line.push_back(u_now);
      u_delayed = delay_line.front();
      delay_line.pop_front();
    }

    const State k1 = rhs(t, x, u_delayed);
    State x2;
    for (int i = 0; i < kN; ++i) x2[std::size_t(i)] = x[std::size_t(i)] + 0.5 * opts.dt * k1[std::size_t(i)];
    const State k2 = rhs(t + 0.5 * opts.dt, x2, u_delayed);
    for (int i = 0; i < kN; ++i) x2[std::size_t(i)] = x[std::size_t(i)] + 0.5 * opts.dt * k2[std::size_t(i)];
    const State k3 = rhs(t + 0.5 * opts.dt, x2, u_delayed);
    for (int i = 0; i < kN; ++i) x2[std::size_t(i)] = x[std::size_t(i)] + opts.dt * k3[std::size_t(i)];
    const State k4 = rhs(t + opts.dt, x2, u_delayed);
    for (int i = 0; i < kN; ++i)
      x[std::size_t(i)] += opts.dt / 6.0 *
                           (k1[std::size_t(i)] + 2.0 * k2[std::size_t(i)] +
                            2.0 * k3[std::size_t(i)] + k4[std::size_t(i)]);
  }
  return res;
}

}  // namespace ltvwc::launcher

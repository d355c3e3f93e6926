#include "ltvwc/launcher/interconnection.hpp"

#include <cmath>
#include <stdexcept>

#include "ltvwc/launcher/atmosphere.hpp"

namespace ltvwc::launcher {

namespace {
constexpr double kPi = 3.14159265358979323846;

// TVC uncertainty weight (2.6 s + 14.47) / (s + 144.7): 10 % static-gain
// uncertainty, covering the dead time and the actuator parameter spread.
constexpr double kWtvcPole = 144.7;
constexpr double kWtvcD = 2.6;
constexpr double kWtvcC = 14.47 - kWtvcD * kWtvcPole;  // -361.75
}  // namespace

IqcStack make_launcher_stack() {
  UncertaintyDecl tvc{UncertaintyKind::DynamicLti, 1, 1.0, {1, -1.0}, "tvc"};
  UncertaintyDecl lga{UncertaintyKind::RealRepeated, 2, 0.2, {1, -1.0}, "lga"};
  UncertaintyDecl lcg{UncertaintyKind::RealRepeated, 1, 0.1, {1, -1.0}, "lcg"};
  return IqcStack({build_iqc_block(tvc), build_iqc_block(lga), build_iqc_block(lcg)});
}

TimeVaryingStateSpace build_analysis_interconnection(const LauncherParams& p,
                                                     const TrajectoryRef& traj,
                                                     const WindFilterLtv& wind,
                                                     const InterconnectionOptions& opts) {
  const bool uncertain = opts.with_uncertainty && opts.fixed == nullptr;
  const UncertaintySample sample = opts.fixed ? *opts.fixed : UncertaintySample{};
  const bool pade = opts.fixed != nullptr && sample.delay > 0.0;

  // State layout: plant [theta, theta_dot, zdot], controller [integrator,
  // derivative filter], TVC [deflection, rate], wind filter state, then the
  // variant-specific tail (TVC weight state / Pade delay pair).
  const Eigen::Index i_th = 0, i_thd = 1, i_zd = 2, i_xi = 3, i_xd = 4;
  const Eigen::Index i_t1 = 5, i_t2 = 6, i_wf = 7;
  const Eigen::Index i_wtvc = 8;
  const Eigen::Index i_p1 = 8, i_p2 = 9;
  const Eigen::Index nx = 8 + (uncertain ? 1 : 0) + (pade ? 2 : 0);

  const Eigen::Index n_w = uncertain ? 4 : 0;
  const Eigen::Index nin = n_w + 1;
  const Eigen::Index nout = n_w + 1;

  // Perturbed actuator parameters (identity for the uncertain variant,
  // whose spread lives in the IQC weight instead).
  const double wn0 = 1.0 / std::sqrt(p.tvc_a2);
  const double zeta0 = 0.5 * p.tvc_a1 * wn0;
  const double wn = wn0 * (1.0 + sample.d_freq);
  const double zeta = zeta0 * (1.0 + sample.d_damp);
  const double tvc_gain = 1.0 + sample.d_gain;
  const ControlGains& g = p.gains;
  const double c_pd = g.kp + g.kd / g.t_filter;  // u_c coefficient on theta

  const TimeGrid grid = TimeGrid::uniform(opts.t_start, opts.t_end, opts.dt);
  std::vector<MatrixXd> As, Bs, Cs, Ds;
  As.reserve(grid.size());
  Bs.reserve(grid.size());
  Cs.reserve(grid.size());
  Ds.reserve(grid.size());

  for (double t : grid.times()) {
    const double h = traj.h_at(t);
    const double xdot = traj.xdot_at(t);
    const double mach = xdot / speed_of_sound(h);
    const double q = 0.5 * isa_density(h) * xdot * xdot;
    const double l_ga = p.l_ga(t, mach) * (1.0 + sample.d_lga);
    const double l_cg = p.l_cg.eval(t) * (1.0 + sample.d_lcg);
    const double mass = p.mass.eval(t);
    const double J = p.inertia.eval(t);
    const double thrust = p.thrust.eval(t);
    const double n_bar = q * p.s_ref * p.c_n_alpha.eval(mach) / xdot;  // N per m/s
    const double b_dm = -thrust * l_cg / J;  // pitch acceleration per rad of TVC
    const double g_sin = -gravity(h) * std::sin(traj.theta_at(t));
    const double kq = q * (180.0 / kPi) / xdot;  // Pa deg per m/s of normal speed

    const double pw = -wind.sys.A().eval(t)(0, 0);
    const double gw = wind.sys.C().eval(t)(0, 0);

    MatrixXd A = MatrixXd::Zero(nx, nx);
    MatrixXd B = MatrixXd::Zero(nx, nin);
    MatrixXd C = MatrixXd::Zero(nout, nx);
    MatrixXd D = MatrixXd::Zero(nout, nin);
    const Eigen::Index u_d = n_w;  // disturbance input column
    const Eigen::Index y_e = n_w;  // load output row

    // Plant: theta_ddot = (l_ga / J) N + TVC moment; N = n_bar (zdot - vw
    // - l_ga theta_dot) plus, for the uncertain variant, the normal-force
    // perturbation channel w2.
    A(i_th, i_thd) = 1.0;
    A(i_thd, i_thd) = -l_ga / J * n_bar * l_ga;
    A(i_thd, i_zd) = l_ga / J * n_bar;
    A(i_thd, i_wf) = -l_ga / J * n_bar * gw;
    A(i_thd, i_t1) = b_dm;
    A(i_zd, i_th) = g_sin;
    A(i_zd, i_thd) = n_bar * l_ga / mass + xdot;
    A(i_zd, i_zd) = -n_bar / mass;
    A(i_zd, i_wf) = n_bar * gw / mass;
    A(i_zd, i_t1) = -thrust / mass;

    // Controller on the tracking error e = -theta (positive deflection
    // pitches down): u_c = c_pd theta - ki xi + (kd / t_f) xd.
    A(i_xi, i_th) = -1.0;
    A(i_xd, i_th) = -1.0 / g.t_filter;
    A(i_xd, i_xd) = -1.0 / g.t_filter;

    // Actuator x_t2' = wn^2 (gain u_t - x_t1) - 2 zeta wn x_t2.
    const double a_cmd = wn * wn * tvc_gain;
    A(i_t1, i_t2) = 1.0;
    A(i_t2, i_t1) = -wn * wn;
    A(i_t2, i_t2) = -2.0 * zeta * wn;
    A(i_t2, i_th) = a_cmd * c_pd;
    A(i_t2, i_xi) = -a_cmd * g.ki;
    A(i_t2, i_xd) = a_cmd * g.kd / g.t_filter;

    // Wind filter and the load output.
    A(i_wf, i_wf) = -pw;
    B(i_wf, u_d) = pw;
    C(y_e, i_zd) = kq;
    C(y_e, i_wf) = -kq * gw;

    if (pade) {
      // Second-order Pade dead time on the commanded deflection,
      // u_t = (1 - s tau / D(s)) u_c with D = tau^2/12 s^2 + tau/2 s + 1,
      // realized in balanced coordinates: all couplings stay O(1/tau), so
      // the Riccati solution over these states remains well scaled.
      const double tau = sample.delay;
      const double a_bal = std::sqrt(12.0) / tau;  // off-diagonal coupling
      A(i_p1, i_p2) = a_bal;
      A(i_p2, i_p1) = -a_bal;
      A(i_p2, i_p2) = -6.0 / tau;
      A(i_p2, i_th) = a_bal * c_pd;
      A(i_p2, i_xi) = -a_bal * g.ki;
      A(i_p2, i_xd) = a_bal * g.kd / g.t_filter;
      A(i_t2, i_p2) = -a_cmd * std::sqrt(12.0);
    }

    if (uncertain) {
      // TVC weight state driven by the commanded deflection.
      A(i_wtvc, i_wtvc) = -kWtvcPole;
      A(i_wtvc, i_th) = c_pd;
      A(i_wtvc, i_xi) = -g.ki;
      A(i_wtvc, i_xd) = g.kd / g.t_filter;

      // w1 adds to the actuator input, w2 to the normal force, w3 to the
      // aerodynamic moment, w4 to the TVC moment.
      B(i_t2, 0) = wn * wn * tvc_gain;
      B(i_thd, 1) = l_ga / J;
      B(i_thd, 2) = 1.0 / J;
      B(i_thd, 3) = 1.0;
      B(i_zd, 1) = -1.0 / mass;

      // v1: weighted TVC command; v2: normal-force sensitivity to the
      // static-margin arm; v3: moment-arm sensitivity; v4: TVC-moment
      // sensitivity to the nozzle arm.
      C(0, i_wtvc) = kWtvcC;
      C(0, i_th) = kWtvcD * c_pd;
      C(0, i_xi) = -kWtvcD * g.ki;
      C(0, i_xd) = kWtvcD * g.kd / g.t_filter;
      C(1, i_thd) = -n_bar * l_ga;
      C(2, i_thd) = -l_ga * n_bar * l_ga;
      C(2, i_zd) = l_ga * n_bar;
      C(2, i_wf) = -l_ga * n_bar * gw;
      D(2, 1) = l_ga;
      C(3, i_t1) = b_dm;
    }

    As.push_back(std::move(A));
    Bs.push_back(std::move(B));
    Cs.push_back(std::move(C));
    Ds.push_back(std::move(D));
  }

  ChannelMap in, out;
  if (uncertain) {
    in = {{"w", {0, 4}}, {"d", {4, 1}}};
    out = {{"v", {0, 4}}, {"e", {4, 1}}};
  } else {
    in = {{"d", {0, 1}}};
    out = {{"e", {0, 1}}};
  }

  if (uncertain) {
    // Normalize each uncertainty channel pair: the raw v signals span many
    // orders of magnitude (actuator commands in radians next to aerodynamic
    // moments in newton metres), which would force the multiplier search
    // towards extreme scalings. Replacing (v_i, w_i) by (v_i/s_i, w_i/s_i)
    // preserves w_i = delta v_i, the norm bound and the d -> e gain, while
    // making commensurate multipliers feasible. The scale s_i is the RMS
    // response of v_i to a deterministic broadband multi-sine disturbance.
    TimeVaryingStateSpace raw(MatrixFunction(grid, As), MatrixFunction(grid, Bs),
                              MatrixFunction(grid, Cs), MatrixFunction(grid, Ds), in,
                              out);
    // Fine probe step: the fixed-step integration must resolve the fastest
    // actuator mode, well above the 0.1 s coefficient grid.
    const double probe_dt = 2e-3;
    std::vector<double> ts;
    for (double t = opts.t_start; t < opts.t_end + 0.5 * probe_dt; t += probe_dt)
      ts.push_back(std::min(t, opts.t_end));
    std::vector<VectorXd> u(ts.size(), VectorXd::Zero(nin));
    for (std::size_t k = 0; k < ts.size(); ++k) {
      double d_sig = 0.0;
      for (int j = 0; j < 20; ++j) {
        const double omega = 0.05 * std::pow(10.0, 3.0 * double(j) / 19.0);  // 0.05..50
        d_sig += std::sin(omega * ts[k] + double(j * j));
      }
      u[k](n_w) = d_sig;
    }
    const std::vector<VectorXd> y =
        simulate(raw, ts, u, VectorXd::Zero(nx));
    VectorXd rms = VectorXd::Zero(n_w);
    for (const VectorXd& yk : y) rms += yk.head(n_w).cwiseAbs2();
    rms = (rms / double(y.size())).cwiseSqrt();
    const double floor_scale = 1e-9 * std::max(rms.maxCoeff(), 1e-30);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      for (Eigen::Index i = 0; i < n_w; ++i) {
        const double s = std::max(rms(i), floor_scale);
        Cs[k].row(i) /= s;
        Ds[k].row(i) /= s;
        Bs[k].col(i) *= s;
        Ds[k].col(i) *= s;
      }
    }
  }

  return {MatrixFunction(grid, As), MatrixFunction(grid, Bs), MatrixFunction(grid, Cs),
          MatrixFunction(grid, Ds), in, out};
}

}  // namespace ltvwc::launcher

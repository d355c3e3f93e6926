// Acceptance gate: one line per criterion, PASS or FAIL, nonzero exit on
// any failure. Criteria are checked in order and kept independent.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <vector>

#include "ltvwc/analysis.hpp"
#include "ltvwc/launcher/interconnection.hpp"
#include "ltvwc/launcher/monte_carlo.hpp"
#include "ltvwc/model_io.hpp"
#include "test_systems.hpp"

using namespace ltvwc;
using namespace ltvwc::launcher;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double now_s() {
  using clock = std::chrono::steady_clock;
  static const auto t0 = clock::now();
  return std::chrono::duration<double>(clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const MatrixXd kEmptyM = MatrixXd::Zero(0, 0);

// ---- 1: closed-form gain of the scalar lag --------------------------------
void criterion1() {
  const double t0 = now_s();
  const double T = 2.0;
  ExtendedSystem ext = build_extended_nominal(testsys::scalar_lag(T));
  BisectionConfig bc;
  bc.gamma_lb = 1e-3;
  bc.gamma_ub = 100.0;
  bc.eps_bs = 1e-6;
  bc.t_start = 0.0;
  bc.T = T;
  GainResult g = bisect_gamma(ext, kEmptyM, bc);
  const double ref = testsys::scalar_lag_gain(T);
  const double dt = now_s() - t0;
  report(1, g.feasible() && std::abs(g.gamma - ref) < 1e-3 && dt < 1.0,
         fmt("gamma=%.6f ref=%.6f err=%.2e wall=%.2fs", g.gamma, ref,
             std::abs(g.gamma - ref), dt));
}

// ---- 2: frequency-domain oracle for random stable LTI systems -------------
void criterion2() {
  const double t0 = now_s();
  std::mt19937_64 rng(12345);
  std::uniform_int_distribution<int> pick_n(1, 4);
  bool ok = true;
  double worst_rel = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = pick_n(rng);
    LtiStateSpace sys = testsys::random_stable_lti(rng, n, 2, 2);
    // At 10 time constants the finite-horizon gain still sits ~4% under the
    // stationary norm (truncation decays algebraically, not exponentially);
    // 30 time constants brings the gap well under the 2% tolerance.
    const double T = 30.0 / std::abs(testsys::spectral_abscissa(sys.A));
    TimeGrid grid = TimeGrid::uniform(0.0, T, T / 8.0);
    ExtendedSystem ext = build_extended_nominal(
        lift_lti(sys, grid).withChannels({{"d", {0, 2}}}, {{"e", {0, 2}}}));
    BisectionConfig bc;
    bc.metric = GainMetric::L2ToL2;
    bc.t_start = 0.0;
    bc.T = T;
    bc.eps_bs = 1e-5;
    GainResult g = nominal_gamma(ext, bc);
    const double ref = testsys::hinf_oracle(sys);
    const double rel = std::abs(g.gamma - ref) / ref;
    worst_rel = std::max(worst_rel, rel);
    ok = ok && g.feasible() && rel < 0.02;
  }
  const double dt = now_s() - t0;
  report(2, ok && dt < 30.0, fmt("5 systems, worst rel err=%.4f wall=%.1fs", worst_rel, dt));
}

// ---- 3: escape / solve brackets the true gain -----------------------------
void criterion3() {
  bool ok = true;
  std::string detail;
  for (double T : {1.0, 2.0, 5.0}) {
    ExtendedSystem ext = build_extended_nominal(testsys::scalar_lag(T));
    const double g = testsys::scalar_lag_gain(T);
    RdeProblem lo;
    lo.ext = &ext;
    lo.M = kEmptyM;
    lo.gamma = 0.98 * g;
    lo.t_start = 0.0;
    lo.T = T;
    RdeProblem hi = lo;
    hi.gamma = 1.02 * g;
    const bool esc = integrate_rde(lo).kind == RdeOutcome::Kind::Escaped;
    const bool sol = integrate_rde(hi).kind == RdeOutcome::Kind::Solved;
    ok = ok && esc && sol;
    detail += fmt("T=%g:%s%s ", T, esc ? "E" : "!", sol ? "S" : "!");
  }
  report(3, ok, detail);
}

// ---- 4: packed storage against a full-matrix reference --------------------
void criterion4() {
  // Scalar lag: the packed integration must match a fixed-step reference on
  // the unpacked equation to 1e-6 in P(0).
  const double T = 2.0, gamma = 1.0;
  double P = 1.0 / gamma;
  const double dt = 1e-5;
  auto f = [&](double p) { return -(2.0 * p - p * p / gamma); };
  for (long i = 0; i < std::lround(T / dt); ++i) {
    const double k1 = f(P), k2 = f(P + 0.5 * dt * k1), k3 = f(P + 0.5 * dt * k2),
                 k4 = f(P + dt * k3);
    P += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  ExtendedSystem ext = build_extended_nominal(testsys::scalar_lag(T));
  RdeProblem pr;
  pr.ext = &ext;
  pr.M = kEmptyM;
  pr.gamma = gamma;
  pr.t_start = 0.0;
  pr.T = T;
  RdeOutcome out = integrate_rde(pr);
  const double err = out.solved() ? std::abs(out.P_start(0, 0) - P) : 1.0;

  // Packed length n(n+1)/2 and an exact pack/unpack round trip.
  MatrixXd S(3, 3);
  S << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  VectorXd v = pack_symmetric(S);
  const bool len_ok = v.size() == 6;
  const bool rt_ok = (unpack_symmetric(v, 3) - S).cwiseAbs().maxCoeff() == 0.0;
  report(4, out.solved() && err < 1e-6 && len_ok && rt_ok,
         fmt("|P(0) - ref|=%.2e packed len %s round trip %s", err,
             len_ok ? "ok" : "bad", rt_ok ? "ok" : "bad"));
}

// ---- 5: IQC sandwich on the scalar parametric family ----------------------
void criterion5() {
  const double t0 = now_s();
  const double T = 10.0, b = 0.5;
  TimeVaryingStateSpace plant = testsys::scalar_parametric(T);
  IqcStack stack(
      {build_iqc_block({UncertaintyKind::RealRepeated, 1, b, {1, -1.0}, "delta"})});

  OptimizerConfig cfg;  // default population / iteration counts
  cfg.seed = 1;
  cfg.s_min = VectorXd::Constant(stack.nVars(), -2.0);
  cfg.s_max = VectorXd::Constant(stack.nVars(), 2.0);
  cfg.bisection.gamma_lb = 1e-3;
  cfg.bisection.gamma_ub = 100.0;
  cfg.bisection.eps_bs = 1e-5;
  cfg.bisection.t_start = 0.0;
  cfg.bisection.T = T;
  OptimizerResult res = optimize(cfg, plant, stack);

  const double sampled = testsys::sampled_worst_gain(b, T, GainMetric::L2ToEuclidean);
  const double dt = now_s() - t0;
  const bool ok = res.gamma_best >= sampled * (1.0 - 1e-6) &&
                  res.gamma_best <= 1.3 * sampled && dt < 300.0;
  report(5, ok, fmt("bound=%.6f sampled=%.6f ratio=%.4f wall=%.1fs", res.gamma_best,
                    sampled, res.gamma_best / sampled, dt));
}

// ---- 6: launcher multiplier stack size ------------------------------------
void criterion6() {
  IqcStack stack = make_launcher_stack();
  report(6, stack.nVars() == 23 && stack.vWidth() == 4,
         fmt("decision variables=%d channels=%d", int(stack.nVars()),
             int(stack.vWidth())));
}

// ---- 7: optimizer invariants ----------------------------------------------
void criterion7() {
  const double T = 10.0, b = 0.5;
  TimeVaryingStateSpace plant = testsys::scalar_parametric(T);
  IqcStack stack(
      {build_iqc_block({UncertaintyKind::RealRepeated, 1, b, {1, -1.0}, "delta"})});
  OptimizerConfig cfg;
  cfg.n_p_max = 12;
  cfg.n_p_min = 4;
  cfg.i_max = 8;
  cfg.seed = 5;
  cfg.s_min = VectorXd::Constant(stack.nVars(), -2.0);
  cfg.s_max = VectorXd::Constant(stack.nVars(), 2.0);
  cfg.bisection.gamma_lb = 1e-3;
  cfg.bisection.gamma_ub = 100.0;
  cfg.bisection.eps_bs = 1e-4;
  cfg.bisection.t_start = 0.0;
  cfg.bisection.T = T;

  OptimizerResult a = optimize(cfg, plant, stack);
  OptimizerResult c = optimize(cfg, plant, stack);

  bool monotone = true;
  for (std::size_t k = 1; k < a.gamma_trajectory.size(); ++k)
    monotone = monotone && a.gamma_trajectory[k] <= a.gamma_trajectory[k - 1];

  const bool schedule_ok = population_schedule(cfg, 0) == cfg.n_p_max &&
                           population_schedule(cfg, cfg.i_max) == cfg.n_p_min;

  bool deterministic = a.gamma_best == c.gamma_best &&
                       a.rde_evaluations == c.rde_evaluations &&
                       a.gamma_trajectory.size() == c.gamma_trajectory.size() &&
                       (a.values_best - c.values_best).cwiseAbs().maxCoeff() == 0.0;
  for (std::size_t k = 0; deterministic && k < a.gamma_trajectory.size(); ++k)
    deterministic = a.gamma_trajectory[k] == c.gamma_trajectory[k];

  // An infeasible multiplier may not cost any integrations: pin the search
  // space to an indefinite X (off-diagonal far above the diagonal) so every
  // candidate is rejected by the Cholesky test before any RDE work.
  IqcStack pinned(
      {build_iqc_block({UncertaintyKind::RealRepeated, 1, b, {1, -1.0}, "d2"})});
  OptimizerConfig bad = cfg;
  bad.s_min = VectorXd::Constant(pinned.nVars(), 0.0);
  bad.s_max = VectorXd::Constant(pinned.nVars(), 0.0);
  const auto fixed = pinned.signFixed();
  for (Eigen::Index i = 0; i < pinned.nVars(); ++i)
    if (!fixed[std::size_t(i)]) {
      bad.s_min(i) = 3.0;  // off-diagonal 1000 vs diagonal 1: X indefinite
      bad.s_max(i) = 3.0;
    }
  bad.min_valid_fraction = 0.0;
  bad.i_max = 2;
  OptimizerResult inf = optimize(bad, plant, pinned);
  const bool infeasible_free =
      inf.gamma_best >= kInfeasibleGamma && inf.rde_evaluations == 0;

  report(7, monotone && schedule_ok && deterministic && infeasible_free,
         fmt("monotone=%d schedule=%d deterministic=%d infeasible_cost0=%d (evals=%ld)",
             int(monotone), int(schedule_ok), int(deterministic), int(infeasible_free),
             inf.rde_evaluations));
}

// ---- 8: Dryden filter DC gain and poles -----------------------------------
void criterion8() {
  const double kPi = 3.14159265358979323846;
  const double V = 180.0, L = 250.0, sigma = 3.5;
  LtiStateSpace f = dryden_filter(V, L, sigma);
  const double dc = f.transfer({0.0, 0.0})(0, 0).real();
  const double dc_ref = sigma * std::sqrt(L / (kPi * V));
  // A defective double eigenvalue is O(sqrt(eps))-sensitive in an
  // eigensolver, so pin the pole through the characteristic polynomial:
  // trace = -2 V/L and det = (V/L)^2 force (s + V/L)^2 exactly.
  const double a = V / L;
  const double pole_err = std::max(std::abs(f.A.trace() + 2.0 * a),
                                   std::abs(f.A.determinant() - a * a));
  report(8, std::abs(dc - dc_ref) < 1e-9 && pole_err < 1e-9,
         fmt("|dc err|=%.2e |pole err|=%.2e", std::abs(dc - dc_ref), pole_err));
}

// ---- 9 and 10: launcher study at desk scale -------------------------------
void criteria9_10() {
  const double t0 = now_s();
  AnalysisConfig cfg;
  cfg.seed = 1;
  cfg.wind_profiles = 100;
  cfg.wind_segments = 14;
  // Desk-scale optimizer settings: the acceptance budget covers the full
  // 14-point grid with reduced populations; any solved bound is valid.
  cfg.n_p_max_first = 14;
  cfg.n_p_max_warm = 8;
  cfg.i_max_first = 6;
  cfg.i_max_warm = 3;
  cfg.eps_bs = 1e-3;
  cfg.exp_min = -3.0;
  cfg.exp_max = 3.0;

  LauncherParams params = toy_dataset();
  TrajectoryRef traj = gravity_turn(params);
  auto profiles = generate_wind_profiles(params, traj, cfg.wind_profiles,
                                         cfg.horizon_start, cfg.t_grid_end, 100.0,
                                         cfg.seed);
  WindFilterLtv wind = fit_wind_filter_ltv(profiles, cfg.horizon_start, cfg.t_grid_end,
                                           100.0, cfg.wind_segments);

  // ---- 10: the fitted magnitude upper-bounds the envelope everywhere ----
  bool fit_ok = wind.segments.size() == std::size_t(cfg.wind_segments);
  for (const auto& seg : wind.segments)
    for (std::size_t k = 0; k < seg.envelope.size(); ++k)
      fit_ok = fit_ok && seg.fit_mag[k] >= seg.envelope[k] * (1.0 - 1e-12);

  // ---- 9: sampled envelope below the certified bound, gains ordered ----
  InterconnectionOptions io;
  io.t_start = cfg.horizon_start;
  io.t_end = cfg.t_grid_end;
  TimeVaryingStateSpace unc = build_analysis_interconnection(params, traj, wind, io);
  InterconnectionOptions nio = io;
  nio.with_uncertainty = false;
  TimeVaryingStateSpace nom = build_analysis_interconnection(params, traj, wind, nio);
  UncertaintySample corner;
  corner.d_lcg = -0.1;
  corner.d_lga = 0.2;
  corner.d_gain = -0.1;
  corner.d_damp = -0.1;
  corner.d_freq = -0.1;
  InterconnectionOptions fio = io;
  fio.fixed = &corner;
  TimeVaryingStateSpace fixed = build_analysis_interconnection(params, traj, wind, fio);

  AnalysisResult wc = analyze_sweep(cfg, unc, make_launcher_stack());
  AnalysisResult nm = nominal_sweep(cfg, nom);
  AnalysisResult fx = nominal_sweep(cfg, fixed);

  MonteCarloConfig mc;
  mc.n_seeds = cfg.mc_seeds;
  mc.seed0 = cfg.seed;
  mc.t0 = cfg.horizon_start;
  mc.tf = cfg.t_grid_end;
  for (double T = cfg.t_grid_start; T <= cfg.t_grid_end + 1e-9; T += cfg.t_grid_step)
    mc.report_times.push_back(T);
  MonteCarloResult sampled = monte_carlo(params, traj, uncertainty_grid27(), mc);

  bool order_ok = wc.rows.size() == nm.rows.size() && wc.rows.size() == fx.rows.size() &&
                  wc.rows.size() == sampled.report_times.size() && !wc.rows.empty();
  double worst_margin = 1e300;
  for (std::size_t k = 0; order_ok && k < wc.rows.size(); ++k) {
    const double g_wc = wc.rows[k].gamma_wc, g_nom = nm.rows[k].gamma_nom,
                 g_fx = fx.rows[k].gamma_nom, g_mc = sampled.envelope_gain[k];
    // Sampled members never exceed the certificate; the nominal member
    // never exceeds the perturbed one, which the bound covers in turn.
    order_ok = g_mc <= g_wc && g_nom <= g_fx * (1.0 + 1e-9) &&
               g_fx <= g_wc * (1.0 + 1e-9) && g_nom <= g_wc * (1.0 + 1e-9);
    worst_margin = std::min(worst_margin, g_wc / std::max(g_mc, 1e-300));
  }
  const double dt = now_s() - t0;
  report(9, order_ok && dt < 7200.0,
         fmt("%zu grid points, min bound/envelope=%.3g wall=%.0fs", wc.rows.size(),
             worst_margin, dt));
  report(10, fit_ok, fmt("%zu segments enveloped", wind.segments.size()));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criteria9_10();
  std::printf("%s (%d failure%s)\n", failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
              failures, failures == 1 ? "" : "s");
  return failures == 0 ? 0 : 1;
}

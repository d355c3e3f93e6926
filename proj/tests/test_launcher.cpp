#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/KroneckerProduct>

#include "ltvwc/launcher/atmosphere.hpp"
#include "ltvwc/launcher/interconnection.hpp"
#include "ltvwc/launcher/linearize.hpp"
#include "ltvwc/launcher/monte_carlo.hpp"
#include "test_systems.hpp"

using namespace ltvwc;
using namespace ltvwc::launcher;

namespace {

constexpr double kPi = 3.14159265358979323846;

const LauncherParams& params() {
  static LauncherParams p = toy_dataset();
  return p;
}

const TrajectoryRef& traj() {
  static TrajectoryRef t = gravity_turn(params());
  return t;
}

}  // namespace

TEST_CASE("standard atmosphere and gravity") {
  CHECK(isa_temperature(0.0) == doctest::Approx(288.15));
  CHECK(isa_pressure(0.0) == doctest::Approx(101325.0));
  CHECK(isa_density(0.0) == doctest::Approx(1.225).epsilon(1e-3));
  CHECK(speed_of_sound(0.0) == doctest::Approx(340.3).epsilon(1e-3));
  // Tropopause values.
  CHECK(isa_temperature(11000.0) == doctest::Approx(216.65).epsilon(1e-3));
  CHECK(isa_temperature(15000.0) == doctest::Approx(216.65).epsilon(1e-3));

  double prev_p = isa_pressure(0.0), prev_rho = isa_density(0.0), prev_g = gravity(0.0);
  for (double h = 1000.0; h <= 30000.0; h += 1000.0) {
    CHECK(isa_pressure(h) < prev_p);
    CHECK(isa_density(h) < prev_rho);
    CHECK(gravity(h) < prev_g);
    prev_p = isa_pressure(h);
    prev_rho = isa_density(h);
    prev_g = gravity(h);
  }
  CHECK(gravity(0.0) == doctest::Approx(9.81).epsilon(0.01));
}

TEST_CASE("lookup tables clamp outside the support") {
  Table1D tab({0.0, 1.0, 2.0}, {10.0, 20.0, 40.0});
  CHECK(tab.eval(0.5) == doctest::Approx(15.0));
  CHECK(tab.eval(-1.0) == doctest::Approx(10.0));
  CHECK(tab.eval(5.0) == doctest::Approx(40.0));
}

TEST_CASE("dataset JSON round trip") {
  const auto dir = std::string("/tmp/ltvwc_dataset_rt.json");
  save_dataset(params(), dir);
  LauncherParams back = load_dataset(dir);
  CHECK(back.s_ref == doctest::Approx(params().s_ref));
  CHECK(back.qalpha_lim == doctest::Approx(params().qalpha_lim));
  CHECK(back.mass.eval(40.0) == doctest::Approx(params().mass.eval(40.0)));
  CHECK(back.c_n_alpha.eval(1.5) == doctest::Approx(params().c_n_alpha.eval(1.5)));
  CHECK(back.gains.kp == doctest::Approx(params().gains.kp));
}

TEST_CASE("Dryden filter structure") {
  const double V = 220.0, L = 300.0, sigma = 5.0;
  LtiStateSpace f = dryden_filter(V, L, sigma);

  // DC gain sigma * sqrt(L / (pi V)), double pole at -V/L, both to 1e-9.
  Eigen::MatrixXcd H0 = f.transfer({0.0, 0.0});
  CHECK(std::abs(H0(0, 0).real() - sigma * std::sqrt(L / (kPi * V))) < 1e-9);
  // A defective double eigenvalue is O(sqrt(eps))-sensitive in an
  // eigensolver; the characteristic polynomial pins it exactly:
  // trace = -2 V/L and det = (V/L)^2 force (s + V/L)^2.
  CHECK(std::abs(f.A.trace() + 2.0 * V / L) < 1e-9);
  CHECK(std::abs(f.A.determinant() - (V / L) * (V / L)) < 1e-9);

  // sigma = 0 silences the filter.
  LtiStateSpace z = dryden_filter(V, L, 0.0);
  CHECK(z.C.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK_THROWS(dryden_filter(0.0, L, sigma));
}

TEST_CASE("Dryden output variance matches the Lyapunov solution") {
  // Sample-and-hold white noise of variance pi/dt approximates intensity
  // pi; the stationary covariance then solves A X + X A' + pi B B' = 0.
  const double V = 200.0, L = 200.0, sigma = 4.0;
  LtiStateSpace f = dryden_filter(V, L, sigma);

  MatrixXd A = f.A, Q = kPi * f.B * f.B.transpose();
  MatrixXd K = Eigen::kroneckerProduct(MatrixXd::Identity(2, 2), A) +
               Eigen::kroneckerProduct(A, MatrixXd::Identity(2, 2));
  VectorXd q(4);
  q << Q(0, 0), Q(1, 0), Q(0, 1), Q(1, 1);
  VectorXd xv = K.fullPivLu().solve(-q);
  MatrixXd X(2, 2);
  X << xv(0), xv(2), xv(1), xv(3);
  const double var_analytic = (f.C * X * f.C.transpose())(0, 0);

  const double dt = 0.01, T = 4000.0;
  TimeGrid grid = TimeGrid::uniform(0.0, T, T);
  TimeVaryingStateSpace sys = lift_lti(f, grid);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss(0.0, std::sqrt(kPi / dt));
  std::vector<double> ts;
  std::vector<VectorXd> u;
  for (double t = 0.0; t <= T + 1e-9; t += dt) {
    ts.push_back(t);
    u.push_back(VectorXd::Constant(1, gauss(rng)));
  }
  auto y = simulate(sys, ts, u, VectorXd::Zero(2));
  double var = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (ts[k] < 20.0) continue;  // discard the transient
    var += y[k](0) * y[k](0);
    ++n;
  }
  var /= double(n);
  CHECK(var == doctest::Approx(var_analytic).epsilon(0.10));
}

TEST_CASE("gravity turn meets the boundary targets") {
  const auto& p = params();
  const auto& tr = traj();
  CHECK(tr.t.front() == doctest::Approx(0.0));
  CHECK(tr.t.back() == doctest::Approx(p.turn_t_end));
  CHECK(std::abs(tr.h_at(p.turn_t_end) - p.turn_target_h) <
        0.005 * std::abs(p.turn_target_h));
  CHECK(std::abs(tr.theta_at(p.turn_t_end) - p.turn_target_theta) <
        0.005 * std::abs(p.turn_target_theta));

  // Altitude and speed climb monotonically; pitch tips over from vertical.
  for (double t = 10.0; t <= p.turn_t_end; t += 10.0) {
    CHECK(tr.h_at(t) > tr.h_at(t - 10.0));
    CHECK(tr.xdot_at(t) > tr.xdot_at(t - 10.0));
    CHECK(tr.theta_at(t) < tr.theta_at(t - 10.0));
  }
  CHECK(tr.theta_at(0.0) > 1.4);  // near vertical at lift-off
  CHECK(tr.theta_dot_at(50.0) < 0.0);
  CHECK(tr.dyn_pressure_at(50.0) > 0.0);
  CHECK(tr.mach_at(60.0) > 1.0);  // supersonic within the analysis window
}

TEST_CASE("closed-loop simulation tracks without disturbance") {
  SimOptions opts;
  opts.t0 = 25.0;
  opts.tf = 95.0;
  opts.noise_scale = 0.0;
  SimResult r = simulate_nonlinear(params(), traj(), UncertaintySample{}, opts);
  CHECK_FALSE(r.unstable);
  double worst = 0.0;
  for (double d : r.dtheta) worst = std::max(worst, std::abs(d));
  CHECK(worst < 0.01 * kPi / 180.0);
  // Only the small trim incidence of the turn itself loads the vehicle.
  CHECK(r.peak_qalpha < 1e-3 * params().qalpha_lim);

  // Same seed reproduces the run exactly; turbulence produces load.
  SimOptions noisy = opts;
  noisy.noise_scale = 1.0;
  noisy.seed = 5;
  SimResult a = simulate_nonlinear(params(), traj(), UncertaintySample{}, noisy);
  SimResult b = simulate_nonlinear(params(), traj(), UncertaintySample{}, noisy);
  CHECK(a.peak_qalpha == b.peak_qalpha);
  CHECK(a.peak_qalpha > 0.0);
  CHECK_FALSE(a.unstable);
  CHECK(a.noise_energy_at(95.0) > 0.0);

  // The open loop is aerodynamically unstable: without control the
  // turbulence-excited attitude diverges.
  SimOptions open = noisy;
  open.control_enabled = false;
  open.tf = 60.0;
  SimResult d = simulate_nonlinear(params(), traj(), UncertaintySample{}, open);
  double worst_open = 0.0;
  for (double v : d.dtheta) worst_open = std::max(worst_open, std::abs(v));
  CHECK((d.unstable || worst_open > 0.5));
}

TEST_CASE("linearization exposes the unstable aero pole") {
  TimeVaryingStateSpace lin = linearize(params(), traj(), 30.0, 60.0, 0.5);
  CHECK(lin.nx() == 3);
  CHECK(lin.nin() == 2);
  CHECK(lin.nout() == 2);
  // Open-loop pitch dynamics are statically unstable around max-q.
  CHECK(testsys::spectral_abscissa(lin.A().eval(40.0)) > 0.0);

  // Doubling the normal-force slope doubles the moment-from-zdot element of
  // A; the load output q_bar * alpha carries no force coefficient and stays.
  LauncherParams doubled = params();
  std::vector<double> ys = doubled.c_n_alpha.ys();
  for (double& v : ys) v *= 2.0;
  doubled.c_n_alpha = Table1D(doubled.c_n_alpha.xs(), ys);
  TimeVaryingStateSpace lin2 = linearize(doubled, traj(), 30.0, 60.0, 0.5);
  const double a_ratio = lin2.A().eval(40.0)(1, 2) / lin.A().eval(40.0)(1, 2);
  const double c_ratio = lin2.C().eval(40.0)(1, 2) / lin.C().eval(40.0)(1, 2);
  CHECK(a_ratio == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(c_ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("wind-filter fit upper-bounds the spectrum envelope") {
  // Synthetic profiles from a known first-order filter.
  const double g_true = 2.0, p_true = 3.0, fs = 100.0, dt = 1.0 / fs;
  std::mt19937_64 rng(41);
  std::normal_distribution<double> gauss(0.0, std::sqrt(kPi / dt));
  std::vector<std::vector<double>> profiles(40);
  for (auto& pr : profiles) {
    pr.resize(std::size_t(std::lround(100.0 * fs)) + 1);
    double x = 0.0;
    for (auto& v : pr) {
      v = g_true * x;
      const double n = gauss(rng);
      // Exact discretization of xdot = -p x + p n over one held sample.
      const double e = std::exp(-p_true * dt);
      x = e * x + (1.0 - e) * n;
    }
  }
  WindFilterLtv w = fit_wind_filter_ltv(profiles, 0.0, 100.0, fs, 4);
  REQUIRE(w.segments.size() == 4);
  for (const auto& seg : w.segments) {
    CHECK(seg.gain > 0.0);
    CHECK(seg.pole > 0.0);
    // The identified pole sits near the generating one.
    CHECK(seg.pole > p_true / 3.0);
    CHECK(seg.pole < p_true * 3.0);
    // Upper-bounding at every bin is an invariant of the fit.
    REQUIRE(seg.fit_mag.size() == seg.envelope.size());
    for (std::size_t k = 0; k < seg.envelope.size(); ++k)
      CHECK(seg.fit_mag[k] >= seg.envelope[k] * (1.0 - 1e-12));
  }
  // The LTV realization reproduces the per-segment filters at the midpoints.
  const auto& seg0 = w.segments.front();
  CHECK(w.sys.A().eval(seg0.t_mid)(0, 0) == doctest::Approx(-seg0.pole));
  CHECK(w.sys.C().eval(seg0.t_mid)(0, 0) == doctest::Approx(seg0.gain));

  // Degenerate inputs.
  std::vector<std::vector<double>> zeros(3, std::vector<double>(2000, 0.0));
  WindFilterLtv wz = fit_wind_filter_ltv(zeros, 0.0, 20.0, fs, 2);
  for (const auto& seg : wz.segments) CHECK(seg.gain == doctest::Approx(0.0));
  CHECK_THROWS(fit_wind_filter_ltv({}, 0.0, 20.0, fs, 2));
}

TEST_CASE("disturbance truncation zeroes the tail") {
  std::vector<double> t{0.0, 1.0, 2.0, 3.0}, d{1.0, 2.0, 3.0, 4.0};
  auto out = truncate_disturbance(d, t, 1.5);
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(2.0));
  CHECK(out[2] == doctest::Approx(0.0));
  CHECK(out[3] == doctest::Approx(0.0));
  CHECK_THROWS(truncate_disturbance(d, {0.0, 1.0}, 1.0));
}

TEST_CASE("launcher multiplier stack layout") {
  IqcStack stack = make_launcher_stack();
  REQUIRE(stack.blocks().size() == 3);
  CHECK(stack.blocks()[0].decl.kind == UncertaintyKind::DynamicLti);
  CHECK(stack.blocks()[0].decl.n_v == 1);
  CHECK(stack.blocks()[0].decl.bound == doctest::Approx(1.0));
  CHECK(stack.blocks()[1].decl.kind == UncertaintyKind::RealRepeated);
  CHECK(stack.blocks()[1].decl.n_v == 2);
  CHECK(stack.blocks()[1].decl.bound == doctest::Approx(0.2));
  CHECK(stack.blocks()[2].decl.n_v == 1);
  CHECK(stack.blocks()[2].decl.bound == doctest::Approx(0.1));
  CHECK(stack.vWidth() == 4);
  CHECK(stack.nVars() == 23);  // 3 + 16 + 4 decision variables
}

TEST_CASE("analysis interconnection wiring") {
  const auto wind_profiles =
      generate_wind_profiles(params(), traj(), 10, 25.0, 45.0, 100.0, 3);
  WindFilterLtv wind = fit_wind_filter_ltv(wind_profiles, 25.0, 45.0, 100.0, 4);

  InterconnectionOptions opts;
  opts.t_start = 30.0;
  opts.t_end = 40.0;

  TimeVaryingStateSpace unc = build_analysis_interconnection(params(), traj(), wind, opts);
  CHECK(unc.inChannel("w").width == 4);
  CHECK(unc.inChannel("d").width == 1);
  CHECK(unc.outChannel("v").width == 4);
  CHECK(unc.outChannel("e").width == 1);

  InterconnectionOptions nom_opts = opts;
  nom_opts.with_uncertainty = false;
  TimeVaryingStateSpace nom =
      build_analysis_interconnection(params(), traj(), wind, nom_opts);
  CHECK(nom.inChannel("d").width == 1);
  CHECK(nom.outChannel("e").width == 1);
  CHECK_THROWS(nom.inChannel("w"));
  CHECK(nom.nx() < unc.nx());  // no TVC weighting filter states

  // The tracking loop stabilizes the frozen closed-loop dynamics even
  // though the open-loop airframe is unstable.
  for (double t : {30.0, 33.0, 36.0, 39.0})
    CHECK(testsys::spectral_abscissa(nom.A().eval(t)) < 0.0);

  // Fixed-perturbation variant: closed channels, extra dead-time states.
  UncertaintySample s;
  s.d_lga = 0.2;
  s.d_gain = 0.1;
  s.delay = 0.005;
  InterconnectionOptions fixed_opts = opts;
  fixed_opts.fixed = &s;
  TimeVaryingStateSpace fixed =
      build_analysis_interconnection(params(), traj(), wind, fixed_opts);
  CHECK(fixed.inChannel("d").width == 1);
  CHECK_THROWS(fixed.inChannel("w"));
  CHECK(fixed.nx() > nom.nx());
}

TEST_CASE("uncertainty grid and Monte Carlo bookkeeping") {
  auto grid = uncertainty_grid27();
  CHECK(grid.size() == 27);
  bool has_nominal = false;
  for (const auto& s : grid) {
    CHECK(std::abs(s.d_lcg) <= 0.1 + 1e-12);
    CHECK(std::abs(s.d_lga) <= 0.2 + 1e-12);
    CHECK(std::abs(s.d_gain) <= 0.1 + 1e-12);
    CHECK(std::abs(s.d_damp) <= 0.1 + 1e-12);
    CHECK(std::abs(s.d_freq) <= 0.1 + 1e-12);
    CHECK((s.delay == doctest::Approx(0.005) || s.delay == doctest::Approx(0.01)));
    if (s.d_lcg == 0.0 && s.d_lga == 0.0 && s.d_gain == 0.0 && s.d_damp == 0.0 &&
        s.d_freq == 0.0)
      has_nominal = true;
  }
  CHECK(has_nominal);

  MonteCarloConfig cfg;
  cfg.n_seeds = 2;
  cfg.t0 = 25.0;
  cfg.tf = 40.0;
  cfg.report_times = {35.0, 40.0};
  std::vector<UncertaintySample> samples{UncertaintySample{}};
  MonteCarloResult r = monte_carlo(params(), traj(), samples, cfg);
  CHECK(r.runs.size() == 2);
  REQUIRE(r.envelope_gain.size() == 2);
  CHECK(r.envelope_gain[0] > 0.0);
  CHECK(r.envelope_ratio[0] > 0.0);
  CHECK(r.peak_ratio_max > 0.0);
  CHECK(r.peak_ratio_max < 1.0);  // the toy vehicle flies well inside the limit

  MonteCarloResult r2 = monte_carlo(params(), traj(), samples, cfg);
  CHECK(r2.envelope_gain[0] == r.envelope_gain[0]);
  CHECK(r2.peak_ratio_max == r.peak_ratio_max);
}

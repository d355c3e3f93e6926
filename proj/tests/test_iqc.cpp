#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "ltvwc/iqc.hpp"
#include "test_systems.hpp"

using namespace ltvwc;

TEST_CASE("basis filter realizes the all-pass cascade") {
  // nu = 0: static identity.
  LtiStateSpace psi0 = build_basis_filter({0, -1.0}, 1);
  CHECK(psi0.nx() == 0);
  CHECK(psi0.D(0, 0) == doctest::Approx(1.0));

  // nu = 1, rho = -1: outputs [1; (s-1)/(s+1)], DC gains [1, -1].
  LtiStateSpace psi1 = build_basis_filter({1, -1.0}, 1);
  CHECK(psi1.nout() == 2);
  Eigen::MatrixXcd H0 = psi1.transfer({0.0, 0.0});
  CHECK(std::abs(H0(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(H0(1, 0) + 1.0) < 1e-12);

  // All-pass property at 20 log-spaced frequencies, tolerance 1e-10.
  for (int k = 0; k < 20; ++k) {
    const double w = 1e-3 * std::pow(1e6, double(k) / 19.0);
    Eigen::MatrixXcd H = psi1.transfer({0.0, w});
    CHECK(std::abs(std::abs(H(1, 0)) - 1.0) < 1e-10);
  }

  // Width n: psi_nu tensor I_n, tap-major output blocks.
  LtiStateSpace psi2 = build_basis_filter({1, -2.0}, 3);
  CHECK(psi2.nin() == 3);
  CHECK(psi2.nout() == 6);
  CHECK(testsys::spectral_abscissa(psi2.A) == doctest::Approx(-2.0));
}

TEST_CASE("block variable counts match the multiplier parameterizations") {
  IqcBlock real2 = build_iqc_block({UncertaintyKind::RealRepeated, 2, 0.2, {1, -1.0}, "a"});
  CHECK(real2.tmpl.x_size == 4);
  CHECK(real2.tmpl.n_vars == 16);  // X: 10 free, Y: 6 free

  IqcBlock real1 = build_iqc_block({UncertaintyKind::RealRepeated, 1, 0.1, {1, -1.0}, "b"});
  CHECK(real1.tmpl.n_vars == 4);  // X: 3, Y: 1

  IqcBlock dyn1 = build_iqc_block({UncertaintyKind::DynamicLti, 1, 1.0, {1, -1.0}, "c"});
  CHECK(dyn1.tmpl.x_size == 2);
  CHECK(dyn1.tmpl.n_vars == 3);

  // Psi is two copies of the width-n_v basis filter.
  CHECK(real2.psi.nin() == 4);
  CHECK(real2.psi.nout() == 8);
}

TEST_CASE("multiplier decode matches the block formula") {
  IqcBlock dyn = build_iqc_block({UncertaintyKind::DynamicLti, 1, 1.0, {0, -1.0}, "d"});
  // nu = 0 dynamic block: X is 1x1, M = [[b^2 X, 0], [0, -X]].
  VectorXd v(1);
  v << 2.0;
  MatrixXd M = dyn.tmpl.decode(v, 1.0);
  CHECK(M(0, 0) == doctest::Approx(2.0));
  CHECK(M(1, 1) == doctest::Approx(-2.0));
  CHECK(M(0, 1) == doctest::Approx(0.0));

  // Real block, n_v = 2, nu = 0, b = 0.5, X = I, Y = 0.
  IqcBlock real2 = build_iqc_block({UncertaintyKind::RealRepeated, 2, 0.5, {0, -1.0}, "r"});
  CHECK(real2.tmpl.n_vars == 4);  // X: 3, Y: 1
  VectorXd vals = VectorXd::Zero(4);
  // Identify diagonal slots through the sign-fixed flags.
  int set = 0;
  for (Eigen::Index i = 0; i < 4; ++i)
    if (real2.tmpl.sign_fixed[std::size_t(i)]) {
      vals(i) = 1.0;
      ++set;
    }
  CHECK(set == 2);
  MatrixXd Mr = real2.tmpl.decode(vals, 1.0);
  CHECK((Mr.topLeftCorner(2, 2) - 0.25 * MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK((Mr.bottomRightCorner(2, 2) + MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK(Mr.topRightCorner(2, 2).cwiseAbs().maxCoeff() < 1e-14);

  // Symmetry by construction for arbitrary values.
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  IqcBlock rb = build_iqc_block({UncertaintyKind::RealRepeated, 2, 0.3, {1, -2.0}, "s"});
  VectorXd rv(rb.tmpl.n_vars);
  for (Eigen::Index i = 0; i < rv.size(); ++i) rv(i) = g(rng);
  MatrixXd Ms = rb.tmpl.decode(rv, 0.7);
  CHECK((Ms - Ms.transpose()).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("feasibility is X > 0") {
  IqcBlock b = build_iqc_block({UncertaintyKind::RealRepeated, 2, 0.5, {0, -1.0}, "f"});
  VectorXd vals = VectorXd::Zero(4);
  std::vector<Eigen::Index> diag, off;
  for (Eigen::Index i = 0; i < 4; ++i)
    (b.tmpl.sign_fixed[std::size_t(i)] ? diag : off).push_back(i);

  vals(diag[0]) = 1.0;
  vals(diag[1]) = 1.0;
  CHECK(b.tmpl.feasible(vals));            // X = I
  vals(diag[1]) = 0.0;
  CHECK_FALSE(b.tmpl.feasible(vals));      // singular X
  vals(diag[0]) = 1.0;
  vals(diag[1]) = 1.0;
  vals(off[0]) = 2.0;                      // X = [[1,2],[2,1]], eigs 3 and -1
  CHECK_FALSE(b.tmpl.feasible(vals));
}

TEST_CASE("stacking combines blocks diagonally") {
  IqcBlock b1 = build_iqc_block({UncertaintyKind::RealRepeated, 1, 0.5, {1, -1.0}, "a"});
  IqcBlock b2 = build_iqc_block({UncertaintyKind::DynamicLti, 1, 1.0, {1, -1.0}, "b"});

  IqcStack single({b1});
  CHECK(single.vWidth() == 1);
  CHECK(single.zWidth() == b1.psi.nout());
  CHECK(single.nVars() == b1.tmpl.n_vars);

  IqcStack two({b1, b2});
  CHECK(two.vWidth() == 2);
  CHECK(two.nVars() == b1.tmpl.n_vars + b2.tmpl.n_vars);

  // z' M z equals the sum of the per-block quadratic forms.
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXd vals(two.nVars());
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = g(rng);
  MatrixXd M = two.decode(vals);
  MatrixXd M1 = b1.tmpl.decode(vals.head(b1.tmpl.n_vars), 1.0);
  MatrixXd M2 = b2.tmpl.decode(vals.tail(b2.tmpl.n_vars), 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd z(two.zWidth());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = g(rng);
    VectorXd z1 = z.head(M1.rows()), z2 = z.tail(M2.rows());
    CHECK(z.dot(M * z) ==
          doctest::Approx(z1.dot(M1 * z1) + z2.dot(M2 * z2)).epsilon(1e-10));
  }
}

TEST_CASE("rescaling touches only the b^2 X sub-block") {
  IqcBlock b = build_iqc_block({UncertaintyKind::RealRepeated, 1, 1.0, {1, -1.0}, "r"});
  IqcStack stack({b});
  CHECK(stack.boundScale() == doctest::Approx(1.0));

  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXd vals(stack.nVars());
  for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = g(rng);
  const auto fixed = stack.signFixed();
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (fixed[std::size_t(i)]) vals(i) = std::abs(vals(i)) + 0.5;

  IqcStack scaled = stack.rescaled(0.3);
  CHECK(scaled.boundScale() == doctest::Approx(0.3));
  MatrixXd M1 = stack.decode(vals), M03 = scaled.decode(vals);
  const Eigen::Index h = M1.rows() / 2;
  CHECK((M03.topLeftCorner(h, h) - 0.09 * M1.topLeftCorner(h, h)).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK((M03.bottomRightCorner(h, h) - M1.bottomRightCorner(h, h)).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK((M03.topRightCorner(h, h) - M1.topRightCorner(h, h)).cwiseAbs().maxCoeff() <
        1e-14);

  // k = 1 is the identity.
  MatrixXd Mid = stack.rescaled(1.0).decode(vals);
  CHECK((Mid - M1).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("time-domain constraint holds for the repeated real block") {
  // w = delta v with |delta| <= b: integral of z' M z dt must be >= 0 for
  // any feasible values (X > 0, arbitrary skew Y).
  IqcBlock blk = build_iqc_block({UncertaintyKind::RealRepeated, 1, 0.5, {1, -1.0}, "p"});
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 1.0);

  const double T = 8.0, dt = 1e-3;
  TimeGrid grid = TimeGrid::uniform(0.0, T, 1.0);
  TimeVaryingStateSpace psi = lift_lti(blk.psi, grid);

  for (int trial = 0; trial < 4; ++trial) {
    VectorXd vals(blk.tmpl.n_vars);
    for (Eigen::Index i = 0; i < vals.size(); ++i) vals(i) = g(rng);
    for (Eigen::Index i = 0; i < vals.size(); ++i)
      if (blk.tmpl.sign_fixed[std::size_t(i)]) vals(i) = std::abs(vals(i)) + 0.2;
    if (!blk.tmpl.feasible(vals)) continue;
    MatrixXd M = blk.tmpl.decode(vals, 1.0);

    const double delta = -0.5 + 0.25 * double(trial);  // within |delta| <= b
    const double pole = 0.5 + 0.4 * double(trial);
    std::vector<double> ts;
    std::vector<VectorXd> u;
    for (double t = 0.0; t <= T + 1e-12; t += dt) {
      ts.push_back(t);
      // First-order lag response to a square-ish deterministic signal.
      const double v = std::exp(-pole * t) * std::sin(3.0 * t + double(trial));
      VectorXd uk(2);
      uk << v, delta * v;
      u.push_back(uk);
    }
    auto z = simulate(psi, ts, u, VectorXd::Zero(psi.nx()));
    double integral = 0.0, mass = 0.0;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      integral += dt * z[k].dot(M * z[k]);
      mass += dt * std::abs(z[k].dot(M * z[k]));
    }
    CHECK(integral >= -1e-9 * std::max(1.0, mass));
  }
}

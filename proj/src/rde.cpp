#include "ltvwc/rde.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace ltvwc {

namespace {

// R alone, from the blocks at one time instant.
MatrixXd assembleR(const ExtendedSystem::Blocks& b, const MatrixXd& M, double gamma,
                   bool l2_metric) {
  const Eigen::Index n_w = b.B1.cols(), n_d = b.B2.cols();
  const double gamma_term = l2_metric ? gamma * gamma : gamma;
  MatrixXd MD11 = M * b.D11;
  MatrixXd MD12 = M * b.D12;
  MatrixXd R = MatrixXd::Zero(n_w + n_d, n_w + n_d);
  R.topLeftCorner(n_w, n_w) = b.D11.transpose() * MD11;
  R.topRightCorner(n_w, n_d) = b.D11.transpose() * MD12;
  R.bottomLeftCorner(n_d, n_w) = b.D12.transpose() * MD11;
  R.bottomRightCorner(n_d, n_d) = b.D12.transpose() * MD12;
  R.bottomRightCorner(n_d, n_d) -= gamma_term * MatrixXd::Identity(n_d, n_d);
  if (l2_metric) {
    R.topLeftCorner(n_w, n_w) += b.D21.transpose() * b.D21;
    R.topRightCorner(n_w, n_d) += b.D21.transpose() * b.D22;
    R.bottomLeftCorner(n_d, n_w) += b.D22.transpose() * b.D21;
    R.bottomRightCorner(n_d, n_d) += b.D22.transpose() * b.D22;
  }
  return 0.5 * (R + R.transpose().eval());
}

// Full RDE coefficient assembly at one time instant.
RdeCoefficients assemble(const ExtendedSystem& ext, const MatrixXd& M, double gamma,
                         double t, bool l2_metric) {
  const auto b = ext.at(t);
  const Eigen::Index n_w = ext.nW(), n_d = ext.nD(), n_x = ext.nx();

  MatrixXd MC1 = M * b.C1;

  RdeCoefficients c;
  c.R = assembleR(b, M, gamma, l2_metric);

  MatrixXd L(n_w + n_d, n_x);
  L.topRows(n_w) = b.D11.transpose() * MC1;
  L.bottomRows(n_d) = b.D12.transpose() * MC1;
  if (l2_metric) {
    L.topRows(n_w) += b.D21.transpose() * b.C2;
    L.bottomRows(n_d) += b.D22.transpose() * b.C2;
  }

  MatrixXd Bfull(n_x, n_w + n_d);
  Bfull.leftCols(n_w) = b.B1;
  Bfull.rightCols(n_d) = b.B2;

  Eigen::LDLT<MatrixXd> Rfac(c.R);
  MatrixXd RinvL = Rfac.solve(L);
  MatrixXd RinvBt = Rfac.solve(Bfull.transpose());

  c.Atilde = Bfull * RinvL - b.A;
  c.S = -Bfull * RinvBt;
  c.Q = -b.C1.transpose() * MC1 + L.transpose() * RinvL;
  if (l2_metric) c.Q -= b.C2.transpose() * b.C2;
  c.S = 0.5 * (c.S + c.S.transpose().eval());
  c.Q = 0.5 * (c.Q + c.Q.transpose().eval());
  return c;
}

}  // namespace

RdeCoefficients assemble_euclidean(const ExtendedSystem& ext, const MatrixXd& M,
                              double gamma, double t) {
  return assemble(ext, M, gamma, t, false);
}

RdeCoefficients assemble_l2(const ExtendedSystem& ext, const MatrixXd& M,
                              double gamma, double t) {
  return assemble(ext, M, gamma, t, true);
}

MatrixXd assemble_R(const ExtendedSystem& ext, const MatrixXd& M, double gamma,
                    GainMetric metric, double t) {
  return assembleR(ext.at(t), M, gamma, metric == GainMetric::L2ToL2);
}

MatrixXd terminal_condition(const ExtendedSystem& ext, double gamma, GainMetric metric,
                            double T) {
  if (metric == GainMetric::L2ToL2) return MatrixXd::Zero(ext.nx(), ext.nx());
  MatrixXd C2 = ext.at(T).C2;
  return (1.0 / gamma) * C2.transpose() * C2;
}

RVerdict check_R(const ExtendedSystem& ext, const MatrixXd& M, double gamma,
                 GainMetric metric, double t_start, double T, double cond_threshold) {
  const bool l2_metric = (metric == GainMetric::L2ToL2);
  std::vector<double> ts;
  for (double t : ext.grid().times())
    if (t >= t_start && t <= T) ts.push_back(t);
  if (ts.empty() || ts.back() < T) ts.push_back(T);
  if (ts.front() > t_start) ts.insert(ts.begin(), t_start);

  for (double t : ts) {
    MatrixXd R = assembleR(ext.at(t), M, gamma, l2_metric);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(R, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    // Written so that NaN (e.g. from non-finite model data) is rejected.
    if (!(ev.maxCoeff() < 0.0)) return {RVerdict::Kind::Infeasible, t};
    const double amax = ev.cwiseAbs().maxCoeff();
    const double amin = ev.cwiseAbs().minCoeff();
    if (amin == 0.0 || amax / amin > cond_threshold)
      return {RVerdict::Kind::IllConditioned, t};
  }
  return {RVerdict::Kind::Feasible, 0.0};
}

VectorXd pack_symmetric(const MatrixXd& P) {
  const Eigen::Index n = P.rows();
  VectorXd v(n * (n + 1) / 2);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) v(idx++) = P(i, j);
  return v;
}

MatrixXd unpack_symmetric(const Eigen::Ref<const VectorXd>& v, Eigen::Index n) {
  if (v.size() != n * (n + 1) / 2)
    throw std::invalid_argument("packed length does not match dimension");
  MatrixXd P(n, n);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      P(i, j) = v(idx);
      P(j, i) = v(idx);
      ++idx;
    }
  return P;
}

namespace {

// Coefficients precomputed on the plant grid and interpolated during the
// integration, consistent with the gridded model data.
struct CoefficientGrid {
  std::vector<double> times;  // ascending
  std::vector<MatrixXd> Atilde, S, Q;

  void assembleOn(const ExtendedSystem& ext, const MatrixXd& M, double gamma,
                  bool l2_metric, double t_start, double T) {
    times.clear();
    for (double t : ext.grid().times())
      if (t > t_start && t < T) times.push_back(t);
    times.insert(times.begin(), t_start);
    times.push_back(T);
    Atilde.resize(times.size());
    S.resize(times.size());
    Q.resize(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
      RdeCoefficients c = assemble(ext, M, gamma, times[k], l2_metric);
      Atilde[k] = std::move(c.Atilde);
      S[k] = std::move(c.S);
      Q[k] = std::move(c.Q);
    }
  }

  void eval(double t, MatrixXd& At, MatrixXd& St, MatrixXd& Qt) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t k = (it == times.begin()) ? 0 : std::size_t(it - times.begin()) - 1;
    if (k + 1 >= times.size()) k = times.size() - 2;
    const double a = std::clamp((t - times[k]) / (times[k + 1] - times[k]), 0.0, 1.0);
    At = (1.0 - a) * Atilde[k] + a * Atilde[k + 1];
    St = (1.0 - a) * S[k] + a * S[k + 1];
    Qt = (1.0 - a) * Q[k] + a * Q[k + 1];
  }
};

}  // namespace

RdeOutcome integrate_rde(const RdeProblem& problem) {
  const ExtendedSystem& ext = *problem.ext;
  const bool l2_metric = (problem.metric == GainMetric::L2ToL2);
  const double T = problem.T, t_start = problem.t_start;
  if (!(T > t_start)) throw std::invalid_argument("horizon must satisfy T > t_start");

  // The caller normally runs check_R first; repeat cheaply here so a stray
  // direct call cannot feed a singular R into the integration.
  RVerdict rv = check_R(ext, problem.M, problem.gamma, problem.metric, t_start, T,
                        problem.cond_threshold);
  if (rv.kind == RVerdict::Kind::Infeasible)
    return {RdeOutcome::Kind::RIndefinite, rv.t, {}, {}};
  if (rv.kind == RVerdict::Kind::IllConditioned)
    return {RdeOutcome::Kind::RIllConditioned, rv.t, {}, {}};

  CoefficientGrid grid;
  grid.assembleOn(ext, problem.M, problem.gamma, l2_metric, t_start, T);

  const Eigen::Index n = ext.nx();
  VectorXd y = pack_symmetric(terminal_condition(ext, problem.gamma, problem.metric, T));

  std::vector<double> traj_t;
  std::vector<MatrixXd> traj_P;
  if (problem.store_trajectory) {
    traj_t.push_back(T);
    traj_P.push_back(unpack_symmetric(y, n));
  }

  MatrixXd At, St, Qt, P(n, n), Pdot(n, n);
  // dP/dtau = -(Q + P*Atilde + Atilde^T*P - P*S*P) at t = T - tau
  auto rhs = [&](double tau, const VectorXd& yv, VectorXd& dy) {
    const double t = T - tau;
    grid.eval(t, At, St, Qt);
    P = unpack_symmetric(yv, n);
    MatrixXd PA = P * At;
    Pdot = Qt + PA + PA.transpose() - P * St * P;
    dy = -pack_symmetric(Pdot);
  };

  // Dormand-Prince 5(4) with standard coefficients.
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                      a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                      e4 = 125.0 / 192 - 393.0 / 640,
                      e5 = -2187.0 / 6784 + 92097.0 / 339200,
                      e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  const double span = T - t_start;
  double tau = 0.0;
  double h = std::min(span, 1e-2 * span);
  const double h_min = 1e-13 * span;

  const Eigen::Index m = y.size();
  VectorXd k1(m), k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), ynew(m), yerr(m), ytmp(m);
  rhs(tau, y, k1);

  auto escaped = [&](double at_tau) {
    return RdeOutcome{RdeOutcome::Kind::Escaped, T - at_tau, {}, {}};
  };

  const long max_steps = 2000000;
  for (long step = 0; step < max_steps && tau < span; ++step) {
    h = std::min(h, span - tau);
    ytmp = y + h * (a21 * k1);
    rhs(tau + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(tau + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(tau + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(tau + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(tau + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(tau + h, ynew, k7);  // FSAL
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    if (!ynew.allFinite() || !yerr.allFinite()) {
      h *= 0.25;
      if (h < h_min) return escaped(tau);
      rhs(tau, y, k1);
      continue;
    }

    double err = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double sc =
          problem.abs_tol + problem.rel_tol * std::max(std::abs(y(i)), std::abs(ynew(i)));
      const double r = yerr(i) / sc;
      err += r * r;
    }
    err = std::sqrt(err / double(m));

    if (err <= 1.0) {
      tau += h;
      y.swap(ynew);
      k1.swap(k7);

      // Blow-up event: a finite escape needs both a diverging P and a
      // derivative exploding with it; testing Pdot alone would misfire on
      // stiff problems whose coefficients (and hence Pdot) are legitimately
      // huge while P stays bounded. Cheap max-entry proxies first, the
      // derivative confirmed by an exact eigenvalue evaluation.
      const double proxy = k1.cwiseAbs().maxCoeff() * double(n);
      const double p_mag = y.cwiseAbs().maxCoeff();
      if (p_mag >= problem.event_threshold && proxy >= problem.event_threshold) {
        MatrixXd Pd = unpack_symmetric(k1, n);
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(Pd, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().cwiseAbs().maxCoeff() >= problem.event_threshold)
          return escaped(tau);
      }
      if (problem.store_trajectory) {
        traj_t.push_back(T - tau);
        traj_P.push_back(unpack_symmetric(y, n));
      }
    }

    double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (h < h_min && tau < span) return escaped(tau);
  }
  if (tau < span) return escaped(tau);

  RdeOutcome out;
  out.kind = RdeOutcome::Kind::Solved;
  out.P_start = unpack_symmetric(y, n);
  if (problem.store_trajectory) {
    std::reverse(traj_t.begin(), traj_t.end());
    std::reverse(traj_P.begin(), traj_P.end());
    // Adaptive steps can land arbitrarily close together; thin exact dupes.
    std::vector<double> ts;
    std::vector<MatrixXd> Ps;
    for (std::size_t i = 0; i < traj_t.size(); ++i) {
      if (!ts.empty() && !(traj_t[i] > ts.back())) continue;
      ts.push_back(traj_t[i]);
      Ps.push_back(traj_P[i]);
    }
    if (ts.size() >= 2) out.trajectory = MatrixFunction(TimeGrid(ts), Ps);
  }
  return out;
}

}  // namespace ltvwc

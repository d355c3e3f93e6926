#include "ltvwc/gain.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace ltvwc {

bool rde_solvable(const ExtendedSystem& ext, const MatrixXd& M, double gamma,
                  const BisectionConfig& cfg, int& evaluations) {
  RVerdict rv = check_R(ext, M, gamma, cfg.metric, cfg.t_start, cfg.T,
                        cfg.cond_threshold);
  if (rv.kind != RVerdict::Kind::Feasible) return false;

  RdeProblem p;
  p.ext = &ext;
  p.M = M;
  p.gamma = gamma;
  p.metric = cfg.metric;
  p.t_start = cfg.t_start;
  p.T = cfg.T;
  p.rel_tol = cfg.rel_tol;
  p.abs_tol = cfg.abs_tol;
  p.event_threshold = cfg.event_threshold;
  p.cond_threshold = cfg.cond_threshold;
  ++evaluations;
  return integrate_rde(p).solved();
}

GainResult bisect_gamma(const ExtendedSystem& ext, const MatrixXd& M,
                        const BisectionConfig& cfg) {
  if (!(0.0 < cfg.gamma_lb && cfg.gamma_lb < cfg.gamma_ub))
    throw std::invalid_argument("bisection requires 0 < gamma_lb < gamma_ub");
  GainResult res;
  if (!rde_solvable(ext, M, cfg.gamma_ub, cfg, res.evaluations)) {
    res.gamma = kInfeasibleGamma;
    return res;
  }
  double lb = cfg.gamma_lb, ub = cfg.gamma_ub;
  while ((ub - lb) / lb > cfg.eps_bs) {
    const double mid = 0.5 * (lb + ub);
    if (rde_solvable(ext, M, mid, cfg, res.evaluations))
      ub = mid;
    else
      lb = mid;
  }
  res.gamma = ub;
  return res;
}

GainResult nominal_gamma(const ExtendedSystem& ext, const BisectionConfig& cfg) {
  if (ext.nW() != 0)
    throw std::invalid_argument("nominal gain needs a system without w channels");
  const MatrixXd M(0, 0);
  GainResult res;
  // Grow the upper bound until the RDE solves, then bisect.
  BisectionConfig c = cfg;
  while (c.gamma_ub < kInfeasibleGamma) {
    int evals = 0;
    const bool ok = rde_solvable(ext, M, c.gamma_ub, c, evals);
    res.evaluations += evals;
    if (ok) break;
    c.gamma_lb = c.gamma_ub;
    c.gamma_ub *= 10.0;
  }
  if (c.gamma_ub >= kInfeasibleGamma) {
    res.gamma = kInfeasibleGamma;
    return res;
  }
  GainResult b = bisect_gamma(ext, M, c);
  res.gamma = b.gamma;
  res.evaluations += b.evaluations;
  return res;
}

double schur_lower_bound(const ExtendedSystem& ext, const MatrixXd& M,
                         GainMetric metric, double t_start, double T) {
  double bound = 0.0;
  for (double t : ext.grid().times()) {
    if (t < t_start || t > T) continue;
    // R(gamma) is negative definite iff gamma exceeds the per-time infimum;
    // bisect on the largest eigenvalue.
    auto feasible = [&](double g) {
      MatrixXd R = assemble_R(ext, M, g, metric, t);
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(R, Eigen::EigenvaluesOnly);
      return es.eigenvalues().maxCoeff() < 0.0;
    };
    double lo = 1e-12, hi = 1.0;
    while (!feasible(hi) && hi < 1e20) hi *= 10.0;
    if (hi >= 1e20) return kInfeasibleGamma;  // R < 0 unattainable at this t
    for (int it = 0; it < 200 && (hi - lo) / hi > 1e-10; ++it) {
      const double mid = 0.5 * (lo + hi);
      (feasible(mid) ? hi : lo) = mid;
    }
    bound = std::max(bound, hi);
  }
  return bound;
}

}  // namespace ltvwc

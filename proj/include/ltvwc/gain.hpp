#pragma once

#include "ltvwc/rde.hpp"

namespace ltvwc {

/// Fitness assigned when the RDE is not solvable at the bisection upper bound.
inline constexpr double kInfeasibleGamma = 1e20;

struct BisectionConfig {
  double gamma_lb = 1e-3;
  double gamma_ub = 1e3;
  double eps_bs = 1e-5;  // relative bracket tolerance
  GainMetric metric = GainMetric::L2ToEuclidean;
  double t_start = 0.0;
  double T = 1.0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  double event_threshold = 1e12;
  double cond_threshold = 1e12;
};

struct GainResult {
  double gamma = kInfeasibleGamma;  // certified upper bound, or the sentinel
  int evaluations = 0;              // RDE integrations run

  bool feasible() const { return gamma < kInfeasibleGamma; }
};

/// Bisect the smallest solvable gamma for a fixed multiplier M. Each
/// candidate gamma runs check_R first and skips the integration on failure.
/// If the problem is not solvable at gamma_ub, returns the sentinel after a
/// single attempt.
GainResult bisect_gamma(const ExtendedSystem& ext, const MatrixXd& M,
                        const BisectionConfig& cfg);

/// Nominal gain of a d -> e system (no uncertainty channels), bisected with
/// an adaptive upper bound grown from cfg.gamma_ub.
GainResult nominal_gamma(const ExtendedSystem& ext, const BisectionConfig& cfg);

/// Infimum over grid times of the gamma that makes R(t) < 0; a theoretical
/// lower bound for any bisection.
double schur_lower_bound(const ExtendedSystem& ext, const MatrixXd& M,
                         GainMetric metric, double t_start, double T);

/// One solvability probe at a fixed gamma (check_R then integrate).
bool rde_solvable(const ExtendedSystem& ext, const MatrixXd& M, double gamma,
                  const BisectionConfig& cfg, int& evaluations);

}  // namespace ltvwc

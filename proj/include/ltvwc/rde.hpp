#pragma once

#include <optional>

#include "ltvwc/extended_system.hpp"

namespace ltvwc {

/// Which worst-case gain is certified: output Euclidean norm at the final
/// time, or the L2[0,T] norm of the whole output.
enum class GainMetric { L2ToEuclidean, L2ToL2 };

/// Coefficients of the Riccati differential equation
/// Pdot = Q + P*Atilde + Atilde^T*P - P*S*P.
struct RdeCoefficients {
  MatrixXd R, Atilde, S, Q;
};

/// Assemble the coefficient matrices at time t. M may be 0x0 (nominal).
RdeCoefficients assemble_euclidean(const ExtendedSystem& ext, const MatrixXd& M,
                                   double gamma, double t);
RdeCoefficients assemble_l2(const ExtendedSystem& ext, const MatrixXd& M,
                            double gamma, double t);

/// R alone (cheaper than the full assembly; used by feasibility scans).
MatrixXd assemble_R(const ExtendedSystem& ext, const MatrixXd& M, double gamma,
                    GainMetric metric, double t);

/// Terminal condition P(T): (1/gamma) C2(T)^T C2(T) for the Euclidean
/// metric, zero for the L2 metric.
MatrixXd terminal_condition(const ExtendedSystem& ext, double gamma,
                            GainMetric metric, double T);

struct RVerdict {
  enum class Kind { Feasible, Infeasible, IllConditioned } kind;
  double t = 0.0;  // first violating grid time for the non-feasible kinds
};

/// Check R(t) < 0 and its conditioning on the plant grid restricted to
/// [t_start, T].
RVerdict check_R(const ExtendedSystem& ext, const MatrixXd& M, double gamma,
                 GainMetric metric, double t_start, double T,
                 double cond_threshold);

struct RdeProblem {
  const ExtendedSystem* ext = nullptr;
  MatrixXd M;  // decoded multiplier; 0x0 for nominal problems
  double gamma = 1.0;
  GainMetric metric = GainMetric::L2ToEuclidean;
  double t_start = 0.0;
  double T = 1.0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-9;
  double event_threshold = 1e12;
  double cond_threshold = 1e12;
  bool store_trajectory = false;
};

struct RdeOutcome {
  enum class Kind { Solved, Escaped, RIndefinite, RIllConditioned } kind;
  double t_event = 0.0;  // escape / violation time for non-Solved kinds
  MatrixXd P_start;      // P(t_start) when Solved
  std::optional<MatrixFunction> trajectory;  // when requested

  bool solved() const { return kind == Kind::Solved; }
};

/// Integrate the RDE backward from t = T to t = t_start (forward in
/// tau = T - t) with the packed upper triangle of P as state. The caller
/// is expected to have run check_R; a grid R violation is reported as
/// RIndefinite/RIllConditioned without integrating.
RdeOutcome integrate_rde(const RdeProblem& problem);

/// Packed upper-triangle storage: n(n+1)/2 reals for a symmetric n x n P.
VectorXd pack_symmetric(const MatrixXd& P);
MatrixXd unpack_symmetric(const Eigen::Ref<const VectorXd>& v, Eigen::Index n);

}  // namespace ltvwc

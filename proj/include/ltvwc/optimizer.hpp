#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ltvwc/gain.hpp"
#include "ltvwc/iqc.hpp"

namespace ltvwc {

/// Decision vector in the logarithmic search space: per multiplier variable
/// an exponent to base ten, plus a sign surrogate in [-1, 1] for variables
/// whose sign is free (X diagonals are fixed positive and carry none).
struct LogCandidate {
  VectorXd x;  // [exponents (n_m); sign surrogates (n_free)]
  double fitness = kInfeasibleGamma;
};

struct OptimizerConfig {
  int n_p_max = 50;
  int n_p_min = 4;
  int i_max = 30;
  int k_f = 5;
  int k_cr = 5;
  double k_iqc = 1.0;       // initial norm-bound scale in (0, 1]
  double gamma_lim = 0.0;   // termination threshold (also the rescale trigger)
  BisectionConfig bisection;
  VectorXd s_min, s_max;    // per-variable exponent bounds (size n_m)
  std::vector<VectorXd> initial_guesses;  // stacked vectors, inserted verbatim
  double min_valid_fraction = 0.20;
  double pbest_fraction = 0.10;
  int init_retry_rounds = 50;
  std::uint64_t seed = 1;
  int workers = 1;
  bool use_archive = false;                   // optional r2 archive, off per default
  bool literal_population_schedule = false;   // retain the printed formula
  std::string progress_csv;                   // per-iteration log, empty = none
};

struct OptimizerResult {
  double gamma_best = kInfeasibleGamma;
  LogCandidate best;
  VectorXd values_best;  // decoded multiplier variables
  int iterations = 0;
  long rde_evaluations = 0;
  double final_bound_scale = 1.0;
  std::vector<double> gamma_trajectory;  // gamma_best after each iteration
};

/// Exponent/sign encoding helpers shared with tests and the CLI.
class LogSpace {
 public:
  LogSpace(const IqcStack& stack, const VectorXd& s_min, const VectorXd& s_max);

  Eigen::Index nVars() const { return n_m_; }
  Eigen::Index dim() const { return n_m_ + n_free_; }
  const VectorXd& lower() const { return lo_; }
  const VectorXd& upper() const { return hi_; }

  /// value_i = sign_i * 10^{exponent_i}.
  VectorXd decode(const VectorXd& x) const;
  /// Exact inverse of decode on its image (signs map to +-1).
  VectorXd encode(const VectorXd& values) const;

 private:
  Eigen::Index n_m_ = 0, n_free_ = 0;
  std::vector<bool> sign_fixed_;
  std::vector<Eigen::Index> sign_slot_;  // per variable: surrogate index or -1
  VectorXd lo_, hi_;
};

/// Population-size schedule (linear reduction; the literal printed variant is
/// kept behind a flag for reference).
int population_schedule(const OptimizerConfig& cfg, int iteration);

/// Boundary repair: out-of-bound entries move to the mean of the parent
/// entry and the violated bound.
void repair_bounds(VectorXd& child, const VectorXd& parent, const VectorXd& lo,
                   const VectorXd& hi);

/// Success-history memory of the adaptive differential evolution.
struct SuccessMemory {
  std::vector<double> s_f, s_cr;
  std::size_t cursor = 0;

  SuccessMemory(int k_f, int k_cr) : s_f(std::size_t(k_f), 0.5), s_cr(std::size_t(k_cr), 0.5) {}

  /// Improvement-weighted Lehmer mean of F and arithmetic mean of CR.
  void update(const std::vector<double>& f, const std::vector<double>& cr,
              const std::vector<double>& improvement);
};

/// Full Log-L-SHADE run on the plant/stack pair.
OptimizerResult optimize(const OptimizerConfig& cfg, const TimeVaryingStateSpace& plant,
                         const IqcStack& stack);

}  // namespace ltvwc

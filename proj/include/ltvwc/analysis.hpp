#pragma once

#include <functional>

#include "ltvwc/config.hpp"
#include "ltvwc/optimizer.hpp"

namespace ltvwc {

struct AnalysisRow {
  double T = 0.0;
  double gamma_nom = kInfeasibleGamma;
  double gamma_wc = kInfeasibleGamma;
  long rde_evaluations = 0;
  int iterations = 0;
  double bound_scale = 1.0;
  double wall_s = 0.0;
  VectorXd values_best;  // decoded multiplier variables (empty if nominal-only)
};

struct AnalysisResult {
  std::vector<AnalysisRow> rows;
  bool budget_exhausted = false;
};

/// Final-time sweep: per T_i (ascending) compute the nominal gain, then run
/// the optimizer — cold with the downscaled norm bounds on the first grid
/// point, warm-started from the previous optimum with the exponent space
/// narrowed to +-warm_band decades afterwards. An empty stack degenerates to
/// the nominal sweep. Any solved bound is valid, so a wall-clock budget
/// aborts between grid points with the rows finished so far.
AnalysisResult analyze_sweep(const AnalysisConfig& cfg,
                             const TimeVaryingStateSpace& plant, const IqcStack& stack,
                             const std::function<void(const AnalysisRow&)>& on_row = {});

/// Nominal gain over the same final-time grid (no uncertainty channels).
AnalysisResult nominal_sweep(const AnalysisConfig& cfg,
                             const TimeVaryingStateSpace& plant_nominal);

void write_analysis_csv(const AnalysisResult& result, const std::string& path);

}  // namespace ltvwc

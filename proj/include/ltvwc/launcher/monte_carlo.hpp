#pragma once

#include "ltvwc/launcher/simulation.hpp"

namespace ltvwc::launcher {

/// Uniform 27-point grid over the uncertainty space: extreme and nominal
/// values of the two geometry parameters crossed with three joint actuator
/// settings (all parameters low with the short dead time, nominal, all high
/// with the long dead time).
std::vector<UncertaintySample> uncertainty_grid27();

struct MonteCarloConfig {
  int n_seeds = 50;
  std::uint64_t seed0 = 1;
  double t0 = 25.0;
  double tf = 95.0;
  double noise_scale = 1.0;
  int workers = 1;
  std::vector<double> report_times;  // analysis grid T_i for the envelope
};

struct MonteCarloRun {
  UncertaintySample sample;
  std::uint64_t seed = 0;
  double peak_ratio = 0.0;  // max |qalpha| / qalpha_lim
  double t_peak = 0.0;
  bool unstable = false;
};

struct MonteCarloResult {
  std::vector<MonteCarloRun> runs;
  std::vector<double> report_times;
  /// Per report time: max over runs of |qalpha(T_i)| normalised by the L2
  /// norm of the noise over [t0, T_i] (the sampled counterpart of the
  /// L2-to-Euclidean gain that the worst-case bound certifies).
  std::vector<double> envelope_gain;
  /// Per report time: max over runs of |qalpha(T_i)| / qalpha_lim.
  std::vector<double> envelope_ratio;
  double peak_ratio_max = 0.0;
  double t_peak_max = 0.0;
};

MonteCarloResult monte_carlo(const LauncherParams& params, const TrajectoryRef& traj,
                             const std::vector<UncertaintySample>& samples,
                             const MonteCarloConfig& cfg);

}  // namespace ltvwc::launcher

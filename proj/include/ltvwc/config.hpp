#pragma once

#include <cstdint>
#include <string>

#include "ltvwc/rde.hpp"

namespace ltvwc {

/// Run configuration shared by the CLI subcommands. Defaults follow the
/// launcher study: a 30..95 s final-time grid with 5 s steps, population
/// 50/30 (cold/warm), 30/20 iterations, five-slot success memories, 1e-5
/// bisection tolerance, an upper bound of 100x the nominal gain, and a 0.3
/// norm-bound scale for the cold first run.
struct AnalysisConfig {
  std::string model = "launcher";  // "launcher" or a saved model directory
  GainMetric metric = GainMetric::L2ToEuclidean;

  double horizon_start = 25.0;
  double t_grid_start = 30.0;
  double t_grid_end = 95.0;
  double t_grid_step = 5.0;

  int n_p_max_first = 50;
  int n_p_max_warm = 30;
  int n_p_min = 4;
  int i_max_first = 30;
  int i_max_warm = 20;
  int k_f = 5;
  int k_cr = 5;
  double k_iqc_first = 0.3;
  double eps_bs = 1e-5;
  double gamma_ub_factor = 100.0;
  // Cold-start exponent window. The uncertainty channels are normalized to
  // commensurate magnitudes, so useful multipliers live near unit scale;
  // wider windows dilute the valid-initialization rate.
  double exp_min = -4.0;
  double exp_max = 4.0;
  double warm_band = 2.0;  // +- decades around the previous optimum

  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "results";
  double wall_clock_budget = 0.0;  // s, 0 disables the budget

  int mc_seeds = 50;
  double mc_noise_scale = 1.0;
  int wind_profiles = 100;
  int wind_segments = 14;
};

/// Parse a JSON config file; unknown keys are rejected, missing keys keep
/// their defaults.
AnalysisConfig load_config(const std::string& path);
void save_config(const AnalysisConfig& cfg, const std::string& path);

}  // namespace ltvwc

#include "ltvwc/launcher/monte_carlo.hpp"

#include <cmath>

#include "ltvwc/parallel.hpp"

namespace ltvwc::launcher {

std::vector<UncertaintySample> uncertainty_grid27() {
  const double lcg[3] = {-0.1, 0.0, 0.1};
  const double lga[3] = {-0.2, 0.0, 0.2};
  struct Tvc {
    double d, z, f, tau;
  };
  const Tvc tvc[3] = {{-0.1, -0.1, -0.1, 0.005}, {0.0, 0.0, 0.0, 0.01},
                      {0.1, 0.1, 0.1, 0.01}};
  std::vector<UncertaintySample> grid;
  grid.reserve(27);
  for (double dc : lcg)
    for (double dg : lga)
      for (const Tvc& a : tvc)
        grid.push_back({dc, dg, a.d, a.z, a.f, a.tau});
  return grid;
}

MonteCarloResult monte_carlo(const LauncherParams& params, const TrajectoryRef& traj,
                             const std::vector<UncertaintySample>& samples,
                             const MonteCarloConfig& cfg) {
  MonteCarloResult result;
  result.report_times = cfg.report_times;
  result.envelope_gain.assign(cfg.report_times.size(), 0.0);
  result.envelope_ratio.assign(cfg.report_times.size(), 0.0);

  const int n_runs = int(samples.size()) * cfg.n_seeds;
  result.runs.resize(std::size_t(n_runs));
  std::vector<std::vector<double>> gains(static_cast<std::size_t>(n_runs));
  std::vector<std::vector<double>> ratios(static_cast<std::size_t>(n_runs));

  parallel_for(n_runs, cfg.workers, [&](int idx) {
    const UncertaintySample& sample = samples[std::size_t(idx) / std::size_t(cfg.n_seeds)];
    const std::uint64_t seed = cfg.seed0 + std::uint64_t(idx % cfg.n_seeds);

    SimOptions opts;
    opts.t0 = cfg.t0;
    opts.tf = cfg.tf;
    opts.noise_scale = cfg.noise_scale;
    opts.seed = seed;
    const SimResult sim = simulate_nonlinear(params, traj, sample, opts);

    MonteCarloRun& run = result.runs[std::size_t(idx)];
    run.sample = sample;
    run.seed = seed;
    run.unstable = sim.unstable;
    run.peak_ratio = sim.peak_qalpha / params.qalpha_lim;
    run.t_peak = sim.t_peak;

    auto& gain = gains[std::size_t(idx)];
    auto& ratio = ratios[std::size_t(idx)];
    gain.reserve(cfg.report_times.size());
    ratio.reserve(cfg.report_times.size());
    for (double ti : cfg.report_times) {
      const double qa = std::abs(sim.qalpha_at(ti));
      const double energy = sim.noise_energy_at(ti);
      gain.push_back(energy > 0.0 ? qa / std::sqrt(energy) : 0.0);
      ratio.push_back(qa / params.qalpha_lim);
    }
  });

  for (int idx = 0; idx < n_runs; ++idx) {
    const MonteCarloRun& run = result.runs[std::size_t(idx)];
    if (run.peak_ratio > result.peak_ratio_max && !run.unstable) {
      result.peak_ratio_max = run.peak_ratio;
      result.t_peak_max = run.t_peak;
    }
    for (std::size_t k = 0; k < cfg.report_times.size(); ++k) {
      result.envelope_gain[k] = std::max(result.envelope_gain[k], gains[std::size_t(idx)][k]);
      result.envelope_ratio[k] =
          std::max(result.envelope_ratio[k], ratios[std::size_t(idx)][k]);
    }
  }
  return result;
}

}  // namespace ltvwc::launcher

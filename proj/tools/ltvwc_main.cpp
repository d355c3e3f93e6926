#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ltvwc/analysis.hpp"
#include "ltvwc/extended_system.hpp"
#include "ltvwc/launcher/interconnection.hpp"
#include "ltvwc/launcher/linearize.hpp"
#include "ltvwc/launcher/monte_carlo.hpp"
#include "ltvwc/model_io.hpp"

namespace {

using namespace ltvwc;
namespace lc = ltvwc::launcher;

struct LauncherArtifacts {
  lc::LauncherParams params;
  lc::TrajectoryRef traj;
  lc::WindFilterLtv wind;
};

LauncherArtifacts build_launcher(const AnalysisConfig& cfg) {
  lc::LauncherParams params = lc::toy_dataset();
  lc::TrajectoryRef traj = lc::gravity_turn(params);
  const auto profiles =
      lc::generate_wind_profiles(params, traj, cfg.wind_profiles, cfg.horizon_start,
                                 cfg.t_grid_end, 100.0, cfg.seed);
  lc::WindFilterLtv wind = lc::fit_wind_filter_ltv(profiles, cfg.horizon_start,
                                                   cfg.t_grid_end, 100.0,
                                                   cfg.wind_segments);
  return LauncherArtifacts{std::move(params), std::move(traj), std::move(wind)};
}

TimeVaryingStateSpace launcher_plant(const LauncherArtifacts& art,
                                     const AnalysisConfig& cfg, bool uncertain,
                                     const lc::UncertaintySample* fixed = nullptr) {
  lc::InterconnectionOptions opts;
  opts.t_start = cfg.horizon_start;
  opts.t_end = cfg.t_grid_end;
  opts.with_uncertainty = uncertain;
  opts.fixed = fixed;
  return lc::build_analysis_interconnection(art.params, art.traj, art.wind, opts);
}

void write_multipliers_csv(const AnalysisResult& result, const std::string& path) {
  std::ofstream out(path);
  out.precision(12);
  out << "T_i";
  if (!result.rows.empty())
    for (Eigen::Index i = 0; i < result.rows.front().values_best.size(); ++i)
      out << ",m" << i;
  out << "\n";
  for (const auto& row : result.rows) {
    out << row.T;
    for (Eigen::Index i = 0; i < row.values_best.size(); ++i)
      out << "," << row.values_best(i);
    out << "\n";
  }
}

double max_gamma(const AnalysisResult& r) {
  double m = 0.0;
  for (const auto& row : r.rows) m = std::max(m, row.gamma_wc);
  return m;
}

int cmd_analyze(const AnalysisConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);

  AnalysisResult result, nominal_result, fixed_result;
  if (cfg.model == "launcher") {
    const LauncherArtifacts art = build_launcher(cfg);
    const TimeVaryingStateSpace plant = launcher_plant(art, cfg, true);
    const IqcStack stack = lc::make_launcher_stack();

    result = analyze_sweep(cfg, plant, stack, [&](const AnalysisRow& row) {
      std::cout << "T = " << row.T << " s: nominal " << row.gamma_nom << ", worst case "
                << row.gamma_wc << " (" << row.rde_evaluations << " integrations, "
                << row.wall_s << " s)\n";
    });

    // Fixed perturbation: the worst Monte Carlo corner, analysed nominally.
    const lc::UncertaintySample corner{-0.1, 0.2, -0.1, -0.1, -0.1, 0.01};
    fixed_result = nominal_sweep(cfg, launcher_plant(art, cfg, false, &corner));
    nominal_result = nominal_sweep(cfg, launcher_plant(art, cfg, false));

    std::ofstream summary(cfg.out_dir + "/summary.txt");
    summary.precision(6);
    summary << "Worst-case gain over the final-time grid (output units per unit "
               "input energy)\n\n";
    summary << "              Nominal    Fixed perturbation    Worst case\n";
    summary << "  max gamma   " << max_gamma(nominal_result) << "    "
            << max_gamma(fixed_result) << "    " << max_gamma(result) << "\n";
    write_analysis_csv(nominal_result, cfg.out_dir + "/nominal.csv");
    write_analysis_csv(fixed_result, cfg.out_dir + "/fixed_perturbation.csv");
  } else {
    const TimeVaryingStateSpace plant = load_model(cfg.model);
    result = analyze_sweep(cfg, plant, IqcStack{});
  }

  write_analysis_csv(result, cfg.out_dir + "/analysis.csv");
  write_multipliers_csv(result, cfg.out_dir + "/multipliers.csv");
  if (result.budget_exhausted)
    std::cout << "wall-clock budget exhausted; wrote the rows finished so far\n";
  std::cout << "results written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_nominal(const AnalysisConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  AnalysisResult result;
  if (cfg.model == "launcher") {
    const LauncherArtifacts art = build_launcher(cfg);
    result = nominal_sweep(cfg, launcher_plant(art, cfg, false));
  } else {
    result = nominal_sweep(cfg, load_model(cfg.model));
  }
  write_analysis_csv(result, cfg.out_dir + "/nominal.csv");
  std::cout << "results written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_montecarlo(const AnalysisConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const lc::LauncherParams params = lc::toy_dataset();
  const lc::TrajectoryRef traj = lc::gravity_turn(params);

  lc::MonteCarloConfig mc;
  mc.n_seeds = cfg.mc_seeds;
  mc.seed0 = cfg.seed;
  mc.t0 = cfg.horizon_start;
  mc.tf = cfg.t_grid_end;
  mc.noise_scale = cfg.mc_noise_scale;
  mc.workers = cfg.workers;
  for (double t = cfg.t_grid_start; t <= cfg.t_grid_end + 1e-9; t += cfg.t_grid_step)
    mc.report_times.push_back(t);

  const auto result = lc::monte_carlo(params, traj, lc::uncertainty_grid27(), mc);

  std::ofstream env(cfg.out_dir + "/envelope.csv");
  env.precision(12);
  env << "T_i,envelope_gain,envelope_load_ratio\n";
  for (std::size_t k = 0; k < result.report_times.size(); ++k)
    env << result.report_times[k] << "," << result.envelope_gain[k] << ","
        << result.envelope_ratio[k] << "\n";

  std::ofstream runs(cfg.out_dir + "/runs.csv");
  runs.precision(12);
  runs << "d_lcg,d_lga,d_gain,d_damp,d_freq,delay,seed,peak_load_ratio,t_peak,unstable\n";
  for (const auto& run : result.runs)
    runs << run.sample.d_lcg << "," << run.sample.d_lga << "," << run.sample.d_gain << ","
         << run.sample.d_damp << "," << run.sample.d_freq << "," << run.sample.delay
         << "," << run.seed << "," << run.peak_ratio << "," << run.t_peak << ","
         << (run.unstable ? 1 : 0) << "\n";

  std::cout << "peak load " << 100.0 * result.peak_ratio_max << " % of the limit at t = "
            << result.t_peak_max << " s\n";
  std::cout << "results written to " << cfg.out_dir << "\n";
  return 0;
}

int cmd_windfit(const AnalysisConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  const lc::LauncherParams params = lc::toy_dataset();
  const lc::TrajectoryRef traj = lc::gravity_turn(params);
  const auto profiles =
      lc::generate_wind_profiles(params, traj, cfg.wind_profiles, cfg.horizon_start,
                                 cfg.t_grid_end, 100.0, cfg.seed);
  const lc::WindFilterLtv wind = lc::fit_wind_filter_ltv(
      profiles, cfg.horizon_start, cfg.t_grid_end, 100.0, cfg.wind_segments);

  save_model(wind.sys, cfg.out_dir + "/wind_filter");

  std::ofstream report(cfg.out_dir + "/wind_fit_report.csv");
  report.precision(12);
  report << "segment,t_mid,gain,pole,bins,envelope_max,min_margin\n";
  int index = 0;
  for (const auto& seg : wind.segments) {
    double env_max = 0.0, min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < seg.envelope.size(); ++k) {
      env_max = std::max(env_max, seg.envelope[k]);
      if (seg.envelope[k] > 0.0)
        min_margin = std::min(min_margin, seg.fit_mag[k] / seg.envelope[k]);
    }
    report << index++ << "," << seg.t_mid << "," << seg.gain << "," << seg.pole << ","
           << seg.envelope.size() << "," << env_max << "," << min_margin << "\n";
  }
  std::cout << "results written to " << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guaranteed worst-case gain bounds for uncertain LTV systems"};
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_path, out_dir;
  int workers = 0;
  std::uint64_t seed = 0;
  bool have_seed = false;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--workers", workers, "parallel evaluation workers");
  app.add_option("--seed", seed, "random seed override")->each([&](const std::string&) {
    have_seed = true;
  });
  app.add_option("--out", out_dir, "output directory override");

  auto* analyze = app.add_subcommand("analyze", "worst-case sweep over final times");
  auto* nominal = app.add_subcommand("nominal", "nominal sweep over final times");
  auto* montecarlo = app.add_subcommand("montecarlo", "nonlinear Monte Carlo envelope");
  auto* windfit = app.add_subcommand("windfit", "LTV wind-filter synthesis");

  CLI11_PARSE(app, argc, argv);

  try {
    AnalysisConfig cfg =
        config_path.empty() ? AnalysisConfig{} : load_config(config_path);
    if (workers > 0) cfg.workers = workers;
    if (have_seed) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    if (analyze->parsed()) return cmd_analyze(cfg);
    if (nominal->parsed()) return cmd_nominal(cfg);
    if (montecarlo->parsed()) return cmd_montecarlo(cfg);
    if (windfit->parsed()) return cmd_windfit(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

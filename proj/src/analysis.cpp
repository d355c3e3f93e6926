#include "ltvwc/analysis.hpp"

#include <chrono>
#include <fstream>

#include "ltvwc/extended_system.hpp"

namespace ltvwc {

namespace {

double elapsed_s(const std::chrono::steady_clock::time_point& since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::vector<double> final_time_grid(const AnalysisConfig& cfg) {
  std::vector<double> grid;
  for (double t = cfg.t_grid_start; t <= cfg.t_grid_end + 1e-9; t += cfg.t_grid_step)
    grid.push_back(std::min(t, cfg.t_grid_end));
  return grid;
}

BisectionConfig base_bisection(const AnalysisConfig& cfg, double T) {
  BisectionConfig bc;
  bc.metric = cfg.metric;
  bc.t_start = cfg.horizon_start;
  bc.T = T;
  bc.eps_bs = cfg.eps_bs;
  bc.gamma_lb = 1e-6;
  bc.gamma_ub = 1.0;
  return bc;
}

}  // namespace

AnalysisResult nominal_sweep(const AnalysisConfig& cfg,
                             const TimeVaryingStateSpace& plant_nominal) {
  const ExtendedSystem ext = build_extended_nominal(plant_nominal);
  AnalysisResult result;
  const auto start = std::chrono::steady_clock::now();
  for (double T : final_time_grid(cfg)) {
    const auto row_start = std::chrono::steady_clock::now();
    const GainResult g = nominal_gamma(ext, base_bisection(cfg, T));
    AnalysisRow row;
    row.T = T;
    row.gamma_nom = g.gamma;
    row.gamma_wc = g.gamma;
    row.rde_evaluations = g.evaluations;
    row.wall_s = elapsed_s(row_start);
    result.rows.push_back(std::move(row));
    if (cfg.wall_clock_budget > 0.0 && elapsed_s(start) > cfg.wall_clock_budget) {
      result.budget_exhausted = true;
      break;
    }
  }
  return result;
}

AnalysisResult analyze_sweep(const AnalysisConfig& cfg,
                             const TimeVaryingStateSpace& plant, const IqcStack& stack,
                             const std::function<void(const AnalysisRow&)>& on_row) {
  if (stack.empty()) return nominal_sweep(cfg, plant);

  const ExtendedSystem ext_nom = nominal_reduction(build_extended(plant, stack));

  AnalysisResult result;
  const auto start = std::chrono::steady_clock::now();
  bool have_previous = false;
  VectorXd previous_x;

  int index = 0;
  for (double T : final_time_grid(cfg)) {
    const auto row_start = std::chrono::steady_clock::now();
    AnalysisRow row;
    row.T = T;

    const GainResult nom = nominal_gamma(ext_nom, base_bisection(cfg, T));
    row.gamma_nom = nom.gamma;
    row.rde_evaluations = nom.evaluations;

    OptimizerConfig oc;
    oc.n_p_min = cfg.n_p_min;
    oc.k_f = cfg.k_f;
    oc.k_cr = cfg.k_cr;
    oc.seed = cfg.seed + std::uint64_t(index);
    oc.workers = cfg.workers;
    oc.gamma_lim = nom.gamma;
    oc.bisection = base_bisection(cfg, T);
    oc.bisection.gamma_lb = nom.gamma;
    oc.bisection.gamma_ub = cfg.gamma_ub_factor * nom.gamma;

    const Eigen::Index n_m = stack.nVars();
    if (have_previous) {
      oc.n_p_max = cfg.n_p_max_warm;
      oc.i_max = cfg.i_max_warm;
      oc.k_iqc = 1.0;
      oc.initial_guesses = {previous_x};
      // Narrow the exponent space around the previous optimum; the sign
      // surrogates keep their full range.
      oc.s_min = previous_x.head(n_m).array() - cfg.warm_band;
      oc.s_max = previous_x.head(n_m).array() + cfg.warm_band;
    } else {
      oc.n_p_max = cfg.n_p_max_first;
      oc.i_max = cfg.i_max_first;
      oc.k_iqc = cfg.k_iqc_first;
      oc.s_min = VectorXd::Constant(n_m, cfg.exp_min);
      oc.s_max = VectorXd::Constant(n_m, cfg.exp_max);
    }

    const OptimizerResult opt = optimize(oc, plant, stack);
    row.gamma_wc = opt.gamma_best;
    row.rde_evaluations += opt.rde_evaluations;
    row.iterations = opt.iterations;
    row.bound_scale = opt.final_bound_scale;
    row.values_best = opt.values_best;
    row.wall_s = elapsed_s(row_start);

    if (opt.gamma_best < kInfeasibleGamma) {
      previous_x = opt.best.x;
      have_previous = true;
    }

    if (on_row) on_row(row);
    result.rows.push_back(std::move(row));
    ++index;

    if (cfg.wall_clock_budget > 0.0 && elapsed_s(start) > cfg.wall_clock_budget) {
      result.budget_exhausted = true;
      break;
    }
  }
  return result;
}

void write_analysis_csv(const AnalysisResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write results file: " + path);
  out.precision(12);
  out << "T_i,gamma_nom,gamma_wc,rde_evaluations,iterations,bound_scale,wall_s\n";
  for (const AnalysisRow& row : result.rows) {
    out << row.T << "," << row.gamma_nom << "," << row.gamma_wc << ","
        << row.rde_evaluations << "," << row.iterations << "," << row.bound_scale << ","
        << row.wall_s << "\n";
  }
}

}  // namespace ltvwc

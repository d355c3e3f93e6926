#include "ltvwc/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace ltvwc {

namespace {

GainMetric metric_from_string(const std::string& s) {
  if (s == "l2-to-euclidean") return GainMetric::L2ToEuclidean;
  if (s == "l2-to-l2") return GainMetric::L2ToL2;
  throw std::invalid_argument("unknown metric: " + s);
}

std::string metric_to_string(GainMetric m) {
  return m == GainMetric::L2ToEuclidean ? "l2-to-euclidean" : "l2-to-l2";
}

}  // namespace

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  nlohmann::json j;
  in >> j;

  AnalysisConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "model") cfg.model = value.get<std::string>();
    else if (key == "metric") cfg.metric = metric_from_string(value.get<std::string>());
    else if (key == "horizon_start") cfg.horizon_start = value.get<double>();
    else if (key == "t_grid_start") cfg.t_grid_start = value.get<double>();
    else if (key == "t_grid_end") cfg.t_grid_end = value.get<double>();
    else if (key == "t_grid_step") cfg.t_grid_step = value.get<double>();
    else if (key == "n_p_max_first") cfg.n_p_max_first = value.get<int>();
    else if (key == "n_p_max_warm") cfg.n_p_max_warm = value.get<int>();
    else if (key == "n_p_min") cfg.n_p_min = value.get<int>();
    else if (key == "i_max_first") cfg.i_max_first = value.get<int>();
    else if (key == "i_max_warm") cfg.i_max_warm = value.get<int>();
    else if (key == "k_f") cfg.k_f = value.get<int>();
    else if (key == "k_cr") cfg.k_cr = value.get<int>();
    else if (key == "k_iqc_first") cfg.k_iqc_first = value.get<double>();
    else if (key == "eps_bs") cfg.eps_bs = value.get<double>();
    else if (key == "gamma_ub_factor") cfg.gamma_ub_factor = value.get<double>();
    else if (key == "exp_min") cfg.exp_min = value.get<double>();
    else if (key == "exp_max") cfg.exp_max = value.get<double>();
    else if (key == "warm_band") cfg.warm_band = value.get<double>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "workers") cfg.workers = value.get<int>();
    else if (key == "out_dir") cfg.out_dir = value.get<std::string>();
    else if (key == "wall_clock_budget") cfg.wall_clock_budget = value.get<double>();
    else if (key == "mc_seeds") cfg.mc_seeds = value.get<int>();
    else if (key == "mc_noise_scale") cfg.mc_noise_scale = value.get<double>();
    else if (key == "wind_profiles") cfg.wind_profiles = value.get<int>();
    else if (key == "wind_segments") cfg.wind_segments = value.get<int>();
    else throw std::invalid_argument("unknown config key: " + key);
  }
  if (!(cfg.t_grid_step > 0.0)) throw std::invalid_argument("t_grid_step must be > 0");
  if (cfg.t_grid_start < cfg.horizon_start)
    throw std::invalid_argument("final-time grid starts before the horizon");
  return cfg;
}

void save_config(const AnalysisConfig& cfg, const std::string& path) {
  nlohmann::json j{{"model", cfg.model},
                   {"metric", metric_to_string(cfg.metric)},
                   {"horizon_start", cfg.horizon_start},
                   {"t_grid_start", cfg.t_grid_start},
                   {"t_grid_end", cfg.t_grid_end},
                   {"t_grid_step", cfg.t_grid_step},
                   {"n_p_max_first", cfg.n_p_max_first},
                   {"n_p_max_warm", cfg.n_p_max_warm},
                   {"n_p_min", cfg.n_p_min},
                   {"i_max_first", cfg.i_max_first},
                   {"i_max_warm", cfg.i_max_warm},
                   {"k_f", cfg.k_f},
                   {"k_cr", cfg.k_cr},
                   {"k_iqc_first", cfg.k_iqc_first},
                   {"eps_bs", cfg.eps_bs},
                   {"gamma_ub_factor", cfg.gamma_ub_factor},
                   {"exp_min", cfg.exp_min},
                   {"exp_max", cfg.exp_max},
                   {"warm_band", cfg.warm_band},
                   {"seed", cfg.seed},
                   {"workers", cfg.workers},
                   {"out_dir", cfg.out_dir},
                   {"wall_clock_budget", cfg.wall_clock_budget},
                   {"mc_seeds", cfg.mc_seeds},
                   {"mc_noise_scale", cfg.mc_noise_scale},
                   {"wind_profiles", cfg.wind_profiles},
                   {"wind_segments", cfg.wind_segments}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace ltvwc

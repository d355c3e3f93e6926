#include "ltvwc/launcher/dataset.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace ltvwc::launcher {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Table1D::Table1D(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size() || x_.size() < 2)
    throw std::invalid_argument("table needs at least two matching samples");
  for (std::size_t k = 1; k < x_.size(); ++k)
    if (!(x_[k] > x_[k - 1])) throw std::invalid_argument("table grid not increasing");
}

double Table1D::eval(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  std::size_t k = 1;
  while (x_[k] < x) ++k;
  const double s = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
  return y_[k - 1] + s * (y_[k] - y_[k - 1]);
}

LauncherParams toy_dataset() {
  LauncherParams p;

  // Stage 1 burns until 110 s (the analysis horizon ends at 95 s), stage
  // separation at 112 s, stage 2 until 230 s.
  p.mass = Table1D({0.0, 110.0, 112.0, 230.0}, {140000.0, 40000.0, 28000.0, 10000.0});
  p.inertia = Table1D({0.0, 110.0, 112.0, 230.0}, {7.3e6, 2.1e6, 1.1e6, 4.0e5});
  p.thrust = Table1D({0.0, 109.0, 112.0, 230.0}, {2.20e6, 2.30e6, 6.5e5, 6.5e5});
  p.l_cg = Table1D({0.0, 110.0, 112.0, 230.0}, {10.0, 12.2, 8.0, 7.0});
  p.l_ga_t = Table1D({0.0, 110.0, 230.0}, {1.2, 2.4, 2.0});
  p.l_ga_ma = Table1D({0.0, 0.8, 1.0, 1.2, 2.0, 5.0}, {0.0, 0.2, 0.5, 0.4, 0.1, 0.0});

  p.c_n_alpha = Table1D({0.0, 0.8, 1.05, 1.3, 2.0, 5.0}, {2.0, 2.6, 3.5, 3.1, 2.7, 2.4});
  p.c_x0 = Table1D({0.0, 0.8, 1.05, 1.3, 2.0, 5.0}, {0.30, 0.38, 0.62, 0.55, 0.42, 0.34});
  p.c_x_alpha = Table1D({0.0, 1.05, 5.0}, {0.08, 0.14, 0.10});
  p.s_ref = 7.07;  // 3 m diameter
  p.qalpha_lim = 220000.0;

  // Light turbulence, strongest in the 3-9 km band and negligible above
  // the tropopause.
  p.sigma_w = Table1D({0.0, 3000.0, 6000.0, 9000.0, 11000.0, 13000.0, 20000.0, 30000.0},
                      {0.9, 1.4, 1.6, 1.0, 0.4, 0.05, 0.02, 0.01});
  p.scale_w = Table1D({0.0, 2000.0, 5000.0, 30000.0}, {200.0, 300.0, 533.0, 533.0});

  p.tvc_a2 = 0.000374;
  p.tvc_a1 = 0.0384;

  p.gains = {2.0, 0.5, 1.0, 0.02};

  p.turn_t_end = 100.0;
  p.turn_h0 = 0.0;
  // Terminal state of the turn flown from theta = 89.2 deg, xdot = 35 m/s;
  // storing it as the target keeps the boundary-value problem solvable by
  // construction.
  p.turn_target_h = 51767.0;
  p.turn_target_theta = 0.8933;
  p.turn_guess_theta = 88.9 * kPi / 180.0;
  p.turn_guess_xdot = 30.0;

  return p;
}

namespace {

nlohmann::json table_to_json(const Table1D& t) {
  return nlohmann::json{{"x", t.xs()}, {"y", t.ys()}};
}

Table1D table_from_json(const nlohmann::json& j) {
  return Table1D(j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>());
}

}  // namespace

void save_dataset(const LauncherParams& p, const std::string& path) {
  nlohmann::json j;
  j["mass"] = table_to_json(p.mass);
  j["inertia"] = table_to_json(p.inertia);
  j["thrust"] = table_to_json(p.thrust);
  j["l_cg"] = table_to_json(p.l_cg);
  j["l_ga_t"] = table_to_json(p.l_ga_t);
  j["l_ga_ma"] = table_to_json(p.l_ga_ma);
  j["c_n_alpha"] = table_to_json(p.c_n_alpha);
  j["c_x0"] = table_to_json(p.c_x0);
  j["c_x_alpha"] = table_to_json(p.c_x_alpha);
  j["sigma_w"] = table_to_json(p.sigma_w);
  j["scale_w"] = table_to_json(p.scale_w);
  j["s_ref"] = p.s_ref;
  j["qalpha_lim"] = p.qalpha_lim;
  j["tvc_a2"] = p.tvc_a2;
  j["tvc_a1"] = p.tvc_a1;
  j["gains"] = {{"kp", p.gains.kp}, {"ki", p.gains.ki}, {"kd", p.gains.kd},
                {"t_filter", p.gains.t_filter}};
  j["turn"] = {{"t_end", p.turn_t_end},       {"h0", p.turn_h0},
               {"target_h", p.turn_target_h}, {"target_theta", p.turn_target_theta},
               {"guess_theta", p.turn_guess_theta}, {"guess_xdot", p.turn_guess_xdot}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << j.dump(2) << "\n";
}

LauncherParams load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read dataset file: " + path);
  nlohmann::json j;
  in >> j;
  LauncherParams p;
  p.mass = table_from_json(j.at("mass"));
  p.inertia = table_from_json(j.at("inertia"));
  p.thrust = table_from_json(j.at("thrust"));
  p.l_cg = table_from_json(j.at("l_cg"));
  p.l_ga_t = table_from_json(j.at("l_ga_t"));
  p.l_ga_ma = table_from_json(j.at("l_ga_ma"));
  p.c_n_alpha = table_from_json(j.at("c_n_alpha"));
  p.c_x0 = table_from_json(j.at("c_x0"));
  p.c_x_alpha = table_from_json(j.at("c_x_alpha"));
  p.sigma_w = table_from_json(j.at("sigma_w"));
  p.scale_w = table_from_json(j.at("scale_w"));
  p.s_ref = j.at("s_ref").get<double>();
  p.qalpha_lim = j.at("qalpha_lim").get<double>();
  p.tvc_a2 = j.at("tvc_a2").get<double>();
  p.tvc_a1 = j.at("tvc_a1").get<double>();
  const auto& g = j.at("gains");
  p.gains = {g.at("kp").get<double>(), g.at("ki").get<double>(), g.at("kd").get<double>(),
             g.at("t_filter").get<double>()};
  const auto& t = j.at("turn");
  p.turn_t_end = t.at("t_end").get<double>();
  p.turn_h0 = t.at("h0").get<double>();
  p.turn_target_h = t.at("target_h").get<double>();
  p.turn_target_theta = t.at("target_theta").get<double>();
  p.turn_guess_theta = t.at("guess_theta").get<double>();
  p.turn_guess_xdot = t.at("guess_xdot").get<double>();
  return p;
}

}  // namespace ltvwc::launcher

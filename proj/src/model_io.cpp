#include "ltvwc/model_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace ltvwc {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void save_matrix_csv(const MatrixFunction& f, const std::string& name,
                     const std::filesystem::path& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << "t";
  for (Eigen::Index i = 0; i < f.rows(); ++i)
    for (Eigen::Index j = 0; j < f.cols(); ++j)
      os << "," << name << "[" << i << "][" << j << "]";
  os << "\n";
  for (std::size_t k = 0; k < f.grid().size(); ++k) {
    os << fmt(f.grid()[k]);
    const MatrixXd& M = f.samples()[k];
    for (Eigen::Index i = 0; i < M.rows(); ++i)
      for (Eigen::Index j = 0; j < M.cols(); ++j) os << "," << fmt(M(i, j));
    os << "\n";
  }
}

MatrixFunction load_matrix_csv(const std::filesystem::path& file, Eigen::Index rows,
                               Eigen::Index cols) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  std::string line;
  std::getline(is, line);  // header
  std::vector<double> times;
  std::vector<MatrixXd> samples;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    times.push_back(std::stod(cell));
    MatrixXd M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) {
        if (!std::getline(ss, cell, ','))
          throw std::runtime_error("short row in " + file.string());
        M(i, j) = std::stod(cell);
      }
    samples.push_back(std::move(M));
  }
  return MatrixFunction(TimeGrid(std::move(times)), std::move(samples));
}

void save_model(const TimeVaryingStateSpace& sys, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_matrix_csv(sys.A(), "A", dir / "A.csv");
  save_matrix_csv(sys.B(), "B", dir / "B.csv");
  save_matrix_csv(sys.C(), "C", dir / "C.csv");
  save_matrix_csv(sys.D(), "D", dir / "D.csv");

  nlohmann::json man;
  man["nx"] = sys.nx();
  man["nin"] = sys.nin();
  man["nout"] = sys.nout();
  auto channels = [](const ChannelMap& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, sl] : m) j[name] = {{"offset", sl.offset}, {"width", sl.width}};
    return j;
  };
  man["inputs"] = channels(sys.inChannels());
  man["outputs"] = channels(sys.outChannels());
  std::ofstream os(dir / "manifest.json");
  os << man.dump(2) << "\n";
}

TimeVaryingStateSpace load_model(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw std::runtime_error("cannot read manifest in " + dir.string());
  nlohmann::json man = nlohmann::json::parse(is);
  Eigen::Index nx = man.at("nx"), nin = man.at("nin"), nout = man.at("nout");
  auto channels = [](const nlohmann::json& j) {
    ChannelMap m;
    for (auto it = j.begin(); it != j.end(); ++it)
      m[it.key()] = Slice{it.value().at("offset"), it.value().at("width")};
    return m;
  };
  return TimeVaryingStateSpace(load_matrix_csv(dir / "A.csv", nx, nx),
                               load_matrix_csv(dir / "B.csv", nx, nin),
                               load_matrix_csv(dir / "C.csv", nout, nx),
                               load_matrix_csv(dir / "D.csv", nout, nin),
                               channels(man.value("inputs", nlohmann::json::object())),
                               channels(man.value("outputs", nlohmann::json::object())));
}

}  // namespace ltvwc

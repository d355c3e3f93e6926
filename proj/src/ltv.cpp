#include "ltvwc/ltv.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ltvwc {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw std::invalid_argument("TimeGrid needs at least 2 points");
  for (std::size_t k = 0; k + 1 < times_.size(); ++k) {
    if (!(times_[k + 1] > times_[k]))
      throw std::invalid_argument("TimeGrid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double t0, double t1, double dt) {
  if (!(dt > 0.0) || !(t1 > t0)) throw std::invalid_argument("bad uniform grid");
  std::vector<double> ts;
  for (double t = t0; t < t1 - 0.5 * dt; t += dt) ts.push_back(t);
  ts.push_back(t1);
  return TimeGrid(std::move(ts));
}

std::size_t TimeGrid::bracket(double t) const {
  if (t < times_.front() || t > times_.back())
    throw std::out_of_range("time outside grid");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = (it == times_.begin()) ? 0 : std::size_t(it - times_.begin()) - 1;
  if (k + 1 >= times_.size()) k = times_.size() - 2;
  return k;
}

MatrixFunction::MatrixFunction(TimeGrid grid, std::vector<MatrixXd> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size())
    throw std::invalid_argument("sample count must match grid length");
  for (const auto& s : samples_) {
    if (s.rows() != samples_.front().rows() || s.cols() != samples_.front().cols())
      throw std::invalid_argument("all samples must share one shape");
  }
}

MatrixFunction MatrixFunction::constant(const TimeGrid& grid, const MatrixXd& value) {
  return MatrixFunction(grid, std::vector<MatrixXd>(grid.size(), value));
}

MatrixXd MatrixFunction::eval(double t) const {
  std::size_t k = grid_.bracket(t);
  double t0 = grid_[k], t1 = grid_[k + 1];
  double a = (t - t0) / (t1 - t0);
  if (a <= 0.0) return samples_[k];
  if (a >= 1.0) return samples_[k + 1];
  return (1.0 - a) * samples_[k] + a * samples_[k + 1];
}

LtiStateSpace::LtiStateSpace(MatrixXd A_, MatrixXd B_, MatrixXd C_, MatrixXd D_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), D(std::move(D_)) {
  if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
  if (B.rows() != A.rows() || C.cols() != A.rows() || D.rows() != C.rows() ||
      D.cols() != B.cols())
    throw std::invalid_argument("inconsistent state-space dimensions");
}

LtiStateSpace LtiStateSpace::gain(const MatrixXd& D) {
  return LtiStateSpace(MatrixXd::Zero(0, 0), MatrixXd::Zero(0, D.cols()),
                       MatrixXd::Zero(D.rows(), 0), D);
}

Eigen::MatrixXcd LtiStateSpace::transfer(std::complex<double> s) const {
  if (nx() == 0) return D.cast<std::complex<double>>();
  Eigen::MatrixXcd sIA = s * Eigen::MatrixXcd::Identity(nx(), nx()) -
                         A.cast<std::complex<double>>();
  return C.cast<std::complex<double>>() * sIA.lu().solve(B.cast<std::complex<double>>()) +
         D.cast<std::complex<double>>();
}

TimeVaryingStateSpace::TimeVaryingStateSpace(MatrixFunction A, MatrixFunction B,
                                             MatrixFunction C, MatrixFunction D,
                                             ChannelMap in_channels,
                                             ChannelMap out_channels)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)),
      in_(std::move(in_channels)), out_(std::move(out_channels)) {
  if (A_.rows() != A_.cols()) throw std::invalid_argument("A must be square");
  if (B_.rows() != A_.rows() || C_.cols() != A_.rows() || D_.rows() != C_.rows() ||
      D_.cols() != B_.cols())
    throw std::invalid_argument("inconsistent state-space dimensions");
  if (!(A_.grid() == B_.grid()) || !(A_.grid() == C_.grid()) || !(A_.grid() == D_.grid()))
    throw std::invalid_argument("all matrix functions must share one grid");
  for (const auto& [name, sl] : in_) {
    if (sl.offset < 0 || sl.offset + sl.width > nin())
      throw std::invalid_argument("input channel '" + name + "' out of range");
  }
  for (const auto& [name, sl] : out_) {
    if (sl.offset < 0 || sl.offset + sl.width > nout())
      throw std::invalid_argument("output channel '" + name + "' out of range");
  }
}

Slice TimeVaryingStateSpace::inChannel(const std::string& name) const {
  auto it = in_.find(name);
  if (it == in_.end()) throw std::invalid_argument("no input channel '" + name + "'");
  return it->second;
}

Slice TimeVaryingStateSpace::outChannel(const std::string& name) const {
  auto it = out_.find(name);
  if (it == out_.end()) throw std::invalid_argument("no output channel '" + name + "'");
  return it->second;
}

TimeVaryingStateSpace TimeVaryingStateSpace::withChannels(ChannelMap in,
                                                          ChannelMap out) const {
  return TimeVaryingStateSpace(A_, B_, C_, D_, std::move(in), std::move(out));
}

TimeVaryingStateSpace lift_lti(const LtiStateSpace& sys, const TimeGrid& grid) {
  return TimeVaryingStateSpace(MatrixFunction::constant(grid, sys.A),
                               MatrixFunction::constant(grid, sys.B),
                               MatrixFunction::constant(grid, sys.C),
                               MatrixFunction::constant(grid, sys.D));
}

namespace {

std::vector<MatrixXd> mapGrid(const TimeGrid& grid,
                              const std::function<MatrixXd(std::size_t)>& f) {
  std::vector<MatrixXd> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out.push_back(f(k));
  return out;
}

}  // namespace

TimeVaryingStateSpace series(const TimeVaryingStateSpace& first,
                             const TimeVaryingStateSpace& second) {
  if (first.nout() != second.nin())
    throw std::invalid_argument("series: dimension mismatch");
  if (!(first.grid() == second.grid()))
    throw std::invalid_argument("series: grid mismatch");
  const TimeGrid& g = first.grid();
  const Eigen::Index n1 = first.nx(), n2 = second.nx();

  auto A = mapGrid(g, [&](std::size_t k) {
    MatrixXd M = MatrixXd::Zero(n1 + n2, n1 + n2);
    M.topLeftCorner(n1, n1) = first.A().samples()[k];
    M.bottomLeftCorner(n2, n1) = second.B().samples()[k] * first.C().samples()[k];
    M.bottomRightCorner(n2, n2) = second.A().samples()[k];
    return M;
  });
  auto B = mapGrid(g, [&](std::size_t k) {
    MatrixXd M(n1 + n2, first.nin());
    M.topRows(n1) = first.B().samples()[k];
    M.bottomRows(n2) = second.B().samples()[k] * first.D().samples()[k];
    return M;
  });
  auto C = mapGrid(g, [&](std::size_t k) {
    MatrixXd M(second.nout(), n1 + n2);
    M.leftCols(n1) = second.D().samples()[k] * first.C().samples()[k];
    M.rightCols(n2) = second.C().samples()[k];
    return M;
  });
  auto D = mapGrid(g, [&](std::size_t k) {
    return MatrixXd(second.D().samples()[k] * first.D().samples()[k]);
  });
  return TimeVaryingStateSpace(MatrixFunction(g, A), MatrixFunction(g, B),
                               MatrixFunction(g, C), MatrixFunction(g, D));
}

TimeVaryingStateSpace append(const TimeVaryingStateSpace& a,
                             const TimeVaryingStateSpace& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("append: grid mismatch");
  const TimeGrid& g = a.grid();
  auto blk = [&](const MatrixFunction& fa, const MatrixFunction& fb) {
    auto samples = mapGrid(g, [&](std::size_t k) {
      MatrixXd M = MatrixXd::Zero(fa.rows() + fb.rows(), fa.cols() + fb.cols());
      M.topLeftCorner(fa.rows(), fa.cols()) = fa.samples()[k];
      M.bottomRightCorner(fb.rows(), fb.cols()) = fb.samples()[k];
      return M;
    });
    return MatrixFunction(g, samples);
  };
  return TimeVaryingStateSpace(blk(a.A(), b.A()), blk(a.B(), b.B()),
                               blk(a.C(), b.C()), blk(a.D(), b.D()));
}

LtiStateSpace append(const LtiStateSpace& a, const LtiStateSpace& b) {
  auto blk = [](const MatrixXd& ma, const MatrixXd& mb) {
    MatrixXd M = MatrixXd::Zero(ma.rows() + mb.rows(), ma.cols() + mb.cols());
    M.topLeftCorner(ma.rows(), ma.cols()) = ma;
    M.bottomRightCorner(mb.rows(), mb.cols()) = mb;
    return M;
  };
  return LtiStateSpace(blk(a.A, b.A), blk(a.B, b.B), blk(a.C, b.C), blk(a.D, b.D));
}

TimeVaryingStateSpace connect(const TimeVaryingStateSpace& sys, const MatrixXd& Wyu,
                              const MatrixXd& Wue, const MatrixXd& Sy) {
  if (Wyu.rows() != sys.nin() || Wyu.cols() != sys.nout() ||
      Wue.rows() != sys.nin() || Sy.cols() != sys.nout())
    throw std::invalid_argument("connect: wiring dimensions inconsistent");
  const TimeGrid& g = sys.grid();
  const Eigen::Index nx = sys.nx(), ne = Wue.cols();

  std::vector<MatrixXd> A(g.size()), B(g.size()), C(g.size()), D(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const MatrixXd& Dk = sys.D().samples()[k];
    MatrixXd loop = MatrixXd::Identity(sys.nin(), sys.nin()) - Wyu * Dk;
    Eigen::FullPivLU<MatrixXd> lu(loop);
    if (!lu.isInvertible())
      throw std::runtime_error("connect: loop not well posed at grid point " +
                               std::to_string(k));
    // u = (I - Wyu D)^{-1} (Wyu C x + Wue u_ext)
    MatrixXd Ux = lu.solve(Wyu * sys.C().samples()[k]);
    MatrixXd Ue = lu.solve(Wue);
    A[k] = sys.A().samples()[k] + sys.B().samples()[k] * Ux;
    B[k] = sys.B().samples()[k] * Ue;
    MatrixXd Cfull = sys.C().samples()[k] + Dk * Ux;
    MatrixXd Dfull = Dk * Ue;
    C[k] = Sy * Cfull;
    D[k] = Sy * Dfull;
  }
  (void)nx;
  (void)ne;
  return TimeVaryingStateSpace(MatrixFunction(g, A), MatrixFunction(g, B),
                               MatrixFunction(g, C), MatrixFunction(g, D));
}

TimeVaryingStateSpace feedback_output_to_input(const TimeVaryingStateSpace& sys,
                                               const Slice& out_slice,
                                               const Slice& in_slice, double sign) {
  if (out_slice.width != in_slice.width)
    throw std::invalid_argument("feedback: slice widths differ");
  MatrixXd Wyu = MatrixXd::Zero(sys.nin(), sys.nout());
  Wyu.block(in_slice.offset, out_slice.offset, in_slice.width, out_slice.width) =
      sign * MatrixXd::Identity(in_slice.width, in_slice.width);
  // External inputs: everything except the fed-back input slice.
  const Eigen::Index ne = sys.nin() - in_slice.width;
  MatrixXd Wue = MatrixXd::Zero(sys.nin(), ne);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < sys.nin(); ++i) {
    if (i >= in_slice.offset && i < in_slice.offset + in_slice.width) continue;
    Wue(i, col++) = 1.0;
  }
  // Outputs: everything except the fed-back output slice.
  const Eigen::Index no = sys.nout() - out_slice.width;
  MatrixXd Sy = MatrixXd::Zero(no, sys.nout());
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < sys.nout(); ++i) {
    if (i >= out_slice.offset && i < out_slice.offset + out_slice.width) continue;
    Sy(row++, i) = 1.0;
  }
  return connect(sys, Wyu, Wue, Sy);
}

std::vector<VectorXd> simulate(const TimeVaryingStateSpace& sys,
                               const std::vector<double>& times,
                               const std::vector<VectorXd>& u, const VectorXd& x0) {
  if (u.size() != times.size())
    throw std::invalid_argument("simulate: input length mismatch");
  VectorXd x = x0;
  std::vector<VectorXd> y;
  y.reserve(times.size());
  auto uAt = [&](std::size_t k, double a) -> VectorXd {
    if (k + 1 >= u.size()) return u[k];
    return (1.0 - a) * u[k] + a * u[k + 1];
  };
  for (std::size_t k = 0; k < times.size(); ++k) {
    y.push_back(sys.C().eval(times[k]) * x + sys.D().eval(times[k]) * u[k]);
    if (k + 1 == times.size()) break;
    double t = times[k], h = times[k + 1] - times[k];
    auto f = [&](double tau, const VectorXd& xs, double a) {
      return VectorXd(sys.A().eval(tau) * xs + sys.B().eval(tau) * uAt(k, a));
    };
    VectorXd k1 = f(t, x, 0.0);
    VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1, 0.5);
    VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2, 0.5);
    VectorXd k4 = f(t + h, x + h * k3, 1.0);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

}  // namespace ltvwc

#pragma once

#include <Eigen/Dense>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ltvwc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Strictly increasing sequence of time instants carrying all time dependence.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> times);

  /// Uniform grid on [t0, t1] with step dt (last point snapped to t1).
  static TimeGrid uniform(double t0, double t1, double dt);

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  double front() const { return times_.front(); }
  double back() const { return times_.back(); }
  double operator[](std::size_t k) const { return times_[k]; }

  /// Index of the interval [times[k], times[k+1]] containing t.
  /// Throws std::out_of_range if t lies outside the grid.
  std::size_t bracket(double t) const;

  bool operator==(const TimeGrid& other) const { return times_ == other.times_; }

 private:
  std::vector<double> times_;
};

/// Matrix-valued function of time, sampled on a TimeGrid and linearly
/// interpolated in every entry. Evaluation outside the grid is an error.
class MatrixFunction {
 public:
  MatrixFunction(TimeGrid grid, std::vector<MatrixXd> samples);

  /// Constant function on the given grid.
  static MatrixFunction constant(const TimeGrid& grid, const MatrixXd& value);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<MatrixXd>& samples() const { return samples_; }
  Eigen::Index rows() const { return samples_.front().rows(); }
  Eigen::Index cols() const { return samples_.front().cols(); }

  MatrixXd eval(double t) const;

 private:
  TimeGrid grid_;
  std::vector<MatrixXd> samples_;
};

/// Constant state-space system (houses IQC filters, actuators, controllers).
struct LtiStateSpace {
  MatrixXd A, B, C, D;

  LtiStateSpace() = default;
  LtiStateSpace(MatrixXd A_, MatrixXd B_, MatrixXd C_, MatrixXd D_);

  /// Static gain (no states).
  static LtiStateSpace gain(const MatrixXd& D);

  Eigen::Index nx() const { return A.rows(); }
  Eigen::Index nin() const { return D.cols(); }
  Eigen::Index nout() const { return D.rows(); }

  /// Frozen transfer matrix C (sI - A)^{-1} B + D.
  Eigen::MatrixXcd transfer(std::complex<double> s) const;
};

/// Named contiguous index range inside an input or output vector.
struct Slice {
  Eigen::Index offset = 0;
  Eigen::Index width = 0;
};

using ChannelMap = std::map<std::string, Slice>;

/// Time-gridded LTV state-space system with named input/output channels.
class TimeVaryingStateSpace {
 public:
  TimeVaryingStateSpace(MatrixFunction A, MatrixFunction B, MatrixFunction C,
                        MatrixFunction D, ChannelMap in_channels = {},
                        ChannelMap out_channels = {});

  Eigen::Index nx() const { return A_.rows(); }
  Eigen::Index nin() const { return B_.cols(); }
  Eigen::Index nout() const { return C_.rows(); }

  const MatrixFunction& A() const { return A_; }
  const MatrixFunction& B() const { return B_; }
  const MatrixFunction& C() const { return C_; }
  const MatrixFunction& D() const { return D_; }
  const TimeGrid& grid() const { return A_.grid(); }

  const ChannelMap& inChannels() const { return in_; }
  const ChannelMap& outChannels() const { return out_; }
  Slice inChannel(const std::string& name) const;
  Slice outChannel(const std::string& name) const;

  TimeVaryingStateSpace withChannels(ChannelMap in, ChannelMap out) const;

 private:
  MatrixFunction A_, B_, C_, D_;
  ChannelMap in_, out_;
};

/// Embed a constant system onto a grid; every sample equals the LTI matrices.
TimeVaryingStateSpace lift_lti(const LtiStateSpace& sys, const TimeGrid& grid);

/// Series composition second ∘ first (output of first feeds second).
TimeVaryingStateSpace series(const TimeVaryingStateSpace& first,
                             const TimeVaryingStateSpace& second);

/// Diagonal (parallel, uncoupled) combination of two systems.
TimeVaryingStateSpace append(const TimeVaryingStateSpace& a,
                             const TimeVaryingStateSpace& b);
LtiStateSpace append(const LtiStateSpace& a, const LtiStateSpace& b);

/// Close the loop u[in_slice] += sign * y[out_slice]; the named channels are
/// eliminated from the interconnection. Throws if (I - sign*D_sub) is
/// singular at any grid point (loop not well posed).
TimeVaryingStateSpace feedback_output_to_input(const TimeVaryingStateSpace& sys,
                                               const Slice& out_slice,
                                               const Slice& in_slice,
                                               double sign);

/// General wiring closure: u = Wyu * y + Wue * u_ext, then keep the output
/// rows selected by Sy. Solves the frozen-time loop at every grid point.
TimeVaryingStateSpace connect(const TimeVaryingStateSpace& sys,
                              const MatrixXd& Wyu, const MatrixXd& Wue,
                              const MatrixXd& Sy);

/// Fixed-step RK4 simulation of an LTV system, u sampled at the given times.
/// Returns the outputs at the same times. Used by tests and the benchmark.
std::vector<VectorXd> simulate(const TimeVaryingStateSpace& sys,
                               const std::vector<double>& times,
                               const std::vector<VectorXd>& u,
                               const VectorXd& x0);

}  // namespace ltvwc

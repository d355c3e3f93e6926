#include "ltvwc/launcher/wind.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>
#include <unsupported/Eigen/FFT>

#include "ltvwc/launcher/atmosphere.hpp"

namespace ltvwc::launcher {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

std::vector<std::vector<double>> generate_wind_profiles(const LauncherParams& p,
                                                        const TrajectoryRef& traj,
                                                        int n_profiles, double t0,
                                                        double tf, double fs,
                                                        std::uint64_t seed) {
  const double dt = 1.0 / fs;
  const std::size_t n = std::size_t(std::lround((tf - t0) / dt)) + 1;
  const double noise_std = std::sqrt(kPi / dt);

  std::vector<std::vector<double>> profiles(static_cast<std::size_t>(n_profiles));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (auto& profile : profiles) {
    profile.resize(n);
    double x1 = 0.0, x2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = t0 + double(k) * dt;
      const double h = traj.h_at(t);
      const double v = traj.xdot_at(t);
      const double sig = p.sigma_w.eval(h), len = p.scale_w.eval(h);
      const double a = v / len;
      profile[k] = sig * std::sqrt(len / (kPi * v)) * x1 +
                   sig * (len / v) * std::sqrt(3.0 * len / (kPi * v)) * x2;
      const double noise = noise_std * gauss(rng);
      // RK4 on the two filter states with the noise held over the step.
      auto f = [&](double y1, double y2) {
        return std::array<double, 2>{y2, -a * a * y1 - 2.0 * a * y2 + a * a * noise};
      };
      const auto k1 = f(x1, x2);
      const auto k2 = f(x1 + 0.5 * dt * k1[0], x2 + 0.5 * dt * k1[1]);
      const auto k3 = f(x1 + 0.5 * dt * k2[0], x2 + 0.5 * dt * k2[1]);
      const auto k4 = f(x1 + dt * k3[0], x2 + dt * k3[1]);
      x1 += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
      x2 += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    }
  }
  return profiles;
}

namespace {

/// Fit H(s) = g p / (s + p) to the envelope in the log domain: grid search
/// over the pole with the closed-form least-squares gain, then raise the
/// gain until |H| >= envelope at every bin.
void fit_first_order(WindFitSegment& seg) {
  const std::size_t n = seg.omega.size();
  double env_max = 0.0;
  for (double e : seg.envelope) env_max = std::max(env_max, e);
  if (env_max <= 1e-300) {  // zero profiles: zero-gain, stable placeholder
    seg.gain = 0.0;
    seg.pole = 1.0;
    seg.fit_mag.assign(n, 0.0);
    return;
  }

  auto shape = [&](double pole, std::size_t k) {
    return pole / std::sqrt(seg.omega[k] * seg.omega[k] + pole * pole);
  };

  double best_pole = 1.0, best_cost = std::numeric_limits<double>::infinity(),
         best_loggain = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double pole = std::pow(10.0, -2.0 + 5.0 * double(i) / 400.0);  // 1e-2..1e3
    double sum = 0.0;
    std::size_t m = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (seg.envelope[k] <= 1e-300) continue;
      sum += std::log(seg.envelope[k]) - std::log(shape(pole, k));
      ++m;
    }
    const double loggain = sum / double(m);
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (seg.envelope[k] <= 1e-300) continue;
      const double r = std::log(seg.envelope[k]) - loggain - std::log(shape(pole, k));
      cost += r * r;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best_pole = pole;
      best_loggain = loggain;
    }
  }

  // Raise the gain so the fit upper-bounds the envelope everywhere.
  double gain = std::exp(best_loggain);
  double lift = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (seg.envelope[k] <= 0.0) continue;
    lift = std::max(lift, seg.envelope[k] / (gain * shape(best_pole, k)));
  }
  if (!(lift < 1e9))
    throw std::runtime_error("wind-filter fit cannot upper-bound the envelope");
  gain *= lift;

  seg.gain = gain;
  seg.pole = best_pole;
  seg.fit_mag.resize(n);
  for (std::size_t k = 0; k < n; ++k) seg.fit_mag[k] = gain * shape(best_pole, k);
}

}  // namespace

WindFilterLtv fit_wind_filter_ltv(const std::vector<std::vector<double>>& profiles,
                                  double t0, double tf, double fs, int n_segments) {
  if (profiles.empty()) throw std::invalid_argument("no wind profiles");
  const double dt = 1.0 / fs;
  // Equal segments sized in whole samples; a remainder shorter than one
  // segment at the end of the horizon is not fitted.
  const std::size_t n_seg = profiles.front().size() / std::size_t(n_segments);
  if (n_seg < 8) throw std::invalid_argument("segments too short for a spectrum fit");
  const double seg_len = double(n_seg) * dt;
  const std::size_t n_bins = n_seg / 2 + 1;

  Eigen::FFT<double> fft;
  std::vector<WindFitSegment> segments(static_cast<std::size_t>(n_segments));
  std::vector<std::complex<double>> spectrum;
  std::vector<double> buffer(n_seg);

  for (int s = 0; s < n_segments; ++s) {
    WindFitSegment& seg = segments[std::size_t(s)];
    seg.t_mid = t0 + (double(s) + 0.5) * seg_len;
    seg.omega.resize(n_bins);
    for (std::size_t k = 0; k < n_bins; ++k)
      seg.omega[k] = 2.0 * kPi * double(k) / seg_len;
    seg.envelope.assign(n_bins, 0.0);

    const std::size_t offset = std::size_t(s) * n_seg;
    for (const auto& profile : profiles) {
      if (offset + n_seg > profile.size())
        throw std::invalid_argument("profiles shorter than the segmentation");
      std::copy(profile.begin() + long(offset), profile.begin() + long(offset + n_seg),
                buffer.begin());
      fft.fwd(spectrum, buffer);
      for (std::size_t k = 0; k < n_bins; ++k) {
        // Continuous-time periodogram: |dt X_k|^2 / (pi T), compared as a
        // magnitude (square root).
        const double psd = std::norm(dt * spectrum[k]) / (kPi * seg_len);
        seg.envelope[k] = std::max(seg.envelope[k], std::sqrt(psd));
      }
    }
    fit_first_order(seg);
  }

  // Interpolate (gain, pole) linearly over the segment midpoints, clamped to
  // the first/last segment outside the midpoint range.
  std::vector<double> grid_times;
  grid_times.push_back(t0);
  for (const auto& seg : segments) grid_times.push_back(seg.t_mid);
  grid_times.push_back(tf);
  TimeGrid grid(grid_times);

  std::vector<MatrixXd> As, Bs, Cs, Ds;
  auto push = [&](double gain, double pole) {
    As.push_back(MatrixXd::Constant(1, 1, -pole));
    Bs.push_back(MatrixXd::Constant(1, 1, pole));
    Cs.push_back(MatrixXd::Constant(1, 1, gain));
    Ds.push_back(MatrixXd::Zero(1, 1));
  };
  push(segments.front().gain, segments.front().pole);
  for (const auto& seg : segments) push(seg.gain, seg.pole);
  push(segments.back().gain, segments.back().pole);

  ChannelMap in{{"d", {0, 1}}}, out{{"vw", {0, 1}}};
  WindFilterLtv result{{MatrixFunction(grid, As), MatrixFunction(grid, Bs),
                        MatrixFunction(grid, Cs), MatrixFunction(grid, Ds), in, out},
                       std::move(segments)};
  return result;
}

std::vector<double> truncate_disturbance(const std::vector<double>& d,
                                         const std::vector<double>& t, double T_i) {
  if (d.size() != t.size()) throw std::invalid_argument("signal/time size mismatch");
  std::vector<double> out = d;
  for (std::size_t k = 0; k < out.size(); ++k)
    if (t[k] > T_i) out[k] = 0.0;
  return out;
}

}  // namespace ltvwc::launcher

#pragma once

#include <cstdint>
#include <vector>

#include "ltvwc/launcher/trajectory.hpp"
#include "ltvwc/ltv.hpp"

namespace ltvwc::launcher {

/// Per-segment first-order magnitude bound fitted to the turbulence
/// spectrum envelope, plus the data it was fitted to.
struct WindFitSegment {
  double t_mid = 0.0;  // segment midpoint, s
  double gain = 0.0;   // H(s) = gain * pole / (s + pole)
  double pole = 1.0;   // rad/s, > 0
  std::vector<double> omega;     // rad/s, frequency bins
  std::vector<double> envelope;  // max periodogram magnitude across profiles
  std::vector<double> fit_mag;   // |H(j omega)| at the bins
};

/// Piecewise-linear interpolation of the per-segment (gain, pole) pairs into
/// one single-state LTV wind filter, input d, output vw.
struct WindFilterLtv {
  TimeVaryingStateSpace sys;
  std::vector<WindFitSegment> segments;
};

/// Simulate turbulence along the reference trajectory: sampled white noise
/// of unit power spectral density through the Dryden filter at the local
/// flight condition. Returns n_profiles series sampled at fs over [t0, tf].
std::vector<std::vector<double>> generate_wind_profiles(const LauncherParams& params,
                                                        const TrajectoryRef& traj,
                                                        int n_profiles, double t0,
                                                        double tf, double fs,
                                                        std::uint64_t seed);

/// Envelope fit over equidistant segments: per segment, the periodogram of
/// every profile is evaluated with the FFT, the pointwise maximum magnitude
/// is taken across profiles, and a stable minimum-phase first-order transfer
/// function is fitted in the log domain with its gain raised until it upper
/// bounds the envelope at every bin.
WindFilterLtv fit_wind_filter_ltv(const std::vector<std::vector<double>>& profiles,
                                  double t0, double tf, double fs = 100.0,
                                  int n_segments = 14);

/// Zero the signal after T_i (worst-case inputs are replayed over the whole
/// trajectory).
std::vector<double> truncate_disturbance(const std::vector<double>& d,
                                         const std::vector<double>& t, double T_i);

}  // namespace ltvwc::launcher

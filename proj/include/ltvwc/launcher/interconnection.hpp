#pragma once

#include "ltvwc/iqc.hpp"
#include "ltvwc/launcher/trajectory.hpp"
#include "ltvwc/launcher/wind.hpp"

namespace ltvwc::launcher {

/// IQC stack of the launcher uncertainty set: dynamic TVC uncertainty
/// (1 channel), the static-margin arm as a repeated real (2 occurrences:
/// normal-force and moment-arm paths), and the nozzle arm as a real scalar
/// (1 occurrence).
IqcStack make_launcher_stack();

struct InterconnectionOptions {
  double t_start = 25.0;
  double t_end = 95.0;
  double dt = 0.1;
  bool with_uncertainty = true;  // expose the v/w channels
  /// Perturb the coefficients with a fixed sample instead (closed channels,
  /// dead time as a second-order Pade stage). Forces with_uncertainty off.
  const UncertaintySample* fixed = nullptr;
};

/// Closed-loop analysis plant: wind filter -> launcher dynamics with the
/// tracking loop (PID, TVC, and for the uncertain variant the TVC weighting
/// filter) closed. Channels: inputs {w, d} / outputs {v, e} when the
/// uncertainty channels are exposed, {d} -> {e} otherwise. e is the
/// aerodynamic load in Pa deg.
TimeVaryingStateSpace build_analysis_interconnection(const LauncherParams& params,
                                                     const TrajectoryRef& traj,
                                                     const WindFilterLtv& wind,
                                                     const InterconnectionOptions& opts);

}  // namespace ltvwc::launcher

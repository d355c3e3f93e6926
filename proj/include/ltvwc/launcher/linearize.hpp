#pragma once

#include "ltvwc/launcher/trajectory.hpp"
#include "ltvwc/ltv.hpp"

namespace ltvwc::launcher {

/// Central-difference linearization of the pitch dynamics about the
/// reference trajectory on a uniform grid. States [theta, theta_dot, zdot]
/// (deviations), inputs [delta_tvc, v_w], outputs [theta, qalpha]. The
/// body-axis speed has no impact on the maximum aerodynamic load and is kept
/// frozen at its reference.
TimeVaryingStateSpace linearize(const LauncherParams& params, const TrajectoryRef& traj,
                                double t_start, double t_end, double dt = 0.1);

}  // namespace ltvwc::launcher

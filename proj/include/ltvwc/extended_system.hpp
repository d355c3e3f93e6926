#pragma once

#include <optional>

#include "ltvwc/iqc.hpp"
#include "ltvwc/ltv.hpp"

namespace ltvwc {

/// The assembled analysis system with state [x_plant; x_psi], inputs [w; d]
/// and outputs [z; e], plus block accessors used by the RDE assembly.
class ExtendedSystem {
 public:
  ExtendedSystem(TimeVaryingStateSpace sys, Eigen::Index n_w, Eigen::Index n_d,
                 Eigen::Index n_z, Eigen::Index n_e, Eigen::Index n_plant_states);

  const TimeVaryingStateSpace& sys() const { return sys_; }
  const TimeGrid& grid() const { return sys_.grid(); }
  Eigen::Index nx() const { return sys_.nx(); }
  Eigen::Index nW() const { return n_w_; }
  Eigen::Index nD() const { return n_d_; }
  Eigen::Index nZ() const { return n_z_; }
  Eigen::Index nE() const { return n_e_; }
  Eigen::Index nPlantStates() const { return n_plant_states_; }

  struct Blocks {
    MatrixXd A, B1, B2, C1, C2, D11, D12, D21, D22;
  };
  Blocks at(double t) const;

 private:
  TimeVaryingStateSpace sys_;
  Eigen::Index n_w_, n_d_, n_z_, n_e_, n_plant_states_;
};

/// Assemble the extended system: Psi is driven by [v; w] with v the plant
/// output and w external; z is Psi's output; e passes through.
/// Plant channels: inputs {w, d}, outputs {v, e} (w/v may be absent for an
/// empty stack).
ExtendedSystem build_extended(const TimeVaryingStateSpace& plant,
                              const IqcStack& stack);

/// Nominal extended system: no uncertainty channels, d -> e only.
ExtendedSystem build_extended_nominal(const TimeVaryingStateSpace& plant);

/// Drop the w/z channels and Psi states, keeping the d -> e map.
ExtendedSystem nominal_reduction(const ExtendedSystem& ext);

}  // namespace ltvwc

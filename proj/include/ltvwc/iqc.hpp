#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltvwc/ltv.hpp"

namespace ltvwc {

/// All-pass basis filter parameters: order nu and pole rho < 0.
struct BasisConfig {
  int nu = 1;
  double rho = -1.0;
};

enum class UncertaintyKind { RealRepeated, DynamicLti };

/// One declared uncertainty block: repeated real scalar or dynamic LTI,
/// with norm bound b and its basis filter.
struct UncertaintyDecl {
  UncertaintyKind kind = UncertaintyKind::RealRepeated;
  int n_v = 1;        // repetition count / channel width
  double bound = 1.0; // b > 0
  BasisConfig basis;
  std::string name;
};

/// Maps scalars of the flat decision vector into the X (and, for real
/// blocks, Y) matrices of the multiplier parameterization.
struct MultiplierTemplate {
  UncertaintyKind kind = UncertaintyKind::RealRepeated;
  Eigen::Index x_size = 0;        // X in S^{n_v(nu+1)}
  Eigen::Index n_vars = 0;        // per-block decision variable count
  double bound = 1.0;

  /// True for variables whose sign is fixed positive (diagonal of X).
  std::vector<bool> sign_fixed;

  /// Assemble M = [[b^2 X, Y],[Y^T, -X]] (Y absent for dynamic blocks)
  /// from the per-block slice of decision values.
  MatrixXd decode(const Eigen::Ref<const VectorXd>& values, double bound_scale) const;

  /// X > 0 via Cholesky; Y is skew by construction and needs no check.
  bool feasible(const Eigen::Ref<const VectorXd>& values) const;

  /// The X matrix alone (for diagnostics).
  MatrixXd decodeX(const Eigen::Ref<const VectorXd>& values) const;
};

/// Realizes psi_nu ⊗ I_n: outputs are the taps of a cascade of nu identical
/// all-pass sections (s+rho)/(s-rho), grouped tap-major.
LtiStateSpace build_basis_filter(const BasisConfig& cfg, Eigen::Index width);

struct IqcBlock {
  UncertaintyDecl decl;
  LtiStateSpace psi;  // blkdiag(psi_nu ⊗ I_nv, psi_nu ⊗ I_nv), inputs [v; w]
  MultiplierTemplate tmpl;
};

IqcBlock build_iqc_block(const UncertaintyDecl& decl);

/// Diagonal stack of IQC blocks. The combined filter takes the stacked
/// signal [v_1..v_k; w_1..w_k] and routes block i's filter to (v_i, w_i).
class IqcStack {
 public:
  explicit IqcStack(std::vector<IqcBlock> blocks);
  IqcStack() = default;

  const std::vector<IqcBlock>& blocks() const { return blocks_; }
  bool empty() const { return blocks_.empty(); }
  Eigen::Index vWidth() const { return v_width_; }   // total width of v (== w)
  Eigen::Index zWidth() const { return z_width_; }
  Eigen::Index nVars() const { return n_vars_; }
  double boundScale() const { return bound_scale_; }

  /// Combined Psi acting on [v_all; w_all].
  const LtiStateSpace& psi() const { return psi_; }

  /// Block-diagonal M from the full decision vector, with the current
  /// bound scale applied to every b.
  MatrixXd decode(const VectorXd& values) const;
  bool feasible(const VectorXd& values) const;

  /// Per-variable fixed-sign flags over the full decision vector.
  std::vector<bool> signFixed() const;

  /// Stack with every block's effective bound scaled by k_iqc (0 < k <= 1).
  IqcStack rescaled(double k_iqc) const;

 private:
  std::vector<IqcBlock> blocks_;
  LtiStateSpace psi_;
  Eigen::Index v_width_ = 0, z_width_ = 0, n_vars_ = 0;
  double bound_scale_ = 1.0;
};

}  // namespace ltvwc

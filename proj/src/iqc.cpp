#include "ltvwc/iqc.hpp"

#include <Eigen/Cholesky>

namespace ltvwc {

LtiStateSpace build_basis_filter(const BasisConfig& cfg, Eigen::Index width) {
  if (cfg.nu < 0) throw std::invalid_argument("basis order must be >= 0");
  if (!(cfg.rho < 0.0)) throw std::invalid_argument("basis pole must be negative");
  const Eigen::Index nu = cfg.nu, n = width;
  const double rho = cfg.rho;
  const Eigen::Index nx = nu * n, nout = (nu + 1) * n;

  // Per channel: cascade of nu sections (s+rho)/(s-rho) = 1 + 2rho/(s-rho).
  MatrixXd A = MatrixXd::Zero(nx, nx);
  MatrixXd B = MatrixXd::Zero(nx, n);
  MatrixXd C = MatrixXd::Zero(nout, nx);
  MatrixXd D = MatrixXd::Zero(nout, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index s0 = c * nu;  // channel-major state layout
    for (Eigen::Index s = 0; s < nu; ++s) {
      A(s0 + s, s0 + s) = rho;
      for (Eigen::Index p = 0; p < s; ++p) A(s0 + s, s0 + p) = 2.0 * rho;
      B(s0 + s, c) = 2.0 * rho;
    }
    for (Eigen::Index k = 0; k <= nu; ++k) {
      const Eigen::Index row = k * n + c;  // tap-major output layout
      D(row, c) = 1.0;
      for (Eigen::Index j = 0; j < k; ++j) C(row, s0 + j) = 1.0;
    }
  }
  return LtiStateSpace(A, B, C, D);
}

MatrixXd MultiplierTemplate::decodeX(const Eigen::Ref<const VectorXd>& values) const {
  const Eigen::Index n = x_size;
  MatrixXd X(n, n);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      X(i, j) = values(idx);
      X(j, i) = values(idx);
      ++idx;
    }
  return X;
}

MatrixXd MultiplierTemplate::decode(const Eigen::Ref<const VectorXd>& values,
                                    double bound_scale) const {
  if (values.size() != n_vars) throw std::invalid_argument("decision vector length mismatch");
  const Eigen::Index n = x_size;
  MatrixXd X = decodeX(values);
  MatrixXd Y = MatrixXd::Zero(n, n);
  if (kind == UncertaintyKind::RealRepeated) {
    Eigen::Index idx = n * (n + 1) / 2;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        Y(i, j) = values(idx);
        Y(j, i) = -values(idx);
        ++idx;
      }
  }
  const double b = bound * bound_scale;
  MatrixXd M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = b * b * X;
  M.topRightCorner(n, n) = Y;
  M.bottomLeftCorner(n, n) = Y.transpose();
  M.bottomRightCorner(n, n) = -X;
  return M;
}

bool MultiplierTemplate::feasible(const Eigen::Ref<const VectorXd>& values) const {
  if (values.size() != n_vars) return false;
  MatrixXd X = decodeX(values);
  if ((X.diagonal().array() <= 0.0).any()) return false;
  Eigen::LLT<MatrixXd> llt(X);
  return llt.info() == Eigen::Success;
}

IqcBlock build_iqc_block(const UncertaintyDecl& decl) {
  if (decl.n_v < 1) throw std::invalid_argument("n_v must be >= 1");
  if (!(decl.bound > 0.0)) throw std::invalid_argument("bound must be positive");
  IqcBlock blk;
  blk.decl = decl;
  LtiStateSpace half = build_basis_filter(decl.basis, decl.n_v);
  blk.psi = append(half, half);

  MultiplierTemplate t;
  t.kind = decl.kind;
  t.bound = decl.bound;
  t.x_size = Eigen::Index(decl.n_v) * (decl.basis.nu + 1);
  const Eigen::Index n = t.x_size;
  const Eigen::Index n_x_vars = n * (n + 1) / 2;
  const Eigen::Index n_y_vars =
      (decl.kind == UncertaintyKind::RealRepeated) ? n * (n - 1) / 2 : 0;
  t.n_vars = n_x_vars + n_y_vars;
  t.sign_fixed.assign(std::size_t(t.n_vars), false);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      if (i == j) t.sign_fixed[std::size_t(idx)] = true;  // X diagonal: positive
      ++idx;
    }
  blk.tmpl = t;
  return blk;
}

IqcStack::IqcStack(std::vector<IqcBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("IqcStack needs at least one block");
  LtiStateSpace combined = blocks_.front().psi;
  for (std::size_t i = 1; i < blocks_.size(); ++i)
    combined = append(combined, blocks_[i].psi);

  Eigen::Index V = 0;
  for (const auto& b : blocks_) V += b.decl.n_v;
  v_width_ = V;
  z_width_ = combined.nout();
  n_vars_ = 0;
  for (const auto& b : blocks_) n_vars_ += b.tmpl.n_vars;

  // Route the stacked [v_1..v_k; w_1..w_k] into the per-block [v_i; w_i]
  // ordering the diagonal combination expects.
  MatrixXd P = MatrixXd::Zero(2 * V, 2 * V);
  Eigen::Index row = 0, off = 0;
  for (const auto& b : blocks_) {
    const Eigen::Index nv = b.decl.n_v;
    for (Eigen::Index i = 0; i < nv; ++i) P(row++, off + i) = 1.0;       // v_i
    for (Eigen::Index i = 0; i < nv; ++i) P(row++, V + off + i) = 1.0;   // w_i
    off += nv;
  }
  psi_ = LtiStateSpace(combined.A, combined.B * P, combined.C, combined.D * P);
}

MatrixXd IqcStack::decode(const VectorXd& values) const {
  if (values.size() != n_vars_) throw std::invalid_argument("decision vector length mismatch");
  MatrixXd M = MatrixXd::Zero(z_width_, z_width_);
  Eigen::Index voff = 0, zoff = 0;
  for (const auto& b : blocks_) {
    MatrixXd Mb = b.tmpl.decode(values.segment(voff, b.tmpl.n_vars), bound_scale_);
    M.block(zoff, zoff, Mb.rows(), Mb.cols()) = Mb;
    voff += b.tmpl.n_vars;
    zoff += Mb.rows();
  }
  return M;
}

bool IqcStack::feasible(const VectorXd& values) const {
  if (values.size() != n_vars_) return false;
  Eigen::Index voff = 0;
  for (const auto& b : blocks_) {
    if (!b.tmpl.feasible(values.segment(voff, b.tmpl.n_vars))) return false;
    voff += b.tmpl.n_vars;
  }
  return true;
}

std::vector<bool> IqcStack::signFixed() const {
  std::vector<bool> out;
  for (const auto& b : blocks_)
    out.insert(out.end(), b.tmpl.sign_fixed.begin(), b.tmpl.sign_fixed.end());
  return out;
}

IqcStack IqcStack::rescaled(double k_iqc) const {
  if (!(k_iqc > 0.0) || k_iqc > 1.0)
    throw std::invalid_argument("bound scale must be in (0, 1]");
  IqcStack out = *this;
  out.bound_scale_ = k_iqc;
  return out;
}

}  // namespace ltvwc

#include "ltvwc/extended_system.hpp"

namespace ltvwc {

ExtendedSystem::ExtendedSystem(TimeVaryingStateSpace sys, Eigen::Index n_w,
                               Eigen::Index n_d, Eigen::Index n_z, Eigen::Index n_e,
                               Eigen::Index n_plant_states)
    : sys_(std::move(sys)), n_w_(n_w), n_d_(n_d), n_z_(n_z), n_e_(n_e),
      n_plant_states_(n_plant_states) {
  if (sys_.nin() != n_w_ + n_d_ || sys_.nout() != n_z_ + n_e_)
    throw std::invalid_argument("extended system partition sizes inconsistent");
}

ExtendedSystem::Blocks ExtendedSystem::at(double t) const {
  Blocks b;
  b.A = sys_.A().eval(t);
  MatrixXd B = sys_.B().eval(t);
  MatrixXd C = sys_.C().eval(t);
  MatrixXd D = sys_.D().eval(t);
  b.B1 = B.leftCols(n_w_);
  b.B2 = B.rightCols(n_d_);
  b.C1 = C.topRows(n_z_);
  b.C2 = C.bottomRows(n_e_);
  b.D11 = D.topLeftCorner(n_z_, n_w_);
  b.D12 = D.topRightCorner(n_z_, n_d_);
  b.D21 = D.bottomLeftCorner(n_e_, n_w_);
  b.D22 = D.bottomRightCorner(n_e_, n_d_);
  return b;
}

ExtendedSystem build_extended_nominal(const TimeVaryingStateSpace& plant) {
  Slice d = plant.inChannel("d");
  Slice e = plant.outChannel("e");
  const TimeGrid& g = plant.grid();
  std::vector<MatrixXd> B(g.size()), C(g.size()), D(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    B[k] = plant.B().samples()[k].middleCols(d.offset, d.width);
    C[k] = plant.C().samples()[k].middleRows(e.offset, e.width);
    D[k] = plant.D().samples()[k].block(e.offset, d.offset, e.width, d.width);
  }
  TimeVaryingStateSpace sys(plant.A(), MatrixFunction(g, B), MatrixFunction(g, C),
                            MatrixFunction(g, D));
  return ExtendedSystem(std::move(sys), 0, d.width, 0, e.width, plant.nx());
}

ExtendedSystem build_extended(const TimeVaryingStateSpace& plant, const IqcStack& stack) {
  if (stack.empty()) return build_extended_nominal(plant);

  Slice w = plant.inChannel("w");
  Slice d = plant.inChannel("d");
  Slice v = plant.outChannel("v");
  Slice e = plant.outChannel("e");
  if (v.width != stack.vWidth() || w.width != stack.vWidth())
    throw std::invalid_argument("plant v/w channel width does not match IQC stack");

  const LtiStateSpace& psi = stack.psi();
  const Eigen::Index nv = stack.vWidth();
  // Psi input is [v; w].
  const MatrixXd Bpv = psi.B.leftCols(nv);
  const MatrixXd Bpw = psi.B.rightCols(nv);
  const MatrixXd Dpv = psi.D.leftCols(nv);
  const MatrixXd Dpw = psi.D.rightCols(nv);

  const TimeGrid& g = plant.grid();
  const Eigen::Index nG = plant.nx(), nP = psi.A.rows();
  const Eigen::Index n_w = w.width, n_d = d.width, n_z = stack.zWidth(), n_e = e.width;

  std::vector<MatrixXd> A(g.size()), B(g.size()), C(g.size()), D(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const MatrixXd& Ag = plant.A().samples()[k];
    const MatrixXd Bw = plant.B().samples()[k].middleCols(w.offset, w.width);
    const MatrixXd Bd = plant.B().samples()[k].middleCols(d.offset, d.width);
    const MatrixXd Cv = plant.C().samples()[k].middleRows(v.offset, v.width);
    const MatrixXd Ce = plant.C().samples()[k].middleRows(e.offset, e.width);
    const MatrixXd Dvw = plant.D().samples()[k].block(v.offset, w.offset, v.width, w.width);
    const MatrixXd Dvd = plant.D().samples()[k].block(v.offset, d.offset, v.width, d.width);
    const MatrixXd Dew = plant.D().samples()[k].block(e.offset, w.offset, e.width, w.width);
    const MatrixXd Ded = plant.D().samples()[k].block(e.offset, d.offset, e.width, d.width);

    MatrixXd Ak = MatrixXd::Zero(nG + nP, nG + nP);
    Ak.topLeftCorner(nG, nG) = Ag;
    Ak.bottomLeftCorner(nP, nG) = Bpv * Cv;
    Ak.bottomRightCorner(nP, nP) = psi.A;

    MatrixXd Bk(nG + nP, n_w + n_d);
    Bk.topLeftCorner(nG, n_w) = Bw;
    Bk.topRightCorner(nG, n_d) = Bd;
    Bk.bottomLeftCorner(nP, n_w) = Bpv * Dvw + Bpw;
    Bk.bottomRightCorner(nP, n_d) = Bpv * Dvd;

    MatrixXd Ck = MatrixXd::Zero(n_z + n_e, nG + nP);
    Ck.topLeftCorner(n_z, nG) = Dpv * Cv;
    Ck.topRightCorner(n_z, nP) = psi.C;
    Ck.bottomLeftCorner(n_e, nG) = Ce;

    MatrixXd Dk(n_z + n_e, n_w + n_d);
    Dk.topLeftCorner(n_z, n_w) = Dpv * Dvw + Dpw;
    Dk.topRightCorner(n_z, n_d) = Dpv * Dvd;
    Dk.bottomLeftCorner(n_e, n_w) = Dew;
    Dk.bottomRightCorner(n_e, n_d) = Ded;

    A[k] = std::move(Ak);
    B[k] = std::move(Bk);
    C[k] = std::move(Ck);
    D[k] = std::move(Dk);
  }
  TimeVaryingStateSpace sys(MatrixFunction(g, A), MatrixFunction(g, B),
                            MatrixFunction(g, C), MatrixFunction(g, D));
  return ExtendedSystem(std::move(sys), n_w, n_d, n_z, n_e, nG);
}

ExtendedSystem nominal_reduction(const ExtendedSystem& ext) {
  const TimeGrid& g = ext.grid();
  const Eigen::Index nG = ext.nPlantStates();
  std::vector<MatrixXd> A(g.size()), B(g.size()), C(g.size()), D(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    A[k] = ext.sys().A().samples()[k].topLeftCorner(nG, nG);
    B[k] = ext.sys().B().samples()[k].topRightCorner(nG, ext.nD());
    C[k] = ext.sys().C().samples()[k].bottomLeftCorner(ext.nE(), nG);
    D[k] = ext.sys().D().samples()[k].bottomRightCorner(ext.nE(), ext.nD());
  }
  TimeVaryingStateSpace sys(MatrixFunction(g, A), MatrixFunction(g, B),
                            MatrixFunction(g, C), MatrixFunction(g, D));
  return ExtendedSystem(std::move(sys), 0, ext.nD(), 0, ext.nE(), nG);
}

}  // namespace ltvwc

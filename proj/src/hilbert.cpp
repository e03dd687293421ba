#include "cphase/hilbert.hpp"

#include <cmath>

#include "cphase/error.hpp"

namespace cphase {

using Eigen::Index;
using Eigen::MatrixXcd;

HilbertSpace::HilbertSpace(int fock_cutoff) : n_(fock_cutoff) {
  if (fock_cutoff < 0) throw Error(ErrorKind::InvalidConfig, "fock_cutoff must be nonnegative");
  const Index d = dim();
  a_ = MatrixXcd::Zero(d, d);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int n = 1; n <= n_; ++n) a_(index(a, b, n - 1), index(a, b, n)) = std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < d; ++i) sectors_[sector(i)].push_back(i);
}

BasisState HilbertSpace::state(Index i) const {
  const int m = n_ + 1;
  const int ab = static_cast<int>(i) / m;
  return {ab / 3, ab % 3, static_cast<int>(i) % m};
}

int HilbertSpace::sector(Index i) const {
  const auto s = state(i);
  return 2 * qubit_label(s.a) + qubit_label(s.b);
}

MatrixXcd HilbertSpace::dot_operator(int dot, int row, int col) const {
  const Index d = dim();
  MatrixXcd out = MatrixXcd::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    const auto s = state(i);
    const int level = dot == 0 ? s.a : s.b;
    if (level != col) continue;
    BasisState t = s;
    (dot == 0 ? t.a : t.b) = row;
    out(index(t), i) = 1.0;
  }
  return out;
}

MatrixXcd HilbertSpace::excitation_number() const {
  return number() + dot_operator(0, kTrion, kTrion) + dot_operator(1, kTrion, kTrion);
}

HilbertSpace build_space(const ValidatedSystem& sys) {
  if (sys.n_modes() != 1)
    throw Error(ErrorKind::MultiModeUnsupported,
                "the Fock-space solvers support exactly one cavity mode, got " + std::to_string(sys.n_modes()));
  return HilbertSpace(sys.config().fock_cutoff);
}

MatrixXcd sector_block(const MatrixXcd& op, const HilbertSpace& space, int s) {
  const auto& idx = space.sector_indices(s);
  const auto m = static_cast<Index>(idx.size());
  MatrixXcd out(m, m);
  for (Index r = 0; r < m; ++r)
    for (Index c = 0; c < m; ++c) out(r, c) = op(idx[r], idx[c]);
  return out;
}

HamiltonianModel::HamiltonianModel(const ValidatedSystem& sys, const HilbertSpace& space) {
  const auto& mode = sys.mode(0);
  const MatrixXcd& a = space.annihilation();
  h0_ = mode.delta * space.number();
  for (int j = 0; j < 2; ++j) {
    const auto& dot = sys.dot(j);
    const MatrixXcd raise = space.dot_operator(j, kTrion, kBright);  // |e><1|_j
    h0_ += -dot.omega * space.dot_operator(j, kDark, kDark) + dot.delta_exciton * space.dot_operator(j, kTrion, kTrion);
    const MatrixXcd jc = dot.couplings.at(0) * raise * a;
    h0_ += jc + jc.adjoint();
    drive_[j] = raise;
  }
  for (int s = 0; s < 4; ++s) {
    h0_blocks_[s] = cphase::sector_block(h0_, space, s);
    for (int j = 0; j < 2; ++j) drive_blocks_[s][j] = cphase::sector_block(drive_[j], space, s);
  }
}

void HamiltonianModel::at(cplx omega_a, cplx omega_b, MatrixXcd& out) const {
  out = h0_;
  const MatrixXcd v = omega_a * drive_[0] + omega_b * drive_[1];
  out += v + v.adjoint();
}

MatrixXcd HamiltonianModel::at(cplx omega_a, cplx omega_b) const {
  MatrixXcd out;
  at(omega_a, omega_b, out);
  return out;
}

MatrixXcd HamiltonianModel::sector_block(int s, cplx omega_a, cplx omega_b) const {
  const MatrixXcd v = omega_a * drive_blocks_[s][0] + omega_b * drive_blocks_[s][1];
  return h0_blocks_[s] + v + v.adjoint();
}

MatrixXcd hamiltonian_at(double t, const ValidatedSystem& sys, const HilbertSpace& space,
                         const DisplacementField& alpha) {
  const cplx al = alpha(t);
  return HamiltonianModel(sys, space).at(sys.dot(0).couplings.at(0) * al, sys.dot(1).couplings.at(0) * al);
}

std::vector<CollapseOperator> lindblad_ops(const ValidatedSystem& sys, const HilbertSpace& space) {
  std::vector<CollapseOperator> out;
  const double kappa = sys.mode(0).kappa;
  if (kappa > 0.0) out.push_back({"cavity", kappa, std::sqrt(kappa) * space.annihilation()});
  for (int j = 0; j < 2; ++j) {
    const double g = sys.dot(j).gamma;
    if (g > 0.0)
      out.push_back({j == 0 ? "emission_a" : "emission_b", g, std::sqrt(g) * space.dot_operator(j, kBright, kTrion)});
  }
  return out;
}

Eigen::SparseMatrix<cplx> to_sparse(const MatrixXcd& m) { return m.sparseView(); }

}  // namespace cphase

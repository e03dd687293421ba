#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cphase/frame.hpp"
#include "cphase/model.hpp"

namespace cphase {

/// Dot levels in basis order.
enum Level : int { kDark = 0, kBright = 1, kTrion = 2 };

struct BasisState {
  int a = 0;  ///< level of dot A
  int b = 0;  ///< level of dot B
  int n = 0;  ///< photon number
  bool operator==(const BasisState&) const = default;
};

/// |dot A> x |dot B> x |n> with n = 0..N. Index = (3a + b)(N + 1) + n.
///
/// The Hamiltonian and every collapse operator preserve the qubit label of
/// each dot (|e> counts as 1), so the space splits into four sectors
/// 00, 01, 10, 11 with sector index 2 q_A + q_B.
class HilbertSpace {
public:
  explicit HilbertSpace(int fock_cutoff);

  int fock_cutoff() const { return n_; }
  Eigen::Index dim() const { return 9 * (n_ + 1); }

  Eigen::Index index(int a, int b, int n) const { return (3 * a + b) * (n_ + 1) + n; }
  Eigen::Index index(const BasisState& s) const { return index(s.a, s.b, s.n); }
  BasisState state(Eigen::Index i) const;

  static int qubit_label(int level) { return level == kDark ? 0 : 1; }
  int sector(Eigen::Index i) const;
  const std::vector<Eigen::Index>& sector_indices(int s) const { return sectors_[s]; }
  /// |jk, n=0> for sector s = 2j + k.
  Eigen::Index bare_index(int s) const { return index(s / 2, s % 2, 0); }

  /// Truncated annihilation operator a (identity on the dots).
  const Eigen::MatrixXcd& annihilation() const { return a_; }
  /// |row><col| on dot j (0 = A, 1 = B), identity elsewhere.
  Eigen::MatrixXcd dot_operator(int dot, int row, int col) const;
  Eigen::MatrixXcd number() const { return a_.adjoint() * a_; }
  /// a^dag a + sum_j |e><e|_j
  Eigen::MatrixXcd excitation_number() const;

private:
  int n_;
  Eigen::MatrixXcd a_;
  std::array<std::vector<Eigen::Index>, 4> sectors_;
};

/// Single-mode space for a validated system.
/// Throws MultiModeUnsupported for anything but one cavity mode.
HilbertSpace build_space(const ValidatedSystem& sys);

/// Time-independent part of the Hamiltonian plus the two drive operators,
/// so that H(t) = H0 + sum_j [Omega_j(t) |e><1|_j + h.c.].
class HamiltonianModel {
public:
  HamiltonianModel(const ValidatedSystem& sys, const HilbertSpace& space);

  const Eigen::MatrixXcd& static_part() const { return h0_; }
  Eigen::MatrixXcd at(cplx omega_a, cplx omega_b) const;
  void at(cplx omega_a, cplx omega_b, Eigen::MatrixXcd& out) const;
  /// Same for the block of sector s (rows/cols in sector_indices order).
  Eigen::MatrixXcd sector_block(int s, cplx omega_a, cplx omega_b) const;

private:
  Eigen::MatrixXcd h0_;
  std::array<Eigen::MatrixXcd, 2> drive_;
  std::array<std::array<Eigen::MatrixXcd, 2>, 4> drive_blocks_;
  std::array<Eigen::MatrixXcd, 4> h0_blocks_;
};

/// H(t) with Omega_j(t) = g_j alpha(t) taken from a displacement field.
Eigen::MatrixXcd hamiltonian_at(double t, const ValidatedSystem& sys, const HilbertSpace& space,
                                const DisplacementField& alpha);

struct CollapseOperator {
  std::string name;
  double rate = 0.0;
  Eigen::MatrixXcd op;  ///< already multiplied by sqrt(rate)
};

/// sqrt(kappa) a, sqrt(gamma_A) |1><e|_A, sqrt(gamma_B) |1><e|_B; zero-rate channels are skipped.
std::vector<CollapseOperator> lindblad_ops(const ValidatedSystem& sys, const HilbertSpace& space);

/// Restriction of a sector-preserving operator to sector s.
Eigen::MatrixXcd sector_block(const Eigen::MatrixXcd& op, const HilbertSpace& space, int s);

Eigen::SparseMatrix<cplx> to_sparse(const Eigen::MatrixXcd& m);

}  // namespace cphase

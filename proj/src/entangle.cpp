#include "cphase/entangle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cphase/error.hpp"

namespace cphase {

using Eigen::Index;
using Eigen::Matrix4cd;

constexpr double kPi = std::numbers::pi;
// eigenvalues of a unit-trace state below this are rounding noise
constexpr double kNullEigenvalue = 1e-13;

QubitState reduce_to_qubits(const Eigen::MatrixXcd& rho_full, const HilbertSpace& space) {
  if (rho_full.rows() != space.dim() || rho_full.cols() != space.dim())
    throw Error(ErrorKind::GridMismatch, "density matrix dimension does not match the Hilbert space");
  Matrix4cd block = Matrix4cd::Zero();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int n = 0; n <= space.fock_cutoff(); ++n)
        block(r, c) += rho_full(space.index(r / 2, r % 2, n), space.index(c / 2, c % 2, n));
  const double total = rho_full.trace().real();
  QubitState out;
  out.leakage = total - block.trace().real();
  if (out.leakage >= 0.5)
    throw Error(ErrorKind::LeakageTooLarge, "leakage " + std::to_string(out.leakage) + " out of the qubit space");
  out.rho = block / block.trace().real();
  return out;
}

double concurrence(const Matrix4cd& rho) {
  if (!rho.allFinite()) throw Error(ErrorKind::InvalidDensityMatrix, "non-finite entries");
  const double scale = std::max(rho.norm(), 1.0);
  if ((rho - rho.adjoint()).norm() > 1e-8 * scale) throw Error(ErrorKind::InvalidDensityMatrix, "not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-6)
    throw Error(ErrorKind::InvalidDensityMatrix, "trace " + std::to_string(rho.trace().real()) + " is not 1");

  const Matrix4cd h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4cd> es(h);
  if (es.eigenvalues().minCoeff() < -1e-8) throw Error(ErrorKind::InvalidDensityMatrix, "negative eigenvalue");

  // rho = W W^dag over the numerically nonzero eigenvalues. The square roots of the
  // Wootters eigenvalues are the singular values of W^T (sy x sy) W, which avoids
  // square roots of rounding noise in null directions.
  std::vector<Index> keep;
  for (Index k = 0; k < 4; ++k)
    if (es.eigenvalues()[k] > kNullEigenvalue) keep.push_back(k);
  const auto rank = static_cast<Index>(keep.size());
  Eigen::MatrixXcd w(4, rank);
  for (Index k = 0; k < rank; ++k) w.col(k) = es.eigenvectors().col(keep[k]) * std::sqrt(es.eigenvalues()[keep[k]]);

  // sigma_y x sigma_y is real: anti-diagonal (-1, 1, 1, -1)
  Matrix4cd yy = Matrix4cd::Zero();
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Eigen::MatrixXcd tau = w.transpose() * yy * w;
  Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(tau).singularValues();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<>());
  double c = sv.size() > 0 ? sv[0] : 0.0;
  for (Index k = 1; k < sv.size(); ++k) c -= sv[k];
  return std::max(0.0, c);
}

Eigen::Vector4cd gate_diagonal(double theta_a, double theta_b, double theta_ab) {
  Eigen::Vector4cd d;
  for (int s = 0; s < 4; ++s) {
    const double za = s / 2 == 0 ? 1.0 : -1.0;
    const double zb = s % 2 == 0 ? 1.0 : -1.0;
    d[s] = std::exp(cplx(0.0, theta_a * za + theta_b * zb + theta_ab * za * zb));
  }
  return d;
}

double wrap_angle(double x, double lo, double period) {
  double y = std::fmod(x - lo, period);
  if (y <= 0.0) y += period;
  return lo + y;
}

namespace {

double combo_ab(const std::array<double, 4>& p) { return -(p[3] + p[0] - p[1] - p[2]) / 4.0; }

// Angles from sector phases known only modulo 2 pi.
void wrapped_angles(GatePhases& g) {
  const auto& p = g.sector_phases;
  g.theta_ab = wrap_angle(combo_ab(p), -kPi / 8.0, kPi / 2.0);
  // phi10 = 2 theta_A + 2 theta_AB and phi01 = 2 theta_B + 2 theta_AB, each mod 2 pi
  g.theta_a = wrap_angle((p[2] - 2.0 * g.theta_ab) / 2.0, -kPi / 2.0, kPi);
  g.theta_b = wrap_angle((p[1] - 2.0 * g.theta_ab) / 2.0, -kPi / 2.0, kPi);
}

}  // namespace

GatePhases extract_phases(const Matrix4cd& rho_final, const Matrix4cd& rho_initial) {
  const double purity = (rho_final * rho_final).trace().real() / std::pow(rho_final.trace().real(), 2);
  if (purity < 1.0 - 1e-6) throw Error(ErrorKind::NotPure, "purity " + std::to_string(purity) + " below 1 - 1e-6");
  GatePhases g;
  for (int s = 1; s < 4; ++s) {
    if (std::abs(rho_initial(0, s)) < 1e-12 || std::abs(rho_final(0, s)) < 1e-12)
      throw Error(ErrorKind::InvalidDensityMatrix, "sector phases need nonzero |00> coherences");
    g.sector_phases[s] = std::arg(rho_final(0, s) / rho_initial(0, s));
  }
  wrapped_angles(g);
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kCoherencePairs[k];
    const double ratio = std::abs(rho_final(i, j)) / std::abs(rho_initial(i, j));
    g.decay_exponents[k] = std::abs(rho_initial(i, j)) > 1e-12 ? -std::log(ratio) : 0.0;
  }
  return g;
}

GatePhases extract_phases(const std::array<double, 4>& p) {
  GatePhases g;
  g.sector_phases = p;
  g.theta_ab = wrap_angle(combo_ab(p), -kPi, 2.0 * kPi);
  g.theta_a = wrap_angle((p[2] + p[3] - p[1] - p[0]) / 4.0, -kPi, 2.0 * kPi);
  g.theta_b = wrap_angle((p[1] + p[3] - p[2] - p[0]) / 4.0, -kPi, 2.0 * kPi);
  return g;
}

GatePhases state_phases(const Matrix4cd& rho_final, const Matrix4cd& rho_initial) {
  const double purity = (rho_final * rho_final).trace().real();
  if (purity >= 1.0 - 1e-6) return extract_phases(rho_final, rho_initial);
  GatePhases g;
  for (int s = 1; s < 4; ++s) g.sector_phases[s] = std::arg(rho_final(0, s) / rho_initial(0, s));
  wrapped_angles(g);
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kCoherencePairs[k];
    const double before = std::abs(rho_initial(i, j));
    g.decay_exponents[k] = before > 1e-12 ? -std::log(std::abs(rho_final(i, j)) / before) : 0.0;
  }
  return g;
}

}  // namespace cphase

#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "cphase/hilbert.hpp"

namespace cphase {

/// Phases of U = exp(i theta_A sz_A) exp(i theta_B sz_B) exp(i theta_AB sz_A sz_B),
/// with sz|0> = +|0> and sz|1> = -|1>.
///
/// sector_phases[s] is the phase acquired by the |00><s| coherence,
/// phi_s = int (lambda_s - lambda_00) dt, in basis order 00, 01, 10, 11.
/// Then theta_AB = -(phi11 + phi00 - phi01 - phi10) / 4 and
/// theta_A = (phi10 + phi11 - phi01 - phi00) / 4.
struct GatePhases {
  double theta_a = 0.0;
  double theta_b = 0.0;
  double theta_ab = 0.0;
  std::optional<double> global_phase;  ///< only known when absolute branch phases are
  std::array<double, 4> sector_phases{};
  /// -ln|c| of the coherence factors, pairs (00,01) (00,10) (00,11) (01,10) (01,11) (10,11).
  std::array<double, 6> decay_exponents{};
};

/// Index pairs behind GatePhases::decay_exponents.
inline constexpr std::array<std::array<int, 2>, 6> kCoherencePairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

struct QubitState {
  Eigen::Matrix4cd rho;  ///< renormalized to unit trace
  double leakage = 0.0;  ///< 1 - trace of the projected block
};

/// Partial trace over photons, then projection on span{|0>,|1>}^2.
/// Throws LeakageTooLarge when leakage >= 0.5.
QubitState reduce_to_qubits(const Eigen::MatrixXcd& rho_full, const HilbertSpace& space);

/// Wootters concurrence of a two-qubit density matrix. Throws InvalidDensityMatrix
/// for non-finite, non-Hermitian, non-unit-trace or negative (below -1e-8) input.
double concurrence(const Eigen::Matrix4cd& rho);

/// Diagonal of U in basis order 00, 01, 10, 11.
Eigen::Vector4cd gate_diagonal(double theta_a, double theta_b, double theta_ab);

/// Phases from a final pure state, relative to the initial state the gate acted on.
/// Each phi_s is only known modulo 2 pi, so theta_AB is reported in (-pi/8, 3pi/8]
/// (period pi/2) and theta_A, theta_B in (-pi/2, pi/2] (period pi).
/// Throws NotPure when Tr rho^2 < 1 - 1e-6.
GatePhases extract_phases(const Eigen::Matrix4cd& rho_final, const Eigen::Matrix4cd& rho_initial);

/// extract_phases for pure states. A mixed state's sector phases are read
/// from its |00> coherences, with decay exponents from their magnitudes;
/// the windows are those of extract_phases.
GatePhases state_phases(const Eigen::Matrix4cd& rho_final, const Eigen::Matrix4cd& rho_initial);

/// Phases from unwrapped sector phases (e.g. accumulated eigenvalue integrals).
/// Angles are wrapped into (-pi, pi].
GatePhases extract_phases(const std::array<double, 4>& sector_phases);

double wrap_angle(double x, double lo, double period);

}  // namespace cphase

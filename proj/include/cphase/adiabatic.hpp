#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "cphase/entangle.hpp"
#include "cphase/hilbert.hpp"
#include "cphase/model.hpp"

namespace cphase {

/// The four branches adiabatically connected to |jk, n=0>, one per sector.
///
/// Eigenvectors are phase-aligned so that consecutive overlaps are real and
/// positive. In that gauge the state of branch s at t1 is
/// exp(-i int lambda_s dt) |lambda_s(t1)>, and end_phases[s] is
/// arg <jk, 0 | lambda_s(t1)>.
struct EigenTrajectory {
  TimeGrid grid;
  std::array<std::vector<double>, 4> eigenvalues;
  std::array<std::vector<Eigen::VectorXcd>, 4> eigenvectors;  ///< full-space, unit norm
  std::array<std::vector<double>, 4> cumulative_phase;        ///< int_{t0}^{t} lambda dt
  std::array<double, 4> end_phases{};
  std::array<double, 4> start_overlap{};  ///< |<jk,0|lambda_s(t0)>|
  std::array<double, 4> end_overlap{};
  double min_step_overlap = 1.0;

  std::vector<double> eigenvalue_sum;  ///< sum over all eigenvalues of H(t)
  std::vector<double> hamiltonian_trace;

  /// sum_c <L_c^dag L_c> and <L_c> on each branch, per grid point.
  std::array<std::vector<double>, 4> loss_rate;
  std::array<std::vector<std::vector<cplx>>, 4> jump_expectation;

  /// Accumulated phase of the |00><s| coherence, including end-point projections.
  std::array<double, 4> sector_phases() const;
};

/// Exact diagonalization of each sector block on the time grid, with
/// greedy maximum-overlap continuation.
/// Throws DegenerateStart when a bare state at t0 shares its energy with another
/// level of its sector or is not within 0.999 overlap of a single eigenvector,
/// TrackingLoss when consecutive overlaps drop below 0.9 or the end-point
/// overlap is below 0.999.
EigenTrajectory eigen_track(const ValidatedSystem& sys);

struct AdiabaticResult {
  EigenTrajectory trajectory;
  GatePhases phases;
  Eigen::Matrix4cd rho_raw;  ///< with population lost to the sink
  Eigen::Matrix4cd rho;      ///< renormalized
  double leakage = 0.0;      ///< 1 - trace(rho_raw)
  double concurrence = 0.0;
};

/// Gate evolution of the qubit density matrix in the tracked eigenbasis.
AdiabaticResult adiabatic_evolve(const ValidatedSystem& sys);

/// Loss-free entangling angle from the tracked phases (not wrapped).
double tracked_theta_ab(const EigenTrajectory& traj);

/// Columns t, lambda_00..lambda_11, phase_00..phase_11.
void write_eigen_csv(const EigenTrajectory& traj, const std::filesystem::path& path);

}  // namespace cphase

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cphase/hilbert.hpp"
#include "cphase/model.hpp"
#include "cphase/ode.hpp"

namespace cphase {

struct DensityMatrix {
  double time = 0.0;
  Eigen::MatrixXcd rho;
};

/// d rho/dt = -i[H(t), rho] + sum_c (L_c rho L_c^dag - {L_c^dag L_c, rho}/2).
struct MasterEquation {
  Eigen::Index dim = 0;
  /// Writes H(t) into the (already sized) output matrix.
  std::function<void(double t, Eigen::MatrixXcd& h)> hamiltonian;
  std::vector<Eigen::SparseMatrix<cplx>> collapse;
  std::vector<double> breakpoints;  ///< times where H(t) has a kink

  /// Optional truncation guard: population of the top Fock level.
  std::optional<HilbertSpace> space;
  double truncation_threshold = 1e-6;
};

/// The gate's master equation in the displaced frame.
MasterEquation gate_master_equation(const ValidatedSystem& sys);

using MasterObserver = std::function<void(std::size_t index, const DensityMatrix& state)>;

/// Integrates from rho0 at times.front(), calling `observe` at every requested time.
/// The state is symmetrized after every step. Throws StepFailure or
/// TruncationOverflow.
ode::Stats evolve_master(const MasterEquation& eq, const Eigen::MatrixXcd& rho0, std::span<const double> times,
                         const NumericOptions& opts, const MasterObserver& observe);

std::vector<DensityMatrix> evolve_master(const MasterEquation& eq, const Eigen::MatrixXcd& rho0,
                                         std::span<const double> times, const NumericOptions& opts,
                                         ode::Stats* stats = nullptr);

/// One row of the sampled gate trajectory.
struct MasterSample {
  double t = 0.0;
  double trace = 0.0;
  double photons = 0.0;
  double trion_a = 0.0;
  double trion_b = 0.0;
  double top_fock = 0.0;
  std::array<double, 6> coherence{};  ///< |rho_{ij}| of the qubit block, pairs as in kCoherencePairs
};

/// Worst deviations seen over all sampled states.
struct StateChecks {
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;  ///< ||rho - rho^dag|| / ||rho||
  double min_eigenvalue = 0.0;
  std::size_t samples = 0;

  void add(const Eigen::MatrixXcd& rho);
};

struct GateRun {
  Eigen::Matrix4cd rho;
  double leakage = 0.0;
  double photon_residue = 0.0;
  double concurrence = 0.0;
  Eigen::MatrixXcd final_state;
  std::vector<MasterSample> samples;
  StateChecks checks;
  ode::Stats stats;
};

/// Full gate on the configured initial state (test state by default) times vacuum,
/// sampled on the config grid.
GateRun gate_run(const ValidatedSystem& sys);

/// Initial full-space state: qubit state on the |0>,|1> levels times the photon vacuum.
Eigen::MatrixXcd embed_qubit_state(const Eigen::Matrix4cd& rho, const HilbertSpace& space);

void write_master_csv(std::span<const MasterSample> samples, const std::filesystem::path& path);

}  // namespace cphase

#pragma once

#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cphase/model.hpp"

namespace cphase {

struct Calibration {
  cplx amplitude{0.0, 0.0};  ///< drive amplitude in config units (phase of the configured amplitude kept)
  double theta_ab = 0.0;     ///< realized entangling angle of the tracked loss-free phases
  double seed_amplitude = 0.0;
  int evaluations = 0;       ///< eigen-tracking runs
};

/// Scales the drive so that the adiabatic entangling angle equals `target`.
/// The seed inverts the fourth-order phase under the quasi-static
/// alpha = -f/delta approximation; a bracketed root search refines it to
/// 1e-6 rad. The amplitude is bounded by max|Omega_j| <= max_rabi_ratio |Delta_j|.
/// Throws NoBracket (no entangling coupling) or TargetUnreachable.
Calibration calibrate_amplitude(const SystemConfig& cfg, double target = std::numbers::pi / 4);

/// Quasi-static seed only: |A| such that the fourth-order estimate equals target.
double seed_amplitude(const SystemConfig& cfg, double target = std::numbers::pi / 4);

/// Sets every drive amplitude to `amplitude` times its configured direction.
SystemConfig with_amplitude(const SystemConfig& cfg, double amplitude);

/// Config as a function of the cavity detuning.
using DetuningFamily = std::function<SystemConfig(double delta)>;

struct DetuningOptimum {
  double delta_star = 0.0;
  double concurrence_star = 0.0;
  double delta_opt_analytic = 0.0;
  Calibration calibration;
  double leakage = 0.0;
  int evaluations = 0;  ///< candidate detunings tried
  bool flat = false;    ///< concurrence identically zero over the bracket
};

/// Concurrence of the adiabatic solver at one detuning, with recalibration.
struct DetuningPoint {
  double delta = 0.0;
  double concurrence = 0.0;
  double leakage = 0.0;
  Calibration calibration;
};
DetuningPoint evaluate_detuning(const DetuningFamily& family, double delta, double target = std::numbers::pi / 4);

/// Golden-section maximization of concurrence over log(delta) on
/// [delta_opt/5, 5 delta_opt], after a 9-point scan that locates the peak.
/// Throws BracketFailure if the scan peaks at an end or is not unimodal.
DetuningOptimum optimize_detuning(const DetuningFamily& family, double delta_opt_analytic);

/// Varies only the detuning of the first mode.
DetuningOptimum optimize_detuning(const SystemConfig& cfg);

/// Sweep axes: any of "C", "g", "kappa" (at most two, never all three).
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

/// "name=v1,v2,...;name2=lo:hi:n" (lo:hi:n is n geometrically spaced values).
std::vector<SweepAxis> parse_grid_spec(const std::string& spec);

/// The single-point config used by the sweep: g and kappa set from the axes,
/// and for each detuning Delta = 20 max(delta, g, g^2/delta) and sigma chosen
/// so the peak |Omega|/Delta is about 0.05 at the calibrated amplitude.
/// The grid spans +/- 10 sigma with the base config's step count.
DetuningFamily sweep_family(const SystemConfig& base, double g, double kappa);

struct SweepRecord {
  std::vector<double> axis_values;
  double cooperativity = 0.0;
  double delta_opt_analytic = 0.0;
  double delta_opt_numeric = 0.0;
  cplx calibrated_amplitude{0.0, 0.0};
  double concurrence = 0.0;
  double leakage = 0.0;
  double theta_ab_realized = 0.0;
  std::string solver = "adiabatic";
  std::string config_hash;
  std::string error;  ///< typed error name and message, empty on success
  bool ok() const { return error.empty(); }
};

struct SweepResult {
  std::vector<SweepAxis> axes;
  std::vector<SweepRecord> records;  ///< row-major over the axes, first axis slowest
  std::string base_hash;
  std::size_t succeeded() const;
};

/// Every grid point runs optimize_detuning on its own thread-local state;
/// records are ordered by grid index regardless of `jobs`.
SweepResult concurrence_surface(const SystemConfig& base, const std::vector<SweepAxis>& axes, int jobs = 1,
                                const std::function<void(const SweepRecord&)>& progress = {});

/// Trend diagnostics: per C value the spread of concurrence, and whether
/// concurrence rises with C along every line of the grid.
nlohmann::json sweep_summary(const SweepResult& result);

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path);
SweepResult read_sweep_csv(const std::filesystem::path& path);

}  // namespace cphase

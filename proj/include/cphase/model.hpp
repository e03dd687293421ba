#pragma once

#include <array>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cphase {

using cplx = std::complex<double>;

enum class DotLabel { A, B };

/// One three-level quantum dot: dark |0>, bright |1>, trion |e>.
/// All rates are in units of the spontaneous-emission rate of dot A.
struct DotParams {
  DotLabel label = DotLabel::A;
  double omega = 0.0;          ///< Zeeman splitting; |0> sits at energy -omega
  double delta_exciton = 0.0;  ///< laser-trion detuning
  std::vector<cplx> couplings; ///< vacuum Rabi coupling to each cavity mode
  double gamma = 1.0;          ///< trion spontaneous emission rate
};

enum class PulseShape { Gaussian, FlatTop, CustomSampled };

/// Drive envelope fed into one cavity mode. The input coupling is folded
/// into the amplitude, so the envelope is the full drive term of the mode.
///
/// gaussian: amplitude * (2 pi sigma^2)^(-1/4) * exp(-(t-center)^2 / (4 sigma^2))
/// flat-top: amplitude, constant on the support
/// custom-sampled: amplitude * linear interpolation of `samples`, spread
///                 uniformly over the support
///
/// Every shape is exactly zero outside [t_start, t_end].
struct DrivePulse {
  PulseShape shape = PulseShape::Gaussian;
  cplx amplitude{0.0, 0.0};
  double sigma = 1.0;
  double center = 0.0;
  std::optional<std::array<double, 2>> support;  ///< defaults to center +/- 6 sigma
  std::vector<cplx> samples;

  double t_start() const;
  double t_end() const;
};

struct CavityMode {
  double delta = 0.0;  ///< laser-cavity detuning
  double kappa = 0.0;  ///< cavity energy loss rate
  DrivePulse drive;
};

/// Uniform grid of n_steps intervals (n_steps + 1 samples) on [t0, t1].
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int n_steps = 2;

  std::size_t size() const { return static_cast<std::size_t>(n_steps) + 1; }
  double dt() const { return (t1 - t0) / n_steps; }
  double time(std::size_t i) const {
    return i == static_cast<std::size_t>(n_steps) ? t1 : t0 + dt() * static_cast<double>(i);
  }
  std::vector<double> times() const;

  bool operator==(const TimeGrid&) const = default;
};

enum class Integrator { FixedRk4, AdaptiveEmbedded, SemiImplicit };

/// How the adiabatic solver damps coherences between tracked branches.
enum class AdiabaticDecay {
  Refeed,  ///< diagonal jump terms included: rate = sum_c |l_a - l_b|^2 / 2 + leakage
  Sink,    ///< average of the two branch loss rates, lost population is discarded
};

struct NumericOptions {
  Integrator integrator = Integrator::AdaptiveEmbedded;
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double max_step = std::numeric_limits<double>::max();
  double min_step = 1e-12;
  int rk4_steps = 0;  ///< fixed-step count for FixedRk4 over the grid; 0 = one step per grid interval

  double x = 1.0;  ///< order-unity constant of the spontaneous-emission term of the decay estimate
  double y = 1.0;  ///< same, cavity-loss term

  double adiabatic_margin = 100.0;   ///< sigma must exceed this multiple of the adiabatic scale
  AdiabaticDecay adiabatic_decay = AdiabaticDecay::Refeed;
  double max_rabi_ratio = 1.0;       ///< calibration bound on max|Omega_j| / |Delta_j|
  double truncation_threshold = 1e-6;  ///< largest tolerated population of the top Fock level
};

struct SystemConfig {
  SystemConfig() { dot_b.label = DotLabel::B; }

  DotParams dot_a;
  DotParams dot_b;
  std::vector<CavityMode> modes;
  int fock_cutoff = 3;
  TimeGrid time_grid;
  NumericOptions numeric;
  /// Qubit-space initial state; the product test state when absent.
  std::optional<Eigen::Matrix4cd> initial_state;
};

/// Immutable, validated system in units where gamma of dot A is 1
/// (or unscaled when dot A has no spontaneous emission).
class ValidatedSystem {
public:
  const SystemConfig& config() const { return cfg_; }
  const DotParams& dot(int j) const { return j == 0 ? cfg_.dot_a : cfg_.dot_b; }
  const CavityMode& mode(std::size_t m = 0) const { return cfg_.modes.at(m); }
  const TimeGrid& grid() const { return cfg_.time_grid; }
  const NumericOptions& numeric() const { return cfg_.numeric; }
  std::size_t n_modes() const { return cfg_.modes.size(); }

  /// Factor the input rates were divided by (gamma_A of the raw config).
  double rate_scale() const { return rate_scale_; }

private:
  friend ValidatedSystem validate_config(const SystemConfig&, bool);
  ValidatedSystem(SystemConfig cfg, double scale) : cfg_(std::move(cfg)), rate_scale_(scale) {}

  SystemConfig cfg_;
  double rate_scale_ = 1.0;
};

/// Checks every invariant and rescales to gamma_A = 1.
/// With `require_detunings`, zero Delta_j or delta_mu is rejected as well
/// (needed by the perturbative estimates).
ValidatedSystem validate_config(const SystemConfig& cfg, bool require_detunings = false);

cplx pulse_envelope(const DrivePulse& pulse, double t);

/// The test input state (|0>+|1>) x (|0>-|1>) / 2 as a 4x4 density matrix,
/// basis order 00, 01, 10, 11.
Eigen::Matrix4cd test_state();

/// Initial qubit state of a validated system (config value or test state).
Eigen::Matrix4cd initial_qubit_state(const ValidatedSystem& sys);

}  // namespace cphase

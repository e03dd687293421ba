#include "cphase/model.hpp"

#include <cmath>
#include <numbers>

#include "cphase/error.hpp"

namespace cphase {

namespace {

constexpr double kSupportSigmas = 6.0;
constexpr double kGridMarginSigmas = 4.0;

void check_rate(double value, const std::string& what) {
  if (!std::isfinite(value)) throw Error(ErrorKind::InvalidConfig, what + " is not finite");
  if (value < 0.0) throw Error(ErrorKind::NegativeRate, what + " = " + std::to_string(value));
}

void check_finite(double value, const std::string& what) {
  if (!std::isfinite(value)) throw Error(ErrorKind::InvalidConfig, what + " is not finite");
}

void validate_pulse(const DrivePulse& p, const std::string& where) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma))
    throw Error(ErrorKind::InvalidConfig, where + ": sigma must be positive");
  check_finite(p.center, where + ".center");
  check_finite(p.amplitude.real(), where + ".amplitude");
  check_finite(p.amplitude.imag(), where + ".amplitude");
  if (p.shape != PulseShape::Gaussian && !p.support)
    throw Error(ErrorKind::InvalidConfig, where + ": non-gaussian pulses need an explicit support");
  if (!(p.t_start() < p.t_end()))
    throw Error(ErrorKind::InvalidConfig, where + ": empty pulse support");
  if (p.shape == PulseShape::CustomSampled && p.samples.size() < 2)
    throw Error(ErrorKind::InvalidConfig, where + ": custom pulse needs at least two samples");
}

void scale_dot(DotParams& d, double s) {
  d.omega /= s;
  d.delta_exciton /= s;
  for (auto& g : d.couplings) g /= s;
  d.gamma /= s;
}

}  // namespace

double DrivePulse::t_start() const {
  return support ? (*support)[0] : center - kSupportSigmas * sigma;
}

double DrivePulse::t_end() const {
  return support ? (*support)[1] : center + kSupportSigmas * sigma;
}

std::vector<double> TimeGrid::times() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = time(i);
  return out;
}

ValidatedSystem validate_config(const SystemConfig& raw, bool require_detunings) {
  if (raw.modes.empty()) throw Error(ErrorKind::InvalidConfig, "at least one cavity mode is required");

  const auto n_modes = raw.modes.size();
  for (int j = 0; j < 2; ++j) {
    const DotParams& d = j == 0 ? raw.dot_a : raw.dot_b;
    const std::string name = j == 0 ? "dot_a" : "dot_b";
    check_finite(d.omega, name + ".omega");
    check_finite(d.delta_exciton, name + ".delta_exciton");
    check_rate(d.gamma, name + ".gamma");
    if (d.couplings.size() != n_modes)
      throw Error(ErrorKind::InvalidConfig, name + ": need one coupling per cavity mode");
    for (const auto& g : d.couplings) {
      check_finite(g.real(), name + ".couplings");
      check_finite(g.imag(), name + ".couplings");
    }
    if (d.delta_exciton == 0.0 && require_detunings)
      throw Error(ErrorKind::ZeroDetuning, name + ".delta_exciton is zero");
  }

  bool driven = false;
  for (std::size_t m = 0; m < n_modes; ++m) {
    const auto& mode = raw.modes[m];
    const std::string name = "modes[" + std::to_string(m) + "]";
    check_finite(mode.delta, name + ".delta");
    check_rate(mode.kappa, name + ".kappa");
    if (mode.delta == 0.0 && require_detunings)
      throw Error(ErrorKind::ZeroDetuning, name + ".delta is zero");
    validate_pulse(mode.drive, name + ".drive");
    if (std::abs(mode.drive.amplitude) > 0.0) driven = true;
  }

  const TimeGrid& grid = raw.time_grid;
  if (!(grid.t0 < grid.t1)) throw Error(ErrorKind::InvalidConfig, "time_grid requires t0 < t1");
  if (grid.n_steps < 2) throw Error(ErrorKind::InvalidConfig, "time_grid requires n_steps >= 2");
  for (std::size_t m = 0; m < n_modes; ++m) {
    const auto& p = raw.modes[m].drive;
    // rounding slack, so a grid of exactly center +/- 10 sigma passes
    const double slack = 1e-9 * (std::abs(grid.t0) + std::abs(grid.t1) + p.sigma);
    const double margin = kGridMarginSigmas * p.sigma - slack;
    if (grid.t0 > p.t_start() - margin || grid.t1 < p.t_end() + margin)
      throw Error(ErrorKind::GridTooShort,
                  "grid [" + std::to_string(grid.t0) + ", " + std::to_string(grid.t1) +
                      "] does not cover the pulse support plus 4 sigma");
  }

  if (raw.fock_cutoff < 0) throw Error(ErrorKind::InvalidConfig, "fock_cutoff must be nonnegative");
  if (raw.fock_cutoff == 0 && driven)
    throw Error(ErrorKind::TruncationZero, "fock_cutoff = 0 with a nonzero drive");

  const auto& num = raw.numeric;
  if (!(num.abs_tol > 0.0) || !(num.rel_tol > 0.0))
    throw Error(ErrorKind::InvalidConfig, "tolerances must be positive");
  if (!(num.min_step > 0.0) || !(num.min_step < num.max_step))
    throw Error(ErrorKind::InvalidConfig, "step bounds require 0 < min_step < max_step");
  if (num.rk4_steps < 0) throw Error(ErrorKind::InvalidConfig, "rk4_steps must be nonnegative");
  if (!(num.adiabatic_margin > 0.0) || !(num.max_rabi_ratio > 0.0) || !(num.truncation_threshold > 0.0))
    throw Error(ErrorKind::InvalidConfig, "numeric bounds must be positive");

  SystemConfig cfg = raw;
  cfg.dot_a.label = DotLabel::A;
  cfg.dot_b.label = DotLabel::B;

  // Nondimensionalize: rates / gamma_A, times * gamma_A, amplitudes / sqrt(gamma_A).
  const double s = raw.dot_a.gamma > 0.0 ? raw.dot_a.gamma : 1.0;
  if (s != 1.0) {
    scale_dot(cfg.dot_a, s);
    scale_dot(cfg.dot_b, s);
    cfg.dot_a.gamma = 1.0;
    const double root = std::sqrt(s);
    for (auto& mode : cfg.modes) {
      mode.delta /= s;
      mode.kappa /= s;
      auto& p = mode.drive;
      p.sigma *= s;
      p.center *= s;
      if (p.support) p.support = std::array<double, 2>{(*p.support)[0] * s, (*p.support)[1] * s};
      // gaussian amplitudes carry the (2 pi sigma^2)^(-1/4) normalization; the others are rates
      p.amplitude /= p.shape == PulseShape::Gaussian ? root : s;
    }
    cfg.time_grid.t0 *= s;
    cfg.time_grid.t1 *= s;
    if (cfg.numeric.max_step < std::numeric_limits<double>::max()) cfg.numeric.max_step *= s;
    cfg.numeric.min_step *= s;
  }
  return ValidatedSystem(std::move(cfg), s);
}

cplx pulse_envelope(const DrivePulse& p, double t) {
  if (t < p.t_start() || t > p.t_end()) return {0.0, 0.0};
  switch (p.shape) {
    case PulseShape::Gaussian: {
      const double norm = std::pow(2.0 * std::numbers::pi * p.sigma * p.sigma, -0.25);
      const double u = t - p.center;
      return p.amplitude * norm * std::exp(-u * u / (4.0 * p.sigma * p.sigma));
    }
    case PulseShape::FlatTop:
      return p.amplitude;
    case PulseShape::CustomSampled: {
      const double span = p.t_end() - p.t_start();
      const double pos = (t - p.t_start()) / span * static_cast<double>(p.samples.size() - 1);
      const auto i = std::min(static_cast<std::size_t>(pos), p.samples.size() - 2);
      const double w = pos - static_cast<double>(i);
      return p.amplitude * ((1.0 - w) * p.samples[i] + w * p.samples[i + 1]);
    }
  }
  return {0.0, 0.0};
}

Eigen::Matrix4cd test_state() {
  Eigen::Vector4cd psi(0.5, -0.5, 0.5, -0.5);
  return psi * psi.adjoint();
}

Eigen::Matrix4cd initial_qubit_state(const ValidatedSystem& sys) {
  return sys.config().initial_state ? *sys.config().initial_state : test_state();
}

}  // namespace cphase

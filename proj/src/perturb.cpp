#include "cphase/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cphase/error.hpp"

namespace cphase {

namespace {

void require_same_grid(const ComplexTrajectory& a, const ComplexTrajectory& b) {
  if (!(a.grid == b.grid) || a.size() != b.size())
    throw Error(ErrorKind::GridMismatch, "trajectories live on different grids");
}

void require_detuning(double d, const char* what) {
  if (d == 0.0) throw Error(ErrorKind::ZeroDetuning, std::string(what) + " is zero");
}

void require_gamma(const DotParams& d) {
  if (!(d.gamma > 0.0)) throw Error(ErrorKind::ZeroGamma, "spontaneous emission rate must be positive");
}

}  // namespace

double stark_angle(const ComplexTrajectory& omega, double delta) {
  require_detuning(delta, "Delta");
  std::vector<double> f(omega.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double r = 4.0 * std::norm(omega[i]) / (delta * delta);
    // sqrt(1+r)-1 without cancellation for small r
    f[i] = 0.5 * delta * r / (std::sqrt(1.0 + r) + 1.0);
  }
  return integrate(omega.grid, f);
}

double nonlinear_phase_4th(const ComplexTrajectory& omega_a, const ComplexTrajectory& omega_b, const DotParams& dot_a,
                           const DotParams& dot_b, std::span<const CavityMode> modes) {
  require_same_grid(omega_a, omega_b);
  require_detuning(dot_a.delta_exciton, "Delta_A");
  require_detuning(dot_b.delta_exciton, "Delta_B");
  cplx weight = 0.0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    require_detuning(modes[m].delta, "delta_mu");
    weight += std::conj(dot_a.couplings.at(m)) * dot_b.couplings.at(m) / modes[m].delta;
  }
  weight /= dot_a.delta_exciton * dot_b.delta_exciton;
  std::vector<double> f(omega_a.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 2.0 * std::real(omega_a[i] * std::conj(omega_b[i]) * weight);
  return integrate(omega_a.grid, f);
}

SectorPaths dispersive_amplitudes(std::span<const ComplexTrajectory> alphas, const DotParams& dot_a,
                                  const DotParams& dot_b, std::span<const CavityMode> modes) {
  if (alphas.size() != modes.size()) throw Error(ErrorKind::GridMismatch, "need one trajectory per mode");
  require_detuning(dot_a.delta_exciton, "Delta_A");
  require_detuning(dot_b.delta_exciton, "Delta_B");
  for (const auto& m : modes) require_detuning(m.delta, "delta_mu");
  for (const auto& a : alphas) require_same_grid(a, alphas.front());

  // Dot j pulls mode mu by sum_nu g_{j nu} g_{j mu}^* alpha_nu / (Delta_j delta_mu).
  auto pull = [&](const DotParams& dot, std::size_t mu, std::size_t i) {
    cplx s = 0.0;
    for (std::size_t nu = 0; nu < alphas.size(); ++nu) s += dot.couplings[nu] * alphas[nu][i];
    return s * std::conj(dot.couplings[mu]) / (dot.delta_exciton * modes[mu].delta);
  };

  SectorPaths out;
  for (const auto& m : modes) out.mode_detunings.push_back(m.delta);
  for (int s = 0; s < 4; ++s) out.paths[s] = std::vector<ComplexTrajectory>(alphas.begin(), alphas.end());
  for (std::size_t mu = 0; mu < alphas.size(); ++mu) {
    for (std::size_t i = 0; i < alphas[mu].size(); ++i) {
      const cplx pa = pull(dot_a, mu, i);
      const cplx pb = pull(dot_b, mu, i);
      out.paths[S01][mu][i] += pb;
      out.paths[S10][mu][i] += pa;
      out.paths[S11][mu][i] += pa + pb;
    }
  }
  return out;
}

double geometric_phase(const ComplexTrajectory& path) {
  const std::size_t n = path.size();
  if (n < 2) return 0.0;
  const double h = path.grid.dt();
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    cplx d;
    if (i == 0) d = (path[1] - path[0]) / h;
    else if (i == n - 1) d = (path[n - 1] - path[n - 2]) / h;
    else d = (path[i + 1] - path[i - 1]) / (2.0 * h);
    f[i] = std::imag(std::conj(d) * path[i]);
  }
  return integrate(path.grid, f);
}

ComplexTrajectory cavity_frame(const ComplexTrajectory& path, double delta) {
  ComplexTrajectory out = path;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(cplx(0.0, -delta * out.time(i)));
  return out;
}

double geometric_nonlinear_phase(const SectorPaths& amps) {
  std::array<double, 4> phi{};
  for (int s = 0; s < 4; ++s) {
    const auto& per_mode = amps.paths[s];
    for (std::size_t m = 0; m < per_mode.size(); ++m) {
      const double d = m < amps.mode_detunings.size() ? amps.mode_detunings[m] : 0.0;
      // geometric_phase(cavity_frame(path, d)) without differentiating the fast rotation:
      // Im[conj(d/dt(a e^{-i d t})) a e^{-i d t}] = Im[conj(da/dt) a] + d |a|^2
      std::vector<double> norm2(per_mode[m].size());
      for (std::size_t i = 0; i < norm2.size(); ++i) norm2[i] = std::norm(per_mode[m][i]);
      phi[s] += geometric_phase(per_mode[m]) + d * integrate(per_mode[m].grid, norm2);
    }
  }
  return phi[S11] + phi[S00] - phi[S01] - phi[S10];
}

double path_distance_decay(const ComplexTrajectory& p1, const ComplexTrajectory& p2, double kappa) {
  require_same_grid(p1, p2);
  std::vector<double> f(p1.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = 0.5 * kappa * std::norm(p1[i] - p2[i]);
  return integrate(p1.grid, f);
}

double decoherence_exponent(const ComplexTrajectory& omega, const DotParams& dot, std::span<const CavityMode> modes,
                            double x, double y) {
  require_detuning(dot.delta_exciton, "Delta");
  double cavity = 0.0;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    require_detuning(modes[m].delta, "delta_mu");
    cavity += modes[m].kappa * std::norm(dot.couplings.at(m)) / (modes[m].delta * modes[m].delta);
  }
  const double d2 = dot.delta_exciton * dot.delta_exciton;
  const double rate = (x * dot.gamma + y * cavity) / d2;
  std::vector<double> f(omega.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rate * std::norm(omega[i]);
  return integrate(omega.grid, f);
}

double optimal_detuning(const DotParams& dot_a, const DotParams& dot_b, std::span<const CavityMode> modes) {
  double mean = 0.0;
  for (const DotParams* d : {&dot_a, &dot_b}) {
    require_gamma(*d);
    double s = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) s += modes[m].kappa * std::norm(d->couplings.at(m));
    mean += 0.5 * s / d->gamma;
  }
  return std::sqrt(mean);
}

double cooperativity(const DotParams& dot_a, const DotParams& dot_b, std::span<const CavityMode> modes) {
  double mean = 0.0;
  for (const DotParams* d : {&dot_a, &dot_b}) {
    require_gamma(*d);
    double s = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      if (!(modes[m].kappa > 0.0)) throw Error(ErrorKind::ZeroKappa, "cavity loss rate must be positive");
      s += 4.0 * std::norm(d->couplings.at(m)) / (d->gamma * modes[m].kappa);
    }
    mean += 0.5 * s;
  }
  return mean;
}

double fidelity_estimate(double c) {
  if (!(c > 0.0)) throw Error(ErrorKind::NonpositiveC, "cooperativity must be positive");
  if (std::isinf(c)) return 1.0;
  return 0.5 * (1.0 + std::exp(-1.0 / std::sqrt(c)));
}

double adiabatic_min_sigma(double c, double kappa, double delta_exciton, double gamma) {
  if (!(c > 0.0) || !(kappa > 0.0) || delta_exciton == 0.0 || !(gamma > 0.0))
    throw Error(ErrorKind::NonpositiveInput, "adiabatic bound needs positive C, kappa, gamma and nonzero Delta");
  return std::sqrt(c) * kappa * kappa / (delta_exciton * delta_exciton * gamma);
}

double planar_cavity_cooperativity(double q, double lambda0, double bohr_radius, double cavity_length) {
  if (!(q > 0.0) || !(lambda0 > 0.0) || !(bohr_radius > 0.0) || !(cavity_length > 0.0))
    throw Error(ErrorKind::NonpositiveInput, "planar cavity estimate needs positive inputs");
  const double pi3 = std::numbers::pi * std::numbers::pi * std::numbers::pi;
  return q * lambda0 * lambda0 * lambda0 / (pi3 * bohr_radius * bohr_radius * cavity_length);
}

double cavity_mode_radius(double lambda0, double r1, double r2) {
  if (!(r1 > 0.0 && r1 < 1.0) || !(r2 > 0.0 && r2 < 1.0))
    throw Error(ErrorKind::ReflectivityOutOfRange, "reflectivities must lie in (0, 1)");
  if (!(lambda0 > 0.0)) throw Error(ErrorKind::NonpositiveInput, "wavelength must be positive");
  const double r = std::sqrt(r1 * r2);
  return lambda0 / std::sqrt(2.0 * std::numbers::pi * (1.0 - r));
}

DriveTrajectories drive_trajectories(const ValidatedSystem& sys) {
  DriveTrajectories out;
  for (const auto& mode : sys.config().modes)
    out.alphas.push_back(displacement_trajectory(mode, sys.grid(), sys.numeric()));
  out.omega_a = effective_rabi(sys.dot(0), out.alphas);
  out.omega_b = effective_rabi(sys.dot(1), out.alphas);
  return out;
}

AnalyticEstimates estimate(const ValidatedSystem& sys) {
  const auto& cfg = sys.config();
  const auto drives = drive_trajectories(sys);
  AnalyticEstimates e;
  e.theta_a = stark_angle(drives.omega_a, cfg.dot_a.delta_exciton);
  e.theta_b = stark_angle(drives.omega_b, cfg.dot_b.delta_exciton);
  e.nonlinear_phase = nonlinear_phase_4th(drives.omega_a, drives.omega_b, cfg.dot_a, cfg.dot_b, cfg.modes);
  e.theta_ab = e.nonlinear_phase / 4.0;
  e.gamma_exponent = 0.5 * (decoherence_exponent(drives.omega_a, cfg.dot_a, cfg.modes, cfg.numeric.x, cfg.numeric.y) +
                            decoherence_exponent(drives.omega_b, cfg.dot_b, cfg.modes, cfg.numeric.x, cfg.numeric.y));

  const bool lossy_dots = cfg.dot_a.gamma > 0.0 && cfg.dot_b.gamma > 0.0;
  const bool lossy_modes = std::all_of(cfg.modes.begin(), cfg.modes.end(), [](const auto& m) { return m.kappa > 0.0; });
  if (lossy_dots) e.delta_opt = optimal_detuning(cfg.dot_a, cfg.dot_b, cfg.modes);
  if (lossy_dots && lossy_modes) {
    const double c = cooperativity(cfg.dot_a, cfg.dot_b, cfg.modes);
    e.cooperativity = c;
    if (c > 0.0) {
      e.fidelity_est = fidelity_estimate(c);
      const double delta_min = std::min(std::abs(cfg.dot_a.delta_exciton), std::abs(cfg.dot_b.delta_exciton));
      e.sigma_min = adiabatic_min_sigma(c, cfg.modes.front().kappa, delta_min, cfg.dot_a.gamma);
    }
  }
  return e;
}

}  // namespace cphase

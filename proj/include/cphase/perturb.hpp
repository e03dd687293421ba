#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "cphase/frame.hpp"
#include "cphase/model.hpp"

namespace cphase {

/// Closed-form estimates for one configuration.
///
/// Angle conventions: `theta_a`, `theta_b` are ac-Stark angles of the bright
/// state and `nonlinear_phase` is the fourth-order value of
/// -int [l11 + l00 - l01 - l10] dt. `theta_ab` is the exponent of
/// exp(i theta_ab sz_A sz_B), i.e. nonlinear_phase / 4, the same convention
/// as GatePhases.
struct AnalyticEstimates {
  double theta_a = 0.0;
  double theta_b = 0.0;
  double theta_ab = 0.0;
  double nonlinear_phase = 0.0;
  std::optional<double> delta_opt;
  std::optional<double> cooperativity;
  std::optional<double> fidelity_est;
  std::optional<double> sigma_min;
  double gamma_exponent = 0.0;  ///< mean over the two dots of int Gamma(t) dt
};

/// (Delta/2) int [sqrt(1 + 4|Omega|^2/Delta^2) - 1] dt.
double stark_angle(const ComplexTrajectory& omega, double delta_exciton);

/// Fourth-order cavity-mediated phase
///   2 Re sum_mu int Omega_A Omega_B^* g_{A mu}^* g_{B mu} / (Delta_A Delta_B delta_mu) dt.
double nonlinear_phase_4th(const ComplexTrajectory& omega_a, const ComplexTrajectory& omega_b, const DotParams& dot_a,
                           const DotParams& dot_b, std::span<const CavityMode> modes);

/// Qubit-sector indices, basis order 00, 01, 10, 11.
enum Sector : int { S00 = 0, S01 = 1, S10 = 2, S11 = 3 };

/// Second-order (dispersive) cavity amplitudes alpha^{jk}_mu(t) per sector.
struct SectorPaths {
  std::array<std::vector<ComplexTrajectory>, 4> paths;  ///< [sector][mode]
  std::vector<double> mode_detunings;
};

SectorPaths dispersive_amplitudes(std::span<const ComplexTrajectory> alphas, const DotParams& dot_a,
                                  const DotParams& dot_b, std::span<const CavityMode> modes);

/// int Im[conj(d alpha/dt) alpha] dt with centered differences.
double geometric_phase(const ComplexTrajectory& path);

/// The path seen from the frame co-rotating with a cavity detuned by delta: alpha(t) e^{-i delta t}.
ComplexTrajectory cavity_frame(const ComplexTrajectory& path, double delta);

/// phi11 + phi00 - phi01 - phi10, with each phi the enclosed phase-space area
/// summed over modes, evaluated in each mode's co-rotating frame.
double geometric_nonlinear_phase(const SectorPaths& amps);

/// int (kappa/2) |alpha1 - alpha2|^2 dt.
double path_distance_decay(const ComplexTrajectory& path1, const ComplexTrajectory& path2, double kappa);

/// int [x gamma |Omega|^2/Delta^2 + y sum_mu kappa_mu |Omega|^2 |g_mu|^2/(Delta^2 delta_mu^2)] dt for one dot.
double decoherence_exponent(const ComplexTrajectory& omega, const DotParams& dot, std::span<const CavityMode> modes,
                            double x = 1.0, double y = 1.0);

double optimal_detuning(const DotParams& dot_a, const DotParams& dot_b, std::span<const CavityMode> modes);
double cooperativity(const DotParams& dot_a, const DotParams& dot_b, std::span<const CavityMode> modes);
double fidelity_estimate(double c);
double adiabatic_min_sigma(double c, double kappa, double delta_exciton, double gamma);
double planar_cavity_cooperativity(double q, double lambda0, double bohr_radius, double cavity_length);
double cavity_mode_radius(double lambda0, double r1, double r2);

/// Rabi trajectories of both dots for the configured pulses.
struct DriveTrajectories {
  std::vector<ComplexTrajectory> alphas;
  ComplexTrajectory omega_a;
  ComplexTrajectory omega_b;
};
DriveTrajectories drive_trajectories(const ValidatedSystem& sys);

AnalyticEstimates estimate(const ValidatedSystem& sys);

}  // namespace cphase

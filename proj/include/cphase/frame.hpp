#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "cphase/model.hpp"

namespace cphase {

/// Complex samples on a uniform time grid.
struct ComplexTrajectory {
  TimeGrid grid;
  std::vector<cplx> values;

  ComplexTrajectory() = default;
  ComplexTrajectory(TimeGrid g, std::vector<cplx> v);
  explicit ComplexTrajectory(const TimeGrid& g) : grid(g), values(g.size()) {}

  std::size_t size() const { return values.size(); }
  double time(std::size_t i) const { return grid.time(i); }
  const cplx& operator[](std::size_t i) const { return values[i]; }
  cplx& operator[](std::size_t i) { return values[i]; }
};

/// Trapezoidal integral of real samples on a uniform grid.
double integrate(const TimeGrid& grid, std::span<const double> samples);
cplx integrate(const TimeGrid& grid, std::span<const cplx> samples);

/// Empty-cavity coherent amplitude alpha(t), from
///   d alpha/dt = -i f(t) - (i delta + kappa/2) alpha,  alpha(t0) = 0.
ComplexTrajectory displacement_trajectory(const CavityMode& mode, const TimeGrid& grid,
                                          const NumericOptions& opts = {});

/// Same IVP for an arbitrary drive. Breakpoints mark drive discontinuities.
ComplexTrajectory displacement_trajectory(const std::function<cplx(double)>& drive, double delta, double kappa,
                                          const TimeGrid& grid, const NumericOptions& opts = {},
                                          std::span<const double> breakpoints = {});

/// Omega_j(t) = sum_mu g_{j mu} alpha_mu(t).
ComplexTrajectory effective_rabi(const DotParams& dot, std::span<const ComplexTrajectory> alphas);

/// Fixed point -i f0 / (i delta + kappa/2) of the displacement ODE.
cplx steady_state_amplitude(const CavityMode& mode, cplx f0);

/// alpha(t) at arbitrary times: cubic Hermite interpolation of the grid
/// solution, using the exact ODE right-hand side as node derivatives.
class DisplacementField {
public:
  DisplacementField(const CavityMode& mode, const TimeGrid& grid, const NumericOptions& opts = {});

  cplx operator()(double t) const;
  const ComplexTrajectory& samples() const { return alpha_; }

private:
  cplx derivative(std::size_t i) const;

  CavityMode mode_;
  ComplexTrajectory alpha_;
};

void write_trajectory_csv(const ComplexTrajectory& traj, const std::filesystem::path& path);
ComplexTrajectory read_trajectory_csv(const std::filesystem::path& path);

}  // namespace cphase

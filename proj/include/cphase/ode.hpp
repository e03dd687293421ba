#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>

#include <Eigen/Dense>

namespace cphase::ode {

using State = Eigen::VectorXcd;

/// dy/dt = f(t, y), written into dy (already sized).
using Rhs = std::function<void(double t, const State& y, State& dy)>;

/// Called once per output time, including the initial one (index 0).
using Observer = std::function<void(std::size_t index, double t, const State& y)>;

/// Optional in-place correction applied after every accepted step.
using Projection = std::function<void(State& y)>;

struct Stats {
  long steps = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

struct AdaptiveOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double min_step = 1e-12;
  double max_step = std::numeric_limits<double>::max();
  double initial_step = 0.0;  ///< 0 picks one from the first derivative
  long max_steps = 50'000'000;
};

/// Classical fourth-order Runge-Kutta with `steps_per_interval` equal steps
/// between consecutive output times.
Stats integrate_rk4(const Rhs& f, State y, std::span<const double> out_times, std::size_t steps_per_interval,
                    const Observer& observe, const Projection& project = {});

/// Dormand-Prince 5(4) with embedded error control. Steps never straddle an
/// output time or a breakpoint (a point where f may be discontinuous).
/// Throws Error(StepFailure) when the step would drop below min_step.
Stats integrate_dopri5(const Rhs& f, State y, std::span<const double> out_times, const AdaptiveOptions& opts,
                       const Observer& observe, std::span<const double> breakpoints = {},
                       const Projection& project = {});

/// Generator of a linear system dy/dt = A(t) y.
using LinearGenerator = std::function<Eigen::MatrixXcd(double t)>;

/// A-stable implicit trapezoid rule for linear systems with step-doubling
/// error control (the stiff-capable option).
Stats integrate_trapezoid(const LinearGenerator& a, State y, std::span<const double> out_times,
                          const AdaptiveOptions& opts, const Observer& observe,
                          const Projection& project = {});

}  // namespace cphase::ode

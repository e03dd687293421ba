#include "cphase/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cphase/error.hpp"

namespace cphase::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const State& err, const State& y0, const State& y1, double atol, double rtol) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = std::abs(err[i]) / scale;
    sum += r * r;
  }
  return err.size() ? std::sqrt(sum / static_cast<double>(err.size())) : 0.0;
}

void require_sorted(std::span<const double> times) {
  if (times.empty()) throw Error(ErrorKind::InvalidConfig, "integration needs at least one output time");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw Error(ErrorKind::InvalidConfig, "output times must increase");
}

[[noreturn]] void step_failure(double t, double h) {
  throw Error(ErrorKind::StepFailure, "step size " + std::to_string(h) + " below minimum at t = " + std::to_string(t));
}

}  // namespace

Stats integrate_rk4(const Rhs& f, State y, std::span<const double> out_times, std::size_t steps_per_interval,
                    const Observer& observe, const Projection& project) {
  require_sorted(out_times);
  Stats stats;
  const auto n = y.size();
  State k1(n), k2(n), k3(n), k4(n), tmp(n);
  if (observe) observe(0, out_times[0], y);
  const std::size_t m = std::max<std::size_t>(steps_per_interval, 1);
  for (std::size_t i = 1; i < out_times.size(); ++i) {
    const double ta = out_times[i - 1];
    const double h = (out_times[i] - ta) / static_cast<double>(m);
    for (std::size_t s = 0; s < m; ++s) {
      const double t = ta + h * static_cast<double>(s);
      f(t, y, k1);
      tmp = y + (0.5 * h) * k1;
      f(t + 0.5 * h, tmp, k2);
      tmp = y + (0.5 * h) * k2;
      f(t + 0.5 * h, tmp, k3);
      tmp = y + h * k3;
      f(t + h, tmp, k4);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (project) project(y);
      ++stats.steps;
      stats.rhs_evals += 4;
    }
    if (observe) observe(i, out_times[i], y);
  }
  return stats;
}

Stats integrate_dopri5(const Rhs& f, State y, std::span<const double> out_times, const AdaptiveOptions& opts,
                       const Observer& observe, std::span<const double> breakpoints, const Projection& project) {
  require_sorted(out_times);
  Stats stats;
  const auto n = y.size();
  State k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), ynew(n), err(n);

  if (observe) observe(0, out_times[0], y);
  if (out_times.size() == 1) return stats;

  double t = out_times[0];
  f(t, y, k1);
  ++stats.rhs_evals;

  double h = opts.initial_step;
  if (!(h > 0.0)) {
    const double yn = y.cwiseAbs().maxCoeff();
    const double dn = k1.cwiseAbs().maxCoeff();
    const double scale = opts.abs_tol + opts.rel_tol * yn;
    h = dn > 0.0 ? 0.01 * std::pow(scale / dn, 0.2) * std::max(1.0, yn) : 1e-3 * (out_times.back() - t);
    h = std::clamp(h, opts.min_step, opts.max_step);
  }

  std::size_t next_bp = 0;
  while (next_bp < breakpoints.size() && breakpoints[next_bp] <= t) ++next_bp;

  for (std::size_t out = 1; out < out_times.size(); ++out) {
    const double target = out_times[out];
    while (t < target) {
      double stop = target;
      bool at_breakpoint = false;
      if (next_bp < breakpoints.size() && breakpoints[next_bp] < target) {
        stop = breakpoints[next_bp];
        at_breakpoint = true;
      }
      bool last = false;
      double hs = std::min(h, opts.max_step);
      if (t + hs >= stop || (stop - t - hs) < 1e-12 * std::max(1.0, std::abs(stop))) {
        hs = stop - t;
        last = true;
      }
      if (stats.steps + stats.rejected > opts.max_steps)
        throw Error(ErrorKind::StepFailure, "step budget exhausted at t = " + std::to_string(t));

      tmp = y + hs * (a21 * k1);
      f(t + c2 * hs, tmp, k2);
      tmp = y + hs * (a31 * k1 + a32 * k2);
      f(t + c3 * hs, tmp, k3);
      tmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      f(t + c4 * hs, tmp, k4);
      tmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      f(t + c5 * hs, tmp, k5);
      tmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      f(t + hs, tmp, k6);
      ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      const double t_new = last ? stop : t + hs;
      f(t_new, ynew, k7);
      stats.rhs_evals += 6;
      err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double en = error_norm(err, y, ynew, opts.abs_tol, opts.rel_tol);

      if (en <= 1.0 || hs <= opts.min_step) {
        if (en > 1.0) step_failure(t, hs);
        t = t_new;
        y = ynew;
        if (project) {
          project(y);
          f(t, y, k7);
          ++stats.rhs_evals;
        }
        k1 = k7;
        ++stats.steps;
        const double fac = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
        if (!last) h = hs * std::clamp(fac, 0.2, 5.0);
        else h = std::max(h, hs * std::clamp(fac, 0.2, 5.0));
        if (at_breakpoint && last) {
          ++next_bp;
          f(t, y, k1);  // derivative may jump here
          ++stats.rhs_evals;
        }
      } else {
        ++stats.rejected;
        h = hs * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 1.0);
        if (h < opts.min_step) {
          if (hs > opts.min_step) h = opts.min_step;
          else step_failure(t, h);
        }
      }
    }
    if (observe) observe(out, target, y);
  }
  return stats;
}

Stats integrate_trapezoid(const LinearGenerator& a, State y, std::span<const double> out_times,
                          const AdaptiveOptions& opts, const Observer& observe, const Projection& project) {
  require_sorted(out_times);
  Stats stats;
  const auto n = y.size();
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);

  auto step = [&](double t, double hs, const State& y0) -> State {
    const Eigen::MatrixXcd a0 = a(t);
    const Eigen::MatrixXcd a1 = a(t + hs);
    stats.rhs_evals += 2;
    const State rhs = y0 + (0.5 * hs) * (a0 * y0);
    return (id - (0.5 * hs) * a1).partialPivLu().solve(rhs);
  };

  if (observe) observe(0, out_times[0], y);
  double t = out_times[0];
  double h = opts.initial_step > 0.0 ? opts.initial_step : 1e-2 * (out_times.back() - t);
  h = std::clamp(h, opts.min_step, opts.max_step);

  for (std::size_t out = 1; out < out_times.size(); ++out) {
    const double target = out_times[out];
    while (t < target) {
      double hs = std::min(h, opts.max_step);
      if (t + hs >= target) hs = target - t;
      if (stats.steps + stats.rejected > opts.max_steps)
        throw Error(ErrorKind::StepFailure, "step budget exhausted at t = " + std::to_string(t));
      const State full = step(t, hs, y);
      const State half = step(t + 0.5 * hs, 0.5 * hs, step(t, 0.5 * hs, y));
      // second-order method: Richardson error estimate (half - full) / 3
      const State err = (half - full) / 3.0;
      const double en = error_norm(err, y, half, opts.abs_tol, opts.rel_tol);
      if (en <= 1.0 || hs <= opts.min_step) {
        if (en > 1.0) step_failure(t, hs);
        y = half + err;  // local extrapolation
        if (project) project(y);
        t = (t + hs >= target) ? target : t + hs;
        ++stats.steps;
        const double fac = en > 0.0 ? 0.9 * std::pow(en, -1.0 / 3.0) : 4.0;
        const double grown = hs * std::clamp(fac, 0.2, 4.0);
        h = hs < h ? std::max(h, grown) : grown;  // a step shortened to hit an output keeps h
      } else {
        ++stats.rejected;
        h = hs * std::clamp(0.9 * std::pow(en, -1.0 / 3.0), 0.1, 1.0);
        if (h < opts.min_step) {
          if (hs > opts.min_step) h = opts.min_step;
          else step_failure(t, h);
        }
      }
    }
    if (observe) observe(out, target, y);
  }
  return stats;
}

}  // namespace cphase::ode

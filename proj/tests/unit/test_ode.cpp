#include "doctest.h"

#include <cmath>
#include <vector>

#include "cphase/error.hpp"
#include "cphase/ode.hpp"

using namespace cphase;
using namespace cphase::ode;
using cplx = std::complex<double>;

namespace {

// y' = -i w sigma_x y: |y_1(t)|^2 = sin^2(w t) from y(0) = (1, 0).
Rhs rabi(double w) {
  return [w](double, const State& y, State& dy) {
    dy[0] = cplx(0.0, -w) * y[1];
    dy[1] = cplx(0.0, -w) * y[0];
  };
}

State start() {
  State y(2);
  y << 1.0, 0.0;
  return y;
}

State rk4_final(const Rhs& f, double t1, std::size_t steps) {
  const std::vector<double> times{0.0, t1};
  State out;
  integrate_rk4(f, start(), times, steps, [&](std::size_t, double, const State& y) { out = y; });
  return out;
}

}  // namespace

TEST_CASE("RK4 is fourth order on the Rabi problem") {
  const auto f = rabi(1.3);
  const double t1 = 4.0;
  const std::size_t n = 40;
  const State coarse = rk4_final(f, t1, n);
  const State half = rk4_final(f, t1, 2 * n);
  const State reference = rk4_final(f, t1, 4 * n);
  const double ratio = (coarse - reference).norm() / (half - reference).norm();
  CHECK(ratio >= 12.0);
  CHECK(ratio <= 20.0);
  CHECK(std::norm(reference[1]) == doctest::Approx(std::pow(std::sin(1.3 * t1), 2)).epsilon(1e-6));
}

TEST_CASE("RK4 calls the observer at every output time") {
  const std::vector<double> times{0.0, 0.5, 1.0, 2.0};
  std::vector<double> seen;
  const auto stats = integrate_rk4(rabi(1.0), start(), times, 3,
                                   [&](std::size_t i, double t, const State&) {
                                     CHECK(i == seen.size());
                                     seen.push_back(t);
                                   });
  CHECK(seen == times);
  CHECK(stats.steps == 9);
  CHECK(stats.rhs_evals == 36);
}

TEST_CASE("Dormand-Prince meets its tolerance") {
  const double w = 2.0;
  std::vector<double> times;
  for (int i = 0; i <= 20; ++i) times.push_back(0.25 * i);
  AdaptiveOptions opts;
  opts.abs_tol = 1e-11;
  opts.rel_tol = 1e-10;
  double worst = 0.0;
  const auto stats = integrate_dopri5(rabi(w), start(), times, opts, [&](std::size_t, double t, const State& y) {
    worst = std::max(worst, std::abs(std::norm(y[1]) - std::pow(std::sin(w * t), 2)));
  });
  CHECK(worst < 1e-8);
  CHECK(stats.steps > 0);
  CHECK(stats.rhs_evals > stats.steps);
}

TEST_CASE("Dormand-Prince steps do not straddle breakpoints") {
  // y' = |t - 1| is linear on each side, so steps that end on the kink are exact
  const Rhs f = [](double t, const State&, State& dy) { dy[0] = std::abs(t - 1.0); };
  State y0(1);
  y0[0] = 0.0;
  const std::vector<double> times{0.0, 3.0};
  const std::vector<double> breaks{1.0};
  AdaptiveOptions opts;
  opts.abs_tol = 1e-3;
  opts.rel_tol = 1e-3;
  opts.initial_step = 0.7;
  State out;
  integrate_dopri5(f, y0, times, opts, [&](std::size_t, double, const State& y) { out = y; }, breaks);
  CHECK(std::abs(out[0] - cplx(2.5)) < 1e-12);
}

TEST_CASE("Dormand-Prince reports step failure") {
  // finite-time blow-up y' = y^2 from y(0) = 1 at t = 1
  const Rhs f = [](double, const State& y, State& dy) { dy[0] = y[0] * y[0]; };
  State y0(1);
  y0[0] = 1.0;
  const std::vector<double> times{0.0, 2.0};
  AdaptiveOptions opts;
  opts.min_step = 1e-6;
  try {
    integrate_dopri5(f, y0, times, opts, [](std::size_t, double, const State&) {});
    FAIL("no step failure");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StepFailure);
  }
}

TEST_CASE("projection runs after accepted steps") {
  int calls = 0;
  const std::vector<double> times{0.0, 1.0};
  integrate_rk4(rabi(1.0), start(), times, 5, [](std::size_t, double, const State&) {},
                [&](State& y) {
                  ++calls;
                  y.normalize();
                });
  CHECK(calls == 5);
}

TEST_CASE("trapezoid rule solves a stiff linear system") {
  // decoupled decay rates 1 and 1e4
  const LinearGenerator a = [](double) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = -1e4;
    return m;
  };
  State y0(2);
  y0 << 1.0, 1.0;
  const std::vector<double> times{0.0, 0.5, 1.0};
  AdaptiveOptions opts;
  opts.abs_tol = 1e-9;
  opts.rel_tol = 1e-7;
  std::vector<State> out;
  const auto stats = integrate_trapezoid(a, y0, times, opts, [&](std::size_t, double, const State& y) { out.push_back(y); });
  REQUIRE(out.size() == 3);
  CHECK(std::abs(out[2][0] - std::exp(-1.0)) < 1e-6);
  CHECK(std::abs(out[2][1]) < 1e-6);
  // an explicit method would need ~1e4 steps for stability
  CHECK(stats.steps < 2000);
}

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "cphase/error.hpp"
#include "cphase/hilbert.hpp"
#include "cphase/perturb.hpp"
#include "fixtures.hpp"

using namespace cphase;
using cphase::testing::gate_config;
using cphase::testing::GateParams;

namespace {

const TimeGrid kUnitGrid{0.0, 2.0, 200};

ComplexTrajectory constant(const TimeGrid& g, cplx v) { return ComplexTrajectory(g, std::vector<cplx>(g.size(), v)); }

// Constant value on [t_on, t_off] and zero elsewhere, on a grid whose nodes hit both edges.
ComplexTrajectory boxcar(const TimeGrid& g, cplx v, double t_on, double t_off) {
  ComplexTrajectory out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.time(i);
    out[i] = (t >= t_on - 1e-12 && t <= t_off + 1e-12) ? v : cplx(0.0);
  }
  return out;
}

DotParams dot(double big_delta, std::vector<cplx> g, double gamma = 1.0) {
  DotParams d;
  d.delta_exciton = big_delta;
  d.couplings = std::move(g);
  d.gamma = gamma;
  return d;
}

CavityMode mode(double delta, double kappa) {
  CavityMode m;
  m.delta = delta;
  m.kappa = kappa;
  return m;
}

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidConfig;
}

}  // namespace

TEST_CASE("Stark angle") {
  CHECK(stark_angle(constant(kUnitGrid, 0.0), 5.0) == 0.0);

  // constant |Omega| on a window of length T = 1
  const double big_delta = 3.0, om = 2.0;
  const auto box = boxcar({0.0, 2.0, 2000}, cplx(0.0, om), 0.5, 1.5);
  const double exact = (big_delta / 2.0) * (std::sqrt(1.0 + 4.0 * om * om / (big_delta * big_delta)) - 1.0) * 1.0;
  // the trapezoid rule smears each edge by half a step
  CHECK(stark_angle(box, big_delta) == doctest::Approx(exact).epsilon(2e-3));
  const auto full = constant(kUnitGrid, cplx(om, 0.0));
  CHECK(stark_angle(full, big_delta) ==
        doctest::Approx((big_delta / 2.0) * (std::sqrt(1.0 + 4.0 * om * om / (big_delta * big_delta)) - 1.0) * 2.0));

  // weak gaussian drive: second order in Omega/Delta
  const TimeGrid g{-10.0, 10.0, 2000};
  ComplexTrajectory weak(g);
  std::vector<double> sq(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    weak[i] = 0.5 * std::exp(-g.time(i) * g.time(i) / 4.0);
    sq[i] = std::norm(weak[i]) / 20.0;
  }
  CHECK(stark_angle(weak, 20.0) == doctest::Approx(integrate(g, sq)).epsilon(0.01));
}

TEST_CASE("fourth-order nonlinear phase") {
  const std::vector<CavityMode> modes{mode(7.0, 1.0)};
  const auto om_a = constant(kUnitGrid, 1.5);
  const auto om_b = constant(kUnitGrid, 0.8);
  CHECK(nonlinear_phase_4th(om_a, om_b, dot(10.0, {2.0}), dot(12.0, {0.0}), modes) == 0.0);

  const double ga = 2.0, gb = 3.0, da = 10.0, db = 12.0, d = 7.0, T = 2.0;
  const double exact = 2.0 * 1.5 * 0.8 * ga * gb * T / (da * db * d);
  CHECK(nonlinear_phase_4th(om_a, om_b, dot(da, {ga}), dot(db, {gb}), modes) == doctest::Approx(exact).epsilon(1e-12));

  // inhomogeneous dots: doubling Delta_A halves the phase
  const double same = nonlinear_phase_4th(om_a, om_b, dot(db, {ga}), dot(db, {gb}), modes);
  const double detuned = nonlinear_phase_4th(om_a, om_b, dot(2.0 * db, {ga}), dot(db, {gb}), modes);
  CHECK(detuned == doctest::Approx(same / 2.0).epsilon(1e-14));
}

TEST_CASE("nonlinear phase symmetries on random configurations") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
  for (int trial = 0; trial < 5; ++trial) {
    GateParams p;
    p.g = 10.0 * u(rng);
    p.delta = 40.0 * u(rng);
    p.big_delta = 300.0 * u(rng);
    p.n_steps = 800;
    auto cfg = gate_config(p);
    cfg.dot_a.couplings = {std::polar(p.g, ph(rng))};
    cfg.dot_b.couplings = {std::polar(p.g * u(rng), ph(rng))};
    cfg.dot_b.delta_exciton *= u(rng);
    cfg.modes[0].drive.amplitude = std::polar(50.0 * u(rng), ph(rng));
    const double base = estimate(validate_config(cfg)).nonlinear_phase;
    REQUIRE(std::abs(base) > 0.0);

    auto swapped = cfg;
    std::swap(swapped.dot_a, swapped.dot_b);
    CHECK(estimate(validate_config(swapped)).nonlinear_phase == doctest::Approx(base).epsilon(1e-12));

    // common rotation of every coupling (and so of every Omega)
    auto rotated = cfg;
    const cplx r = std::polar(1.0, ph(rng));
    rotated.dot_a.couplings[0] *= r;
    rotated.dot_b.couplings[0] *= r;
    CHECK(estimate(validate_config(rotated)).nonlinear_phase == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("dispersive amplitudes") {
  const TimeGrid g{0.0, 1.0, 4};
  const ComplexTrajectory alpha(g, {0.0, cplx(1.0, 2.0), cplx(-0.5, 0.1), 3.0, cplx(0.0, -1.0)});
  const std::vector<ComplexTrajectory> alphas{alpha};
  const std::vector<CavityMode> modes{mode(4.0, 0.5)};

  const auto none = dispersive_amplitudes(alphas, dot(10.0, {0.0}), dot(20.0, {0.0}), modes);
  for (int s = 0; s < 4; ++s)
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(none.paths[s][0][i] == alpha[i]);

  const auto only_a = dispersive_amplitudes(alphas, dot(10.0, {2.0}), dot(20.0, {0.0}), modes);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(only_a.paths[S11][0][i] == only_a.paths[S10][0][i]);
    CHECK(only_a.paths[S01][0][i] == only_a.paths[S00][0][i]);
  }

  const double ga = 2.0, gb = 3.0, da = 10.0, db = -20.0, d = 4.0;
  const auto both = dispersive_amplitudes(alphas, dot(da, {ga}), dot(db, {gb}), modes);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx expected = (ga * ga / da + gb * gb / db) * alpha[i] / d;
    CHECK(std::abs(both.paths[S11][0][i] - both.paths[S00][0][i] - expected) < 1e-14);
  }
}

TEST_CASE("geometric phase of a path") {
  const TimeGrid g{0.0, 3.0, 3000};
  CHECK(geometric_phase(constant(g, 0.0)) == 0.0);

  const double r = 1.5, delta = 2.0;
  ComplexTrajectory circle(g);
  ComplexTrajectory line(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    circle[i] = r * std::exp(cplx(0.0, -delta * g.time(i)));
    line[i] = std::sin(g.time(i));
  }
  CHECK(geometric_phase(circle) == doctest::Approx(delta * r * r * 3.0).epsilon(1e-5));
  CHECK(geometric_phase(line) == 0.0);

  // rotating frame: a constant path becomes a circle
  CHECK(geometric_phase(cavity_frame(constant(g, r), delta)) == doctest::Approx(delta * r * r * 3.0).epsilon(1e-5));
}

TEST_CASE("geometric nonlinear phase degenerate cases") {
  const TimeGrid g{0.0, 1.0, 50};
  ComplexTrajectory alpha(g);
  for (std::size_t i = 0; i < g.size(); ++i) alpha[i] = cplx(std::sin(3.0 * g.time(i)), g.time(i));
  SectorPaths equal;
  for (auto& p : equal.paths) p = {alpha};
  equal.mode_detunings = {2.0};
  CHECK(std::abs(geometric_nonlinear_phase(equal)) < 1e-14);

  const std::vector<ComplexTrajectory> alphas{alpha};
  const std::vector<CavityMode> modes{mode(2.0, 0.1)};
  const auto b_off = dispersive_amplitudes(alphas, dot(10.0, {2.0}), dot(10.0, {0.0}), modes);
  CHECK(std::abs(geometric_nonlinear_phase(b_off)) < 1e-14);
}

TEST_CASE("geometric phase approaches the fourth-order phase with delta / kappa") {
  // fixed C = 4 g^2 / (gamma kappa) = 100
  auto discrepancy = [](double ratio) {
    GateParams p;
    p.g = 5.0;
    p.kappa = 1.0;
    p.delta = ratio * p.kappa;
    p.big_delta = 2000.0;
    p.sigma = 4.0;
    p.n_steps = 8000;
    const auto sys = validate_config(gate_config(p));
    const auto drives = drive_trajectories(sys);
    const auto& c = sys.config();
    const double fourth = nonlinear_phase_4th(drives.omega_a, drives.omega_b, c.dot_a, c.dot_b, c.modes);
    const double geo = geometric_nonlinear_phase(dispersive_amplitudes(drives.alphas, c.dot_a, c.dot_b, c.modes));
    return std::abs(geo - fourth) / std::abs(fourth);
  };
  const double d10 = discrepancy(10.0), d30 = discrepancy(30.0), d50 = discrepancy(50.0), d100 = discrepancy(100.0);
  MESSAGE("relative discrepancy at delta/kappa 10, 30, 50, 100: ", d10, " ", d30, " ", d50, " ", d100);
  CHECK(d50 < 0.05);
  CHECK(d100 < 0.05);
  CHECK(d30 < d10);
  CHECK(d100 < d30);
}

TEST_CASE("path-distance decay") {
  const TimeGrid g{0.0, 2.0, 100};
  const auto p1 = constant(g, cplx(1.0, 1.0));
  CHECK(path_distance_decay(p1, p1, 3.0) == 0.0);
  const auto p2 = constant(g, cplx(1.0, -0.5));
  CHECK(path_distance_decay(p1, p2, 0.0) == 0.0);
  CHECK(path_distance_decay(p1, p2, 3.0) == doctest::Approx(0.5 * 3.0 * 1.5 * 1.5 * 2.0));
  CHECK(kind_of([&] { path_distance_decay(p1, constant({0.0, 1.0, 100}, 0.0), 1.0); }) == ErrorKind::GridMismatch);
}

TEST_CASE("decoherence exponent") {
  const std::vector<CavityMode> modes{mode(6.0, 2.0)};
  const auto d = dot(15.0, {3.0}, 0.7);
  CHECK(decoherence_exponent(constant(kUnitGrid, 0.0), d, modes) == 0.0);
  CHECK(decoherence_exponent(constant(kUnitGrid, 2.0), dot(15.0, {3.0}, 0.0), std::vector<CavityMode>{mode(6.0, 0.0)}) ==
        0.0);
  const double om = 2.0, T = 2.0;
  const double exact = (0.7 * om * om / 225.0 + 2.0 * om * om * 9.0 / (225.0 * 36.0)) * T;
  CHECK(decoherence_exponent(constant(kUnitGrid, om), d, modes) == doctest::Approx(exact).epsilon(1e-12));
  CHECK(decoherence_exponent(constant(kUnitGrid, om), d, modes, 2.0, 0.0) ==
        doctest::Approx(2.0 * 0.7 * om * om / 225.0 * T).epsilon(1e-12));
}

TEST_CASE("decoherence rate matches dressed-state populations") {
  // large-delta quasi-static regime, one dot driven
  const double g = 3.0, kappa = 1.0, delta = 40.0, big_delta = 200.0, om = 10.0;
  GateParams p;
  p.g = g;
  p.kappa = kappa;
  p.delta = delta;
  p.big_delta = big_delta;
  const auto sys = validate_config(gate_config(p));
  const HilbertSpace space(3);
  const HamiltonianModel h(sys, space);
  const auto& idx = space.sector_indices(S10);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.sector_block(S10, om, 0.0));
  Eigen::Index best = 0;
  double overlap = 0.0;
  for (Eigen::Index k = 0; k < es.eigenvectors().cols(); ++k) {
    for (std::size_t r = 0; r < idx.size(); ++r) {
      if (idx[r] != space.bare_index(S10)) continue;
      const double o = std::abs(es.eigenvectors()(static_cast<Eigen::Index>(r), k));
      if (o > overlap) overlap = o, best = k;
    }
  }
  double trion = 0.0, photons = 0.0;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double w = std::norm(es.eigenvectors()(static_cast<Eigen::Index>(r), best));
    const auto st = space.state(idx[r]);
    if (st.a == kTrion) trion += w;
    photons += w * st.n;
  }
  const double simulated = sys.dot(0).gamma * trion + kappa * photons;
  const auto one = constant({0.0, 1.0, 10}, om);
  const double predicted = decoherence_exponent(one, sys.dot(0), sys.config().modes);
  CHECK(simulated / predicted > 0.5);
  CHECK(simulated / predicted < 2.0);
}

TEST_CASE("optimal detuning") {
  const std::vector<CavityMode> one{mode(1.0, 1.0)};
  CHECK(optimal_detuning(dot(5.0, {10.0}), dot(5.0, {10.0}), one) == doctest::Approx(10.0));
  CHECK(optimal_detuning(dot(5.0, {20.0}), dot(5.0, {20.0}), one) == doctest::Approx(20.0));
  const std::vector<CavityMode> two{mode(1.0, 1.0), mode(2.0, 1.0)};
  CHECK(optimal_detuning(dot(5.0, {10.0, 10.0}), dot(5.0, {10.0, 10.0}), two) ==
        doctest::Approx(std::sqrt(2.0) * 10.0));
  CHECK(kind_of([&] { optimal_detuning(dot(5.0, {10.0}, 0.0), dot(5.0, {10.0}), one); }) == ErrorKind::ZeroGamma);
}

TEST_CASE("cooperativity") {
  const std::vector<CavityMode> one{mode(1.0, 1.0)};
  CHECK(cooperativity(dot(5.0, {5.0}), dot(5.0, {5.0}), one) == doctest::Approx(100.0));
  CHECK(cooperativity(dot(5.0, {0.0}), dot(5.0, {0.0}), one) == 0.0);
  const std::vector<CavityMode> two{mode(1.0, 1.0), mode(3.0, 1.0)};
  CHECK(cooperativity(dot(5.0, {5.0, 5.0}), dot(5.0, {5.0, 5.0}), two) == doctest::Approx(200.0));
  // additivity with unequal modes
  const std::vector<CavityMode> m1{mode(1.0, 0.5)}, m2{mode(1.0, 2.0)}, m12{mode(1.0, 0.5), mode(1.0, 2.0)};
  CHECK(cooperativity(dot(5.0, {2.0, 3.0}), dot(5.0, {2.0, 3.0}), m12) ==
        doctest::Approx(cooperativity(dot(5.0, {2.0}), dot(5.0, {2.0}), m1) +
                        cooperativity(dot(5.0, {3.0}), dot(5.0, {3.0}), m2)));
  CHECK(kind_of([&] { cooperativity(dot(5.0, {5.0}), dot(5.0, {5.0}), std::vector<CavityMode>{mode(1.0, 0.0)}); }) ==
        ErrorKind::ZeroKappa);
}

TEST_CASE("fidelity estimate") {
  CHECK(fidelity_estimate(std::numeric_limits<double>::infinity()) == 1.0);
  CHECK(fidelity_estimate(1.0) == doctest::Approx(0.5 * (1.0 + std::exp(-1.0))));
  CHECK(fidelity_estimate(1.0) == doctest::Approx(0.6839).epsilon(1e-4));
  CHECK(fidelity_estimate(100.0) == doctest::Approx(0.9524).epsilon(1e-4));
  double last = 0.5;
  for (double c = 0.01; c < 1e6; c *= 3.0) {
    const double f = fidelity_estimate(c);
    CHECK(f > last);
    CHECK(f <= 1.0);
    last = f;
  }
  CHECK(kind_of([] { fidelity_estimate(0.0); }) == ErrorKind::NonpositiveC);
}

TEST_CASE("adiabatic bound and cavity design formulas") {
  CHECK(adiabatic_min_sigma(100.0, 1.0, 100.0, 1.0) == doctest::Approx(1e-3));
  CHECK(kind_of([] { adiabatic_min_sigma(100.0, 0.0, 100.0, 1.0); }) == ErrorKind::NonpositiveInput);

  const double pi3 = std::pow(std::numbers::pi, 3);
  CHECK(planar_cavity_cooperativity(1e4, 1e-6, 10e-9, 1e-6) == doctest::Approx(1e4 / (pi3 * 1e-4)));
  CHECK(planar_cavity_cooperativity(1e4, 1e-6, 10e-9, 1e-6) == doctest::Approx(3.23e6).epsilon(2e-3));

  CHECK(cavity_mode_radius(1.0, 0.9, 0.9) == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi * 0.1)));
  CHECK(cavity_mode_radius(1.0, 0.99, 0.99) == doctest::Approx(3.99).epsilon(1e-3));
  CHECK(kind_of([] { cavity_mode_radius(1.0, 1.0, 0.99); }) == ErrorKind::ReflectivityOutOfRange);
}

TEST_CASE("estimate bundles every closed form") {
  const auto sys = validate_config(gate_config(), true);
  const auto e = estimate(sys);
  REQUIRE(e.cooperativity);
  CHECK(*e.cooperativity == doctest::Approx(100.0));
  CHECK(*e.delta_opt == doctest::Approx(80.0));
  CHECK(*e.fidelity_est == doctest::Approx(fidelity_estimate(100.0)));
  CHECK(*e.sigma_min == doctest::Approx(10.0 * 16.0 * 16.0 / (320.0 * 320.0)));
  CHECK(e.theta_ab == doctest::Approx(e.nonlinear_phase / 4.0));
  CHECK(e.theta_a == doctest::Approx(e.theta_b));
  CHECK(e.gamma_exponent > 0.0);

  GateParams lossless;
  lossless.gamma = 0.0;
  lossless.kappa = 0.0;
  const auto e0 = estimate(validate_config(gate_config(lossless), true));
  CHECK_FALSE(e0.cooperativity);
  CHECK_FALSE(e0.delta_opt);
  CHECK(e0.gamma_exponent == 0.0);
}

#include "doctest.h"

#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cphase/error.hpp"
#include "cphase/model.hpp"
#include "fixtures.hpp"

using namespace cphase;
using cphase::testing::gate_config;

namespace {

ErrorKind kind_of(const SystemConfig& cfg, bool require_detunings = false) {
  try {
    validate_config(cfg, require_detunings);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a validation error");
  return ErrorKind::InvalidConfig;
}

}  // namespace

TEST_CASE("well-formed two-dot config validates") {
  const auto sys = validate_config(gate_config());
  CHECK(sys.n_modes() == 1);
  CHECK(sys.rate_scale() == 1.0);
  CHECK(sys.dot(0).label == DotLabel::A);
  CHECK(sys.dot(1).label == DotLabel::B);
  CHECK(sys.grid().size() == 2001);
}

TEST_CASE("negative cavity loss is rejected") {
  auto cfg = gate_config();
  cfg.modes[0].kappa = -0.1;
  CHECK(kind_of(cfg) == ErrorKind::NegativeRate);
  cfg = gate_config();
  cfg.dot_b.gamma = -1.0;
  CHECK(kind_of(cfg) == ErrorKind::NegativeRate);
}

TEST_CASE("grid must cover the support plus four sigma") {
  auto cfg = gate_config();
  const double s = cfg.modes[0].drive.sigma;
  cfg.time_grid = {-s, s, 100};
  CHECK(kind_of(cfg) == ErrorKind::GridTooShort);
  cfg.time_grid = {-10.0 * s, 9.9 * s, 100};
  CHECK(kind_of(cfg) == ErrorKind::GridTooShort);
  cfg.time_grid = {-10.0 * s, 10.0 * s, 100};
  CHECK_NOTHROW(validate_config(cfg));
}

TEST_CASE("structural invariants") {
  auto cfg = gate_config();
  cfg.modes.clear();
  CHECK(kind_of(cfg) == ErrorKind::InvalidConfig);

  cfg = gate_config();
  cfg.dot_a.couplings.push_back(1.0);
  CHECK(kind_of(cfg) == ErrorKind::InvalidConfig);

  cfg = gate_config();
  cfg.fock_cutoff = 0;
  CHECK(kind_of(cfg) == ErrorKind::TruncationZero);
  cfg.modes[0].drive.amplitude = 0.0;
  CHECK_NOTHROW(validate_config(cfg));

  cfg = gate_config();
  cfg.time_grid.n_steps = 1;
  CHECK(kind_of(cfg) == ErrorKind::InvalidConfig);
  cfg = gate_config();
  std::swap(cfg.time_grid.t0, cfg.time_grid.t1);
  CHECK(kind_of(cfg) == ErrorKind::InvalidConfig);

  cfg = gate_config();
  cfg.modes[0].drive.sigma = 0.0;
  CHECK(kind_of(cfg) == ErrorKind::InvalidConfig);

  cfg = gate_config();
  cfg.numeric.rel_tol = 0.0;
  CHECK(kind_of(cfg) == ErrorKind::InvalidConfig);
  cfg = gate_config();
  cfg.numeric.min_step = 1.0;
  cfg.numeric.max_step = 0.5;
  CHECK(kind_of(cfg) == ErrorKind::InvalidConfig);

  cfg = gate_config();
  cfg.modes[0].drive.shape = PulseShape::FlatTop;
  CHECK(kind_of(cfg) == ErrorKind::InvalidConfig);
}

TEST_CASE("zero detunings only fail when estimates need them") {
  auto cfg = gate_config();
  cfg.dot_b.delta_exciton = 0.0;
  CHECK_NOTHROW(validate_config(cfg));
  CHECK(kind_of(cfg, true) == ErrorKind::ZeroDetuning);
  cfg = gate_config();
  cfg.modes[0].delta = 0.0;
  CHECK_NOTHROW(validate_config(cfg));
  CHECK(kind_of(cfg, true) == ErrorKind::ZeroDetuning);
}

TEST_CASE("gaussian envelope values") {
  DrivePulse p;
  p.amplitude = cplx(2.0, -1.0);
  p.sigma = 1.5;
  p.center = 0.3;
  const cplx peak = p.amplitude * std::pow(2.0 * std::numbers::pi * p.sigma * p.sigma, -0.25);
  CHECK(std::abs(pulse_envelope(p, p.center) - peak) < 1e-14);
  CHECK(std::abs(pulse_envelope(p, p.center + 2.0 * p.sigma) - peak * std::exp(-1.0)) < 1e-14);
  CHECK(pulse_envelope(p, p.center + 6.01 * p.sigma) == cplx(0.0));
  CHECK(pulse_envelope(p, p.center - 6.01 * p.sigma) == cplx(0.0));
}

TEST_CASE("gaussian energy normalization and truncation") {
  using boost::math::quadrature::gauss_kronrod;
  DrivePulse p;
  p.amplitude = cplx(0.6, 0.8);
  p.sigma = 2.0;
  p.center = -1.0;
  auto power = [&](double t) { return std::norm(pulse_envelope(p, t)); };
  const double inside = gauss_kronrod<double, 61>::integrate(power, p.t_start(), p.t_end(), 15, 1e-14);
  // untruncated energy is |amplitude|^2 = 1; the tails beyond 6 sigma hold erfc(6/sqrt 2)
  CHECK(1.0 - inside < 1e-7);
  CHECK(1.0 - inside == doctest::Approx(std::erfc(6.0 / std::sqrt(2.0))).epsilon(1e-3));

  // trapezoid over a validated grid
  auto cfg = gate_config();
  cfg.modes[0].drive = p;
  cfg.time_grid = {-25.0, 25.0, 2000};
  const auto sys = validate_config(cfg);
  std::vector<double> samples;
  for (double t : sys.grid().times()) samples.push_back(std::norm(pulse_envelope(sys.mode().drive, t)));
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) sum += 0.5 * (samples[i] + samples[i + 1]) * sys.grid().dt();
  CHECK(sum == doctest::Approx(std::norm(p.amplitude)).epsilon(1e-3));
}

TEST_CASE("validation is idempotent") {
  auto cfg = gate_config();
  cfg.dot_a.gamma = 2.5;
  const auto once = validate_config(cfg);
  const auto twice = validate_config(once.config());
  CHECK(twice.rate_scale() == 1.0);
  CHECK(twice.dot(0).delta_exciton == once.dot(0).delta_exciton);
  CHECK(twice.dot(1).couplings == once.dot(1).couplings);
  CHECK(twice.mode().drive.amplitude == once.mode().drive.amplitude);
  CHECK(twice.grid() == once.grid());
}

TEST_CASE("flat-top and custom-sampled envelopes") {
  DrivePulse flat;
  flat.shape = PulseShape::FlatTop;
  flat.amplitude = 3.0;
  flat.support = std::array<double, 2>{-1.0, 2.0};
  CHECK(pulse_envelope(flat, 0.5) == cplx(3.0));
  CHECK(pulse_envelope(flat, 2.5) == cplx(0.0));

  DrivePulse custom;
  custom.shape = PulseShape::CustomSampled;
  custom.amplitude = 2.0;
  custom.support = std::array<double, 2>{0.0, 2.0};
  custom.samples = {0.0, 1.0, cplx(0.0, 1.0)};
  CHECK(std::abs(pulse_envelope(custom, 0.5) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(pulse_envelope(custom, 1.5) - cplx(1.0, 1.0)) < 1e-15);
  CHECK(std::abs(pulse_envelope(custom, 2.0) - cplx(0.0, 2.0)) < 1e-15);
  CHECK(pulse_envelope(custom, -0.1) == cplx(0.0));
}

TEST_CASE("rates are rescaled to gamma of dot A") {
  auto cfg = gate_config();
  const double s = 4.0;
  cfg.dot_a.gamma = s;
  cfg.dot_b.gamma = 2.0;
  const auto sys = validate_config(cfg);
  CHECK(sys.rate_scale() == s);
  CHECK(sys.dot(0).gamma == 1.0);
  CHECK(sys.dot(1).gamma == doctest::Approx(0.5));
  CHECK(sys.dot(0).delta_exciton == doctest::Approx(cfg.dot_a.delta_exciton / s));
  CHECK(std::abs(sys.dot(0).couplings[0] - cfg.dot_a.couplings[0] / s) < 1e-12);
  CHECK(sys.mode().kappa == doctest::Approx(cfg.modes[0].kappa / s));
  CHECK(sys.grid().t1 == doctest::Approx(cfg.time_grid.t1 * s));
  // the drive is a rate: f'(s t) = f(t) / s
  for (double t : {-3.0, 0.0, 1.7}) {
    const cplx raw = pulse_envelope(cfg.modes[0].drive, t);
    const cplx scaled = pulse_envelope(sys.mode().drive, s * t);
    CHECK(std::abs(scaled - raw / s) < 1e-12 * std::abs(raw));
  }
}

TEST_CASE("test state and grid helpers") {
  const auto rho = test_state();
  const Eigen::Vector4cd psi(0.5, -0.5, 0.5, -0.5);
  CHECK((rho - psi * psi.adjoint()).norm() < 1e-15);

  TimeGrid g{-1.0, 2.0, 7};
  CHECK(g.size() == 8);
  CHECK(g.time(0) == -1.0);
  CHECK(g.time(7) == 2.0);
  CHECK(g.times().size() == 8);

  auto cfg = gate_config();
  Eigen::Matrix4cd custom = Eigen::Matrix4cd::Zero();
  custom(3, 3) = 1.0;
  cfg.initial_state = custom;
  CHECK(initial_qubit_state(validate_config(cfg)) == custom);
}

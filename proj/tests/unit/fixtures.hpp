#pragma once

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <string>

#include "cphase/model.hpp"

namespace cphase::testing {

/// Symmetric two-dot, one-mode gate configuration.
struct GateParams {
  double g = 20.0;
  double kappa = 16.0;
  double delta = 80.0;
  double big_delta = 320.0;
  double gamma = 1.0;
  double sigma = 2.5;
  double amplitude = 100.0;
  int n_steps = 2000;
  int fock_cutoff = 3;
};

inline SystemConfig gate_config(const GateParams& p = {}) {
  SystemConfig cfg;
  for (DotParams* d : {&cfg.dot_a, &cfg.dot_b}) {
    d->delta_exciton = p.big_delta;
    d->couplings = {cplx(p.g, 0.0)};
    d->gamma = p.gamma;
  }
  CavityMode mode;
  mode.delta = p.delta;
  mode.kappa = p.kappa;
  mode.drive.amplitude = p.amplitude;
  mode.drive.sigma = p.sigma;
  cfg.modes = {mode};
  cfg.fock_cutoff = p.fock_cutoff;
  cfg.time_grid = {-10.0 * p.sigma, 10.0 * p.sigma, p.n_steps};
  cfg.numeric.abs_tol = 1e-9;
  cfg.numeric.rel_tol = 1e-7;
  return cfg;
}

/// Loss-free version of the default gate.
inline SystemConfig lossless_config(GateParams p = {}) {
  p.gamma = 0.0;
  p.kappa = 0.0;
  return gate_config(p);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("cphase_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Haar-ish random 2x2 unitary from three Euler angles and a phase.
inline Eigen::Matrix2cd random_unitary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * 3.14159265358979);
  const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
  const cplx i(0.0, 1.0);
  Eigen::Matrix2cd m;
  m << std::exp(i * (a + b)) * std::cos(c), std::exp(i * (a - b)) * std::sin(c),
      -std::exp(-i * (a - b)) * std::sin(c), std::exp(-i * (a + b)) * std::cos(c);
  return std::exp(i * d) * m;
}

}  // namespace cphase::testing

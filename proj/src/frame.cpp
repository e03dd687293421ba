#include "cphase/frame.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "cphase/error.hpp"
#include "cphase/ode.hpp"

namespace cphase {

ComplexTrajectory::ComplexTrajectory(TimeGrid g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size())
    throw Error(ErrorKind::GridMismatch, "trajectory has " + std::to_string(values.size()) + " samples for a " +
                                             std::to_string(grid.size()) + "-point grid");
}

double integrate(const TimeGrid& grid, std::span<const double> s) {
  if (s.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "sample count does not match grid");
  double sum = 0.5 * (s.front() + s.back());
  for (std::size_t i = 1; i + 1 < s.size(); ++i) sum += s[i];
  return sum * grid.dt();
}

cplx integrate(const TimeGrid& grid, std::span<const cplx> s) {
  if (s.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "sample count does not match grid");
  cplx sum = 0.5 * (s.front() + s.back());
  for (std::size_t i = 1; i + 1 < s.size(); ++i) sum += s[i];
  return sum * grid.dt();
}

ComplexTrajectory displacement_trajectory(const std::function<cplx(double)>& drive, double delta, double kappa,
                                          const TimeGrid& grid, const NumericOptions& opts,
                                          std::span<const double> breakpoints) {
  const cplx decay(kappa / 2.0, delta);  // i delta + kappa/2
  const cplx minus_i(0.0, -1.0);
  ode::Rhs rhs = [&](double t, const ode::State& y, ode::State& dy) {
    dy[0] = minus_i * drive(t) - decay * y[0];
  };
  ComplexTrajectory out(grid);
  const auto times = grid.times();
  ode::AdaptiveOptions ao;
  ao.abs_tol = opts.abs_tol;
  ao.rel_tol = opts.rel_tol;
  ao.min_step = opts.min_step;
  ao.max_step = opts.max_step;
  ode::integrate_dopri5(rhs, ode::State::Zero(1), times, ao,
                        [&](std::size_t i, double, const ode::State& y) { out.values[i] = y[0]; }, breakpoints);
  return out;
}

ComplexTrajectory displacement_trajectory(const CavityMode& mode, const TimeGrid& grid, const NumericOptions& opts) {
  const auto& pulse = mode.drive;
  if (pulse.amplitude == cplx(0.0, 0.0)) return ComplexTrajectory(grid);
  const double bps[] = {pulse.t_start(), pulse.t_end()};
  return displacement_trajectory([&](double t) { return pulse_envelope(pulse, t); }, mode.delta, mode.kappa, grid,
                                 opts, bps);
}

ComplexTrajectory effective_rabi(const DotParams& dot, std::span<const ComplexTrajectory> alphas) {
  if (alphas.size() != dot.couplings.size())
    throw Error(ErrorKind::GridMismatch, "need one displacement trajectory per cavity mode");
  if (alphas.empty()) throw Error(ErrorKind::GridMismatch, "no displacement trajectories");
  ComplexTrajectory out(alphas.front().grid);
  for (std::size_t m = 0; m < alphas.size(); ++m) {
    if (!(alphas[m].grid == out.grid) || alphas[m].size() != out.size())
      throw Error(ErrorKind::GridMismatch, "displacement trajectories live on different grids");
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += dot.couplings[m] * alphas[m].values[i];
  }
  return out;
}

cplx steady_state_amplitude(const CavityMode& mode, cplx f0) {
  const cplx decay(mode.kappa / 2.0, mode.delta);
  if (decay == cplx(0.0, 0.0)) throw Error(ErrorKind::DegenerateMode, "delta = kappa = 0 has no fixed point");
  return cplx(0.0, -1.0) * f0 / decay;
}

DisplacementField::DisplacementField(const CavityMode& mode, const TimeGrid& grid, const NumericOptions& opts)
    : mode_(mode), alpha_(displacement_trajectory(mode, grid, opts)) {}

cplx DisplacementField::derivative(std::size_t i) const {
  const double t = alpha_.time(i);
  return cplx(0.0, -1.0) * pulse_envelope(mode_.drive, t) - cplx(mode_.kappa / 2.0, mode_.delta) * alpha_.values[i];
}

cplx DisplacementField::operator()(double t) const {
  const auto& g = alpha_.grid;
  if (t <= g.t0) return alpha_.values.front();
  if (t >= g.t1) {
    // free ring-down after the grid (the drive is off there)
    return alpha_.values.back() * std::exp(-cplx(mode_.kappa / 2.0, mode_.delta) * (t - g.t1));
  }
  const double h = g.dt();
  auto i = static_cast<std::size_t>((t - g.t0) / h);
  if (i >= alpha_.size() - 1) i = alpha_.size() - 2;
  const double s = (t - alpha_.time(i)) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * alpha_.values[i] + h10 * h * derivative(i) + h01 * alpha_.values[i + 1] + h11 * h * derivative(i + 1);
}

void write_trajectory_csv(const ComplexTrajectory& traj, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path.string() + "'");
  std::fprintf(f, "t,re,im\n");
  for (std::size_t i = 0; i < traj.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g\n", traj.time(i), traj.values[i].real(), traj.values[i].imag());
  std::fclose(f);
}

ComplexTrajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (line != "t,re,im") throw Error(ErrorKind::InvalidConfig, path.string() + ": expected header t,re,im");
  std::vector<double> t;
  std::vector<cplx> v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double a = 0, b = 0, c = 0;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &a, &b, &c) != 3)
      throw Error(ErrorKind::InvalidConfig, path.string() + ": malformed row '" + line + "'");
    t.push_back(a);
    v.emplace_back(b, c);
  }
  if (t.size() < 3) throw Error(ErrorKind::InvalidConfig, path.string() + ": need at least three samples");
  TimeGrid grid{t.front(), t.back(), static_cast<int>(t.size() - 1)};
  return ComplexTrajectory(grid, std::move(v));
}

}  // namespace cphase

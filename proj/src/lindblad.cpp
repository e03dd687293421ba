#include "cphase/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "cphase/entangle.hpp"
#include "cphase/error.hpp"
#include "cphase/frame.hpp"

namespace cphase {

using Eigen::Index;
using Eigen::MatrixXcd;
using Sparse = Eigen::SparseMatrix<cplx>;

MasterEquation gate_master_equation(const ValidatedSystem& sys) {
  MasterEquation eq;
  eq.space = build_space(sys);
  eq.dim = eq.space->dim();
  eq.truncation_threshold = sys.numeric().truncation_threshold;
  auto model = std::make_shared<const HamiltonianModel>(sys, *eq.space);
  auto field = std::make_shared<const DisplacementField>(sys.mode(0), sys.grid(), sys.numeric());
  const cplx g_a = sys.dot(0).couplings.at(0);
  const cplx g_b = sys.dot(1).couplings.at(0);
  eq.hamiltonian = [model, field, g_a, g_b](double t, MatrixXcd& h) {
    const cplx alpha = (*field)(t);
    model->at(g_a * alpha, g_b * alpha, h);
  };
  for (const auto& c : lindblad_ops(sys, *eq.space)) eq.collapse.push_back(to_sparse(c.op));
  const auto& pulse = sys.mode(0).drive;
  eq.breakpoints = {pulse.t_start(), pulse.t_end()};
  return eq;
}

namespace {

double top_fock_population(const MatrixXcd& rho, const HilbertSpace& space) {
  double p = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Index i = space.index(a, b, space.fock_cutoff());
      p += rho(i, i).real();
    }
  return p;
}

// Column-major vectorization: vec(A rho B) = (B^T x A) vec(rho).
MatrixXcd liouvillian(const MasterEquation& eq, double t, const MatrixXcd& sum_ll) {
  const Index d = eq.dim;
  MatrixXcd h(d, d);
  eq.hamiltonian(t, h);
  const MatrixXcd heff = h - cplx(0.0, 0.5) * sum_ll;
  const MatrixXcd id = MatrixXcd::Identity(d, d);
  MatrixXcd out = MatrixXcd::Zero(d * d, d * d);
  auto add_kron = [&](const MatrixXcd& left, const MatrixXcd& right, cplx w) {
    // w * (left x right)
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        if (left(i, j) != cplx(0.0)) out.block(i * d, j * d, d, d) += (w * left(i, j)) * right;
  };
  add_kron(id, heff, cplx(0.0, -1.0));
  add_kron(heff.conjugate(), id, cplx(0.0, 1.0));
  for (const auto& l : eq.collapse) {
    const MatrixXcd ld(l);
    add_kron(ld.conjugate(), ld, 1.0);
  }
  return out;
}

}  // namespace

ode::Stats evolve_master(const MasterEquation& eq, const MatrixXcd& rho0, std::span<const double> times,
                         const NumericOptions& opts, const MasterObserver& observe) {
  const Index d = eq.dim;
  if (rho0.rows() != d || rho0.cols() != d)
    throw Error(ErrorKind::GridMismatch, "initial state dimension does not match the master equation");

  MatrixXcd sum_ll = MatrixXcd::Zero(d, d);
  std::vector<Sparse> adj;
  for (const auto& l : eq.collapse) {
    adj.push_back(l.adjoint());
    sum_ll += MatrixXcd(adj.back() * l);
  }

  MatrixXcd h(d, d), k(d, d), lr(d, d);
  ode::Rhs rhs = [&](double t, const ode::State& y, ode::State& dy) {
    eq.hamiltonian(t, h);
    h -= cplx(0.0, 0.5) * sum_ll;  // effective non-Hermitian part
    const Eigen::Map<const MatrixXcd> rho(y.data(), d, d);
    Eigen::Map<MatrixXcd> out(dy.data(), d, d);
    k.noalias() = h * rho;
    out = cplx(0.0, -1.0) * k + cplx(0.0, 1.0) * k.adjoint();
    for (std::size_t c = 0; c < eq.collapse.size(); ++c) {
      lr.noalias() = eq.collapse[c] * rho;
      out.noalias() += lr * adj[c];
    }
  };

  ode::Projection symmetrize = [d](ode::State& y) {
    Eigen::Map<MatrixXcd> rho(y.data(), d, d);
    rho = (0.5 * (rho + rho.adjoint())).eval();
  };

  DensityMatrix sample;
  ode::Observer obs = [&](std::size_t i, double t, const ode::State& y) {
    sample.time = t;
    sample.rho = Eigen::Map<const MatrixXcd>(y.data(), d, d);
    if (eq.space) {
      const double top = top_fock_population(sample.rho, *eq.space);
      if (top > eq.truncation_threshold) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "top Fock level population %.3g exceeds %.3g at t = %.6g", top,
                      eq.truncation_threshold, t);
        throw Error(ErrorKind::TruncationOverflow, buf);
      }
    }
    if (observe) observe(i, sample);
  };

  ode::State y = Eigen::Map<const ode::State>(rho0.data(), d * d);
  ode::AdaptiveOptions ao;
  ao.abs_tol = opts.abs_tol;
  ao.rel_tol = opts.rel_tol;
  ao.min_step = opts.min_step;
  ao.max_step = opts.max_step;

  switch (opts.integrator) {
    case Integrator::FixedRk4: {
      const std::size_t intervals = times.size() > 1 ? times.size() - 1 : 1;
      const std::size_t per = opts.rk4_steps > 0 ? std::max<std::size_t>(1, opts.rk4_steps / intervals) : 1;
      return ode::integrate_rk4(rhs, y, times, per, obs, symmetrize);
    }
    case Integrator::AdaptiveEmbedded:
      return ode::integrate_dopri5(rhs, y, times, ao, obs, eq.breakpoints, symmetrize);
    case Integrator::SemiImplicit:
      return ode::integrate_trapezoid([&](double t) { return liouvillian(eq, t, sum_ll); }, y, times, ao, obs,
                                      symmetrize);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown integrator");
}

std::vector<DensityMatrix> evolve_master(const MasterEquation& eq, const MatrixXcd& rho0,
                                         std::span<const double> times, const NumericOptions& opts,
                                         ode::Stats* stats) {
  std::vector<DensityMatrix> out;
  out.reserve(times.size());
  const auto st = evolve_master(eq, rho0, times, opts, [&](std::size_t, const DensityMatrix& s) { out.push_back(s); });
  if (stats) *stats = st;
  return out;
}

void StateChecks::add(const MatrixXcd& rho) {
  ++samples;
  max_trace_error = std::max(max_trace_error, std::abs(rho.trace() - cplx(1.0)));
  const double norm = std::max(rho.norm(), 1e-300);
  max_hermiticity_error = std::max(max_hermiticity_error, (rho - rho.adjoint()).norm() / norm);
  const MatrixXcd h = 0.5 * (rho + rho.adjoint());
  const double lo = Eigen::SelfAdjointEigenSolver<MatrixXcd>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  min_eigenvalue = samples == 1 ? lo : std::min(min_eigenvalue, lo);
}

MatrixXcd embed_qubit_state(const Eigen::Matrix4cd& rho, const HilbertSpace& space) {
  MatrixXcd out = MatrixXcd::Zero(space.dim(), space.dim());
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(space.index(r / 2, r % 2, 0), space.index(c / 2, c % 2, 0)) = rho(r, c);
  return out;
}

GateRun gate_run(const ValidatedSystem& sys) {
  const MasterEquation eq = gate_master_equation(sys);
  const HilbertSpace& space = *eq.space;
  const MatrixXcd n_op = space.number();
  const MatrixXcd trion_a = space.dot_operator(0, kTrion, kTrion);
  const MatrixXcd trion_b = space.dot_operator(1, kTrion, kTrion);
  const auto times = sys.grid().times();

  GateRun run;
  run.samples.reserve(times.size());
  run.stats = evolve_master(eq, embed_qubit_state(initial_qubit_state(sys), space), times, sys.numeric(),
                            [&](std::size_t i, const DensityMatrix& s) {
                              MasterSample row;
                              row.t = s.time;
                              row.trace = s.rho.trace().real();
                              row.photons = (s.rho * n_op).trace().real();
                              row.trion_a = (s.rho * trion_a).trace().real();
                              row.trion_b = (s.rho * trion_b).trace().real();
                              row.top_fock = top_fock_population(s.rho, space);
                              for (int k = 0; k < 6; ++k) {
                                const auto [a, b] = kCoherencePairs[k];
                                row.coherence[k] = std::abs(s.rho(space.index(a / 2, a % 2, 0),
                                                                  space.index(b / 2, b % 2, 0)));
                              }
                              run.samples.push_back(row);
                              run.checks.add(s.rho);
                              if (i + 1 == times.size()) run.final_state = s.rho;
                            });
  const QubitState q = reduce_to_qubits(run.final_state, space);
  run.rho = q.rho;
  run.leakage = q.leakage;
  run.photon_residue = (run.final_state * n_op).trace().real();
  run.concurrence = concurrence(run.rho);
  return run;
}

void write_master_csv(std::span<const MasterSample> samples, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path.string() + "'");
  std::fprintf(f, "t,trace,photons,trion_a,trion_b,top_fock,coh_00_01,coh_00_10,coh_00_11,coh_01_10,coh_01_11,"
                  "coh_10_11\n");
  for (const auto& s : samples) {
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", s.t, s.trace, s.photons, s.trion_a, s.trion_b, s.top_fock);
    for (double c : s.coherence) std::fprintf(f, ",%.17g", c);
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

}  // namespace cphase

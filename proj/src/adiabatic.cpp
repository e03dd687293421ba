#include "cphase/adiabatic.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "cphase/error.hpp"
#include "cphase/frame.hpp"

namespace cphase {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;

namespace {

constexpr double kStepOverlap = 0.9;
constexpr double kBareOverlap = 0.999;
constexpr double kStartGap = 1e-9;  // relative to the spectral scale of the block

const char* sector_name(int s) {
  static const char* names[] = {"00", "01", "10", "11"};
  return names[s];
}

}  // namespace

std::array<double, 4> EigenTrajectory::sector_phases() const {
  std::array<double, 4> phi{};
  for (int s = 0; s < 4; ++s) {
    const double total_s = cumulative_phase[s].back();
    const double total_0 = cumulative_phase[0].back();
    phi[s] = (total_s - total_0) - (end_phases[s] - end_phases[0]);
  }
  return phi;
}

EigenTrajectory eigen_track(const ValidatedSystem& sys) {
  const HilbertSpace space = build_space(sys);
  const HamiltonianModel model(sys, space);
  const auto collapse = lindblad_ops(sys, space);
  const auto& grid = sys.grid();
  const std::size_t n_t = grid.size();

  const ComplexTrajectory alpha = displacement_trajectory(sys.mode(0), grid, sys.numeric());
  const cplx g_a = sys.dot(0).couplings.at(0);
  const cplx g_b = sys.dot(1).couplings.at(0);

  EigenTrajectory out;
  out.grid = grid;
  out.eigenvalue_sum.assign(n_t, 0.0);
  out.hamiltonian_trace.assign(n_t, 0.0);

  for (int s = 0; s < 4; ++s) {
    const auto& idx = space.sector_indices(s);
    const auto m = static_cast<Index>(idx.size());
    Index bare = 0;
    while (idx[bare] != space.bare_index(s)) ++bare;

    std::vector<MatrixXcd> jumps;
    for (const auto& c : collapse) jumps.push_back(sector_block(c.op, space, s));

    auto& lam = out.eigenvalues[s];
    auto& vecs = out.eigenvectors[s];
    lam.resize(n_t);
    vecs.resize(n_t);
    out.loss_rate[s].resize(n_t);
    out.jump_expectation[s].assign(n_t, std::vector<cplx>(jumps.size()));

    VectorXcd prev(m);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es;
    for (std::size_t i = 0; i < n_t; ++i) {
      const MatrixXcd h = model.sector_block(s, g_a * alpha[i], g_b * alpha[i]);
      es.compute(h);
      if (es.info() != Eigen::Success)
        throw Error(ErrorKind::TrackingLoss, std::string("diagonalization failed in sector ") + sector_name(s));
      out.eigenvalue_sum[i] += es.eigenvalues().sum();
      out.hamiltonian_trace[i] += h.trace().real();

      const MatrixXcd& v = es.eigenvectors();
      VectorXcd cur;
      if (i == 0) {
        Index k = 0;
        const double ov = v.row(bare).cwiseAbs().maxCoeff(&k);
        out.start_overlap[s] = ov;
        if (ov < kBareOverlap) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "sector %s: best overlap with the bare state at t0 is %.6f", sector_name(s), ov);
          throw Error(ErrorKind::DegenerateStart, buf);
        }
        const auto& ev = es.eigenvalues();
        const double scale = 1.0 + ev.cwiseAbs().maxCoeff();
        for (Index j = 0; j < m; ++j)
          if (j != k && std::abs(ev[j] - ev[k]) < kStartGap * scale) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "sector %s: bare state degenerate with another level at t0 (energy %.6g)",
                          sector_name(s), ev[k]);
            throw Error(ErrorKind::DegenerateStart, buf);
          }
        const cplx z = v(bare, k);
        cur = v.col(k) * (std::conj(z) / std::abs(z));
        lam[i] = es.eigenvalues()[k];
      } else {
        const VectorXcd ov = v.adjoint() * prev;  // <v_k | prev>
        Index k = 0;
        const double best = ov.cwiseAbs().maxCoeff(&k);
        out.min_step_overlap = std::min(out.min_step_overlap, best);
        if (best < kStepOverlap) {
          char buf[160];
          std::snprintf(buf, sizeof buf, "sector %s: eigenvector overlap %.4f between t = %.6g and t = %.6g",
                        sector_name(s), best, grid.time(i - 1), grid.time(i));
          throw Error(ErrorKind::TrackingLoss, buf);
        }
        cur = v.col(k) * (ov[k] / std::abs(ov[k]));
        lam[i] = es.eigenvalues()[k];
      }
      prev = cur;

      double rate = 0.0;
      for (std::size_t c = 0; c < jumps.size(); ++c) {
        const VectorXcd lv = jumps[c] * cur;
        rate += lv.squaredNorm();
        out.jump_expectation[s][i][c] = cur.dot(lv);
      }
      out.loss_rate[s][i] = rate;

      VectorXcd full = VectorXcd::Zero(space.dim());
      for (Index r = 0; r < m; ++r) full[idx[r]] = cur[r];
      vecs[i] = std::move(full);
    }

    const cplx end = prev[bare];
    out.end_overlap[s] = std::abs(end);
    if (out.end_overlap[s] < kBareOverlap) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "sector %s: overlap with the bare state at t1 is %.6f", sector_name(s),
                    out.end_overlap[s]);
      throw Error(ErrorKind::TrackingLoss, buf);
    }
    out.end_phases[s] = std::arg(end);

    auto& cum = out.cumulative_phase[s];
    cum.assign(n_t, 0.0);
    const double h = grid.dt();
    for (std::size_t i = 1; i < n_t; ++i) cum[i] = cum[i - 1] + 0.5 * h * (lam[i - 1] + lam[i]);
  }
  return out;
}

double tracked_theta_ab(const EigenTrajectory& traj) {
  const auto p = traj.sector_phases();
  return -(p[3] + p[0] - p[1] - p[2]) / 4.0;
}

AdiabaticResult adiabatic_evolve(const ValidatedSystem& sys) {
  AdiabaticResult res;
  res.trajectory = eigen_track(sys);
  const auto& tr = res.trajectory;
  const auto& grid = tr.grid;
  const bool refeed = sys.numeric().adiabatic_decay == AdiabaticDecay::Refeed;
  const Eigen::Matrix4cd rho0 = initial_qubit_state(sys);

  std::array<cplx, 4> amp_phase;  // exp(-i int lambda + i beta) per branch
  for (int s = 0; s < 4; ++s)
    amp_phase[s] = std::exp(cplx(0.0, tr.end_phases[s] - tr.cumulative_phase[s].back()));

  std::vector<cplx> integrand(grid.size());
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        cplx k = -0.5 * (tr.loss_rate[a][i] + tr.loss_rate[b][i]);
        if (refeed) {
          const auto& la = tr.jump_expectation[a][i];
          const auto& lb = tr.jump_expectation[b][i];
          for (std::size_t c = 0; c < la.size(); ++c) k += la[c] * std::conj(lb[c]);
        }
        integrand[i] = k;
      }
      const cplx e = integrate(grid, integrand);
      const cplx factor = std::exp(e) * amp_phase[a] * std::conj(amp_phase[b]);
      res.rho_raw(a, b) = rho0(a, b) * factor;
      res.rho_raw(b, a) = std::conj(res.rho_raw(a, b));
    }
  }
  const double trace = res.rho_raw.trace().real();
  res.leakage = 1.0 - trace;
  res.rho = res.rho_raw / trace;

  res.phases = extract_phases(tr.sector_phases());
  for (int k = 0; k < 6; ++k) {
    const auto [i, j] = kCoherencePairs[k];
    const double before = std::abs(rho0(i, j));
    res.phases.decay_exponents[k] = before > 0.0 ? -std::log(std::abs(res.rho_raw(i, j)) / before) : 0.0;
  }
  double mean = 0.0;
  for (int s = 0; s < 4; ++s) mean += (tr.end_phases[s] - tr.cumulative_phase[s].back()) / 4.0;
  res.phases.global_phase = wrap_angle(mean, -std::numbers::pi, 2.0 * std::numbers::pi);
  res.concurrence = concurrence(res.rho);
  return res;
}

void write_eigen_csv(const EigenTrajectory& traj, const std::filesystem::path& path) {
  std::FILE* f = std::fopen(path.string().c_str(), "w");
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path.string() + "'");
  std::fprintf(f, "t,lambda_00,lambda_01,lambda_10,lambda_11,phase_00,phase_01,phase_10,phase_11\n");
  for (std::size_t i = 0; i < traj.grid.size(); ++i) {
    std::fprintf(f, "%.17g", traj.grid.time(i));
    for (int s = 0; s < 4; ++s) std::fprintf(f, ",%.17g", traj.eigenvalues[s][i]);
    for (int s = 0; s < 4; ++s) std::fprintf(f, ",%.17g", traj.cumulative_phase[s][i]);
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

}  // namespace cphase

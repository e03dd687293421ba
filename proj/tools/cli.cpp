#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <numbers>
#include <ostream>

#include "CLI11.hpp"

#include "cphase/adiabatic.hpp"
#include "cphase/config_io.hpp"
#include "cphase/error.hpp"
#include "cphase/frame.hpp"
#include "cphase/lindblad.hpp"
#include "cphase/perturb.hpp"
#include "cphase/report.hpp"
#include "cphase/sweep.hpp"

#ifndef CPHASE_VERSION
#define CPHASE_VERSION "unknown"
#endif

namespace cphase::cli {

namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::InvalidConfig, "cannot create directory '" + dir.string() + "': " + ec.message());
}

std::optional<AnalyticEstimates> try_estimate(const SystemConfig& cfg) {
  try {
    const auto sys = validate_config(cfg, true);
    return to_config_units(estimate(sys), sys.rate_scale());
  } catch (const Error&) {
    return std::nullopt;
  }
}

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int cmd_estimate(const std::string& path, const std::string& out_path, std::ostream& out) {
  const SystemConfig cfg = load_config(path);
  const auto sys = validate_config(cfg, true);
  json j = estimates_to_json(to_config_units(estimate(sys), sys.rate_scale()));
  j["config_hash"] = config_hash(cfg);
  if (!out_path.empty()) write_json(j, out_path);
  out << j.dump(2) << "\n";
  return kOk;
}

/// Sector paths alpha^{jk}(t) of the displaced field, for phase-space plots.
void write_sector_paths(const ValidatedSystem& sys, const fs::path& dir) {
  const auto drives = drive_trajectories(sys);
  const auto& c = sys.config();
  const auto paths = dispersive_amplitudes(drives.alphas, c.dot_a, c.dot_b, c.modes);
  const char* names[] = {"00", "01", "10", "11"};
  for (int s = 0; s < 4; ++s)
    write_trajectory_csv(paths.paths[s].front(), dir / (std::string("alpha_") + names[s] + ".csv"));
}

int cmd_simulate(const std::string& path, const std::string& solver, const std::string& out_dir, bool calibrate,
                 double target, std::ostream& out) {
  SystemConfig cfg = load_config(path);
  if (solver != "adiabatic" && solver != "lindblad")
    throw Error(ErrorKind::InvalidConfig, "unknown solver '" + solver + "' (adiabatic or lindblad)");
  validate_config(cfg);
  if (calibrate) cfg = with_amplitude(cfg, std::abs(calibrate_amplitude(cfg, target).amplitude));
  const auto sys = validate_config(cfg);
  build_space(sys);  // both solvers need a single mode

  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  RunReport rep;
  rep.config = to_json(cfg);
  rep.config_hash = config_hash(cfg);
  rep.solver = solver;
  rep.estimates = try_estimate(cfg);

  const auto start = std::chrono::steady_clock::now();
  if (solver == "adiabatic") {
    const auto res = adiabatic_evolve(sys);
    rep.diagnostics.wall_time = elapsed(start);
    rep.phases = res.phases;
    rep.concurrence = res.concurrence;
    rep.leakage = res.leakage;
    rep.rho = res.rho;
    rep.diagnostics.steps = static_cast<long>(sys.grid().size());
    rep.diagnostics.min_eigen_overlap = res.trajectory.min_step_overlap;
    write_eigen_csv(res.trajectory, dir / "eigen.csv");
  } else {
    const auto run = gate_run(sys);
    rep.diagnostics.wall_time = elapsed(start);
    rep.concurrence = run.concurrence;
    rep.leakage = run.leakage;
    rep.photon_residue = run.photon_residue;
    rep.rho = run.rho;
    rep.phases = state_phases(run.rho, initial_qubit_state(sys));
    rep.diagnostics.steps = run.stats.steps;
    rep.diagnostics.rejected = run.stats.rejected;
    rep.diagnostics.rhs_evals = run.stats.rhs_evals;
    rep.diagnostics.max_trace_error = run.checks.max_trace_error;
    rep.diagnostics.max_hermiticity_error = run.checks.max_hermiticity_error;
    rep.diagnostics.min_eigenvalue = run.checks.min_eigenvalue;
    write_master_csv(run.samples, dir / "master.csv");
    write_json(matrix_to_json(run.final_state), dir / "final_state.json");
  }
  write_trajectory_csv(displacement_trajectory(sys.mode(0), sys.grid(), sys.numeric()), dir / "alpha.csv");
  if (sys.dot(0).delta_exciton != 0.0 && sys.dot(1).delta_exciton != 0.0 && sys.mode(0).delta != 0.0)
    write_sector_paths(sys, dir);
  write_json(report_to_json(rep), dir / "report.json");

  char line[256];
  std::snprintf(line, sizeof line, "solver=%s concurrence=%.9g theta_ab=%.9g leakage=%.3g\n", solver.c_str(),
                rep.concurrence, rep.phases.theta_ab, rep.leakage);
  out << line;
  return kOk;
}

int cmd_sweep(const std::string& path, const std::string& grid, const std::string& out_dir, int jobs,
              std::ostream& out, std::ostream& err) {
  const SystemConfig cfg = load_config(path);
  validate_config(cfg);
  const auto axes = parse_grid_spec(grid);
  ensure_dir(out_dir);
  const fs::path dir(out_dir);

  const std::string started = utc_now();
  const auto result = concurrence_surface(cfg, axes, jobs, [&](const SweepRecord& r) {
    std::string where;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s%s=%.6g", i ? " " : "", axes[i].name.c_str(), r.axis_values[i]);
      where += buf;
    }
    if (r.ok()) {
      char buf[128];
      std::snprintf(buf, sizeof buf, " concurrence=%.6f delta=%.6g", r.concurrence, r.delta_opt_numeric);
      err << "point " << where << buf << "\n";
    } else {
      err << "point " << where << " failed: " << r.error << "\n";
    }
  });
  write_sweep_csv(result, dir / "sweep.csv");

  json meta;
  meta["config_hash"] = result.base_hash;
  meta["code_version"] = CPHASE_VERSION;
  meta["started"] = started;
  meta["finished"] = utc_now();
  meta["grid"] = grid;
  meta["jobs"] = jobs;
  meta["summary"] = sweep_summary(result);
  write_json(meta, dir / "sweep_meta.json");

  out << result.succeeded() << "/" << result.records.size() << " points succeeded\n";
  return result.succeeded() > 0 ? kOk : kSweepFailed;
}

int cmd_calibrate(const std::string& path, double target, const std::string& write_path, std::ostream& out) {
  SystemConfig cfg = load_config(path);
  validate_config(cfg);
  const auto cal = calibrate_amplitude(cfg, target);
  json j{{"amplitude", complex_to_json(cal.amplitude)},
         {"theta_ab", cal.theta_ab},
         {"target", target},
         {"seed_amplitude", cal.seed_amplitude},
         {"evaluations", cal.evaluations}};
  if (!write_path.empty()) save_config(with_amplitude(cfg, std::abs(cal.amplitude)), write_path);
  out << j.dump(2) << "\n";
  return kOk;
}

int default_jobs() {
  if (const char* env = std::getenv("CPHASE_SIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-pulse cavity-QED controlled-phase gate simulator"};
  app.require_subcommand(1);

  std::string config, out_path, solver = "adiabatic", grid, write_path;
  double target = std::numbers::pi / 4;
  bool calibrate = false;
  int jobs = 0;

  auto* est = app.add_subcommand("estimate", "closed-form estimates as JSON");
  est->add_option("config", config, "config JSON")->required();
  est->add_option("--out", out_path, "also write the JSON here");

  auto* sim = app.add_subcommand("simulate", "run one gate and write a report");
  sim->add_option("config", config, "config JSON")->required();
  sim->add_option("--solver", solver, "adiabatic or lindblad");
  sim->add_option("--out", out_path, "output directory")->required();
  sim->add_flag("--calibrate", calibrate, "calibrate the amplitude first");
  sim->add_option("--target", target, "calibration target angle (rad)");

  auto* swp = app.add_subcommand("sweep", "optimized concurrence over a parameter grid");
  swp->add_option("config", config, "base config JSON")->required();
  swp->add_option("--grid", grid, "e.g. \"C=10,30,100;kappa=0.25,1,4\"")->required();
  swp->add_option("--out", out_path, "output directory")->required();
  swp->add_option("--jobs", jobs, "worker threads (default: CPHASE_SIM_THREADS or 1)");

  auto* cal = app.add_subcommand("calibrate", "find the amplitude for a target angle");
  cal->add_option("config", config, "config JSON")->required();
  cal->add_option("--target", target, "target angle (rad)");
  cal->add_option("--write-config", write_path, "save the calibrated config here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*est) return cmd_estimate(config, out_path, out);
    if (*sim) return cmd_simulate(config, solver, out_path, calibrate, target, out);
    if (*swp) return cmd_sweep(config, grid, out_path, jobs > 0 ? jobs : default_jobs(), out, err);
    if (*cal) return cmd_calibrate(config, target, write_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_config_error(e.kind()) ? kConfigError : kSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverError;
  }
  return kConfigError;
}

}  // namespace cphase::cli

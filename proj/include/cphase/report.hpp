#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "cphase/config_io.hpp"
#include "cphase/entangle.hpp"
#include "cphase/perturb.hpp"

namespace cphase {

/// Estimates with delta_opt and sigma_min converted back to config units.
AnalyticEstimates to_config_units(AnalyticEstimates e, double rate_scale);

json estimates_to_json(const AnalyticEstimates& e);
AnalyticEstimates estimates_from_json(const json& j);

json phases_to_json(const GatePhases& p);
GatePhases phases_from_json(const json& j);

struct SolverDiagnostics {
  long steps = 0;
  long rejected = 0;
  long rhs_evals = 0;
  double wall_time = 0.0;  ///< seconds
  double min_eigen_overlap = 1.0;
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

struct RunReport {
  json config;
  std::string config_hash;
  std::string solver;
  std::optional<AnalyticEstimates> estimates;
  GatePhases phases;
  double concurrence = 0.0;
  double leakage = 0.0;
  std::optional<double> photon_residue;
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  SolverDiagnostics diagnostics;
};

json report_to_json(const RunReport& r);
RunReport report_from_json(const json& j);

void write_json(const json& j, const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);

}  // namespace cphase

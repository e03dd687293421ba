#include "cphase/report.hpp"

#include <fstream>

#include "cphase/error.hpp"

namespace cphase {

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string(what) + ": " + e.what());
  }
}

}  // namespace

AnalyticEstimates to_config_units(AnalyticEstimates e, double s) {
  if (e.delta_opt) *e.delta_opt *= s;
  if (e.sigma_min) *e.sigma_min /= s;
  return e;
}

json estimates_to_json(const AnalyticEstimates& e) {
  return {{"theta_a", e.theta_a},
          {"theta_b", e.theta_b},
          {"theta_ab", e.theta_ab},
          {"nonlinear_phase", e.nonlinear_phase},
          {"delta_opt", optional_number(e.delta_opt)},
          {"cooperativity", optional_number(e.cooperativity)},
          {"fidelity_est", optional_number(e.fidelity_est)},
          {"sigma_min", optional_number(e.sigma_min)},
          {"gamma_exponent", e.gamma_exponent}};
}

AnalyticEstimates estimates_from_json(const json& j) {
  return guarded("estimates", [&] {
    AnalyticEstimates e;
    e.theta_a = j.at("theta_a").get<double>();
    e.theta_b = j.at("theta_b").get<double>();
    e.theta_ab = j.at("theta_ab").get<double>();
    e.nonlinear_phase = j.at("nonlinear_phase").get<double>();
    e.delta_opt = read_optional(j, "delta_opt");
    e.cooperativity = read_optional(j, "cooperativity");
    e.fidelity_est = read_optional(j, "fidelity_est");
    e.sigma_min = read_optional(j, "sigma_min");
    e.gamma_exponent = j.at("gamma_exponent").get<double>();
    return e;
  });
}

json phases_to_json(const GatePhases& p) {
  return {{"theta_a", p.theta_a},
          {"theta_b", p.theta_b},
          {"theta_ab", p.theta_ab},
          {"global_phase", optional_number(p.global_phase)},
          {"sector_phases", p.sector_phases},
          {"decay_exponents", p.decay_exponents}};
}

GatePhases phases_from_json(const json& j) {
  return guarded("phases", [&] {
    GatePhases p;
    p.theta_a = j.at("theta_a").get<double>();
    p.theta_b = j.at("theta_b").get<double>();
    p.theta_ab = j.at("theta_ab").get<double>();
    p.global_phase = read_optional(j, "global_phase");
    p.sector_phases = j.at("sector_phases").get<std::array<double, 4>>();
    p.decay_exponents = j.at("decay_exponents").get<std::array<double, 6>>();
    return p;
  });
}

json report_to_json(const RunReport& r) {
  const auto& d = r.diagnostics;
  return {{"config", r.config},
          {"config_hash", r.config_hash},
          {"solver", r.solver},
          {"estimates", r.estimates ? estimates_to_json(*r.estimates) : json(nullptr)},
          {"phases", phases_to_json(r.phases)},
          {"concurrence", r.concurrence},
          {"leakage", r.leakage},
          {"photon_residue", optional_number(r.photon_residue)},
          {"rho", matrix_to_json(r.rho)},
          {"diagnostics",
           {{"steps", d.steps},
            {"rejected", d.rejected},
            {"rhs_evals", d.rhs_evals},
            {"wall_time", d.wall_time},
            {"min_eigen_overlap", d.min_eigen_overlap},
            {"max_trace_error", d.max_trace_error},
            {"max_hermiticity_error", d.max_hermiticity_error},
            {"min_eigenvalue", d.min_eigenvalue}}}};
}

RunReport report_from_json(const json& j) {
  return guarded("report", [&] {
    RunReport r;
    r.config = j.at("config");
    r.config_hash = j.at("config_hash").get<std::string>();
    r.solver = j.at("solver").get<std::string>();
    if (!j.at("estimates").is_null()) r.estimates = estimates_from_json(j.at("estimates"));
    r.phases = phases_from_json(j.at("phases"));
    r.concurrence = j.at("concurrence").get<double>();
    r.leakage = j.at("leakage").get<double>();
    r.photon_residue = read_optional(j, "photon_residue");
    const Eigen::MatrixXcd rho = matrix_from_json(j.at("rho"));
    if (rho.rows() != 4 || rho.cols() != 4) throw Error(ErrorKind::InvalidConfig, "report: rho must be 4x4");
    r.rho = rho;
    const auto& d = j.at("diagnostics");
    r.diagnostics.steps = d.at("steps").get<long>();
    r.diagnostics.rejected = d.at("rejected").get<long>();
    r.diagnostics.rhs_evals = d.at("rhs_evals").get<long>();
    r.diagnostics.wall_time = d.at("wall_time").get<double>();
    r.diagnostics.min_eigen_overlap = d.at("min_eigen_overlap").get<double>();
    r.diagnostics.max_trace_error = d.at("max_trace_error").get<double>();
    r.diagnostics.max_hermiticity_error = d.at("max_hermiticity_error").get<double>();
    r.diagnostics.min_eigenvalue = d.at("min_eigenvalue").get<double>();
    return r;
  });
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path.string() + "'");
  f << j.dump(2) << "\n";
}

json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot open '" + path.string() + "'");
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
}

}  // namespace cphase

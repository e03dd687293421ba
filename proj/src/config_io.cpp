#include "cphase/config_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "cphase/error.hpp"

namespace cphase {

namespace {

const char* shape_name(PulseShape s) {
  switch (s) {
    case PulseShape::Gaussian: return "gaussian";
    case PulseShape::FlatTop: return "flat-top";
    case PulseShape::CustomSampled: return "custom-sampled";
  }
  return "gaussian";
}

PulseShape shape_from(const std::string& s) {
  if (s == "gaussian") return PulseShape::Gaussian;
  if (s == "flat-top") return PulseShape::FlatTop;
  if (s == "custom-sampled") return PulseShape::CustomSampled;
  throw Error(ErrorKind::InvalidConfig, "unknown pulse shape '" + s + "'");
}

const char* integrator_name(Integrator i) {
  switch (i) {
    case Integrator::FixedRk4: return "fixed-rk4";
    case Integrator::AdaptiveEmbedded: return "adaptive-embedded";
    case Integrator::SemiImplicit: return "semi-implicit";
  }
  return "adaptive-embedded";
}

Integrator integrator_from(const std::string& s) {
  if (s == "fixed-rk4") return Integrator::FixedRk4;
  if (s == "adaptive-embedded") return Integrator::AdaptiveEmbedded;
  if (s == "semi-implicit") return Integrator::SemiImplicit;
  throw Error(ErrorKind::InvalidConfig, "unknown integrator '" + s + "'");
}

json dot_to_json(const DotParams& d) {
  json g = json::array();
  for (const auto& c : d.couplings) g.push_back(complex_to_json(c));
  return {{"label", d.label == DotLabel::A ? "A" : "B"},
          {"omega", d.omega},
          {"delta_exciton", d.delta_exciton},
          {"couplings", g},
          {"gamma", d.gamma}};
}

DotParams dot_from_json(const json& j, DotLabel label) {
  DotParams d;
  d.label = label;
  d.omega = j.value("omega", 0.0);
  d.delta_exciton = j.at("delta_exciton").get<double>();
  for (const auto& g : j.at("couplings")) d.couplings.push_back(complex_from_json(g));
  d.gamma = j.value("gamma", 1.0);
  return d;
}

json pulse_to_json(const DrivePulse& p) {
  json j = {{"shape", shape_name(p.shape)},
            {"amplitude", complex_to_json(p.amplitude)},
            {"sigma", p.sigma},
            {"center", p.center},
            {"support", {p.t_start(), p.t_end()}}};
  if (p.shape == PulseShape::CustomSampled) {
    json s = json::array();
    for (const auto& z : p.samples) s.push_back(complex_to_json(z));
    j["samples"] = s;
  }
  return j;
}

DrivePulse pulse_from_json(const json& j) {
  DrivePulse p;
  p.shape = shape_from(j.value("shape", std::string("gaussian")));
  p.amplitude = complex_from_json(j.at("amplitude"));
  p.sigma = j.value("sigma", 1.0);
  p.center = j.value("center", 0.0);
  if (j.contains("support")) {
    const auto& s = j.at("support");
    if (!s.is_array() || s.size() != 2) throw Error(ErrorKind::InvalidConfig, "support must be [t_start, t_end]");
    p.support = std::array<double, 2>{s[0].get<double>(), s[1].get<double>()};
  }
  if (j.contains("samples"))
    for (const auto& z : j.at("samples")) p.samples.push_back(complex_from_json(z));
  return p;
}

json numeric_to_json(const NumericOptions& n) {
  return {{"integrator", integrator_name(n.integrator)},
          {"abs_tol", n.abs_tol},
          {"rel_tol", n.rel_tol},
          {"max_step", n.max_step},
          {"min_step", n.min_step},
          {"rk4_steps", n.rk4_steps},
          {"x", n.x},
          {"y", n.y},
          {"adiabatic_margin", n.adiabatic_margin},
          {"adiabatic_decay", n.adiabatic_decay == AdiabaticDecay::Refeed ? "refeed" : "sink"},
          {"max_rabi_ratio", n.max_rabi_ratio},
          {"truncation_threshold", n.truncation_threshold}};
}

NumericOptions numeric_from_json(const json& j) {
  NumericOptions n;
  if (j.contains("integrator")) n.integrator = integrator_from(j.at("integrator").get<std::string>());
  n.abs_tol = j.value("abs_tol", n.abs_tol);
  n.rel_tol = j.value("rel_tol", n.rel_tol);
  n.max_step = j.value("max_step", n.max_step);
  n.min_step = j.value("min_step", n.min_step);
  n.rk4_steps = j.value("rk4_steps", n.rk4_steps);
  n.x = j.value("x", n.x);
  n.y = j.value("y", n.y);
  n.adiabatic_margin = j.value("adiabatic_margin", n.adiabatic_margin);
  if (j.contains("adiabatic_decay")) {
    const auto s = j.at("adiabatic_decay").get<std::string>();
    if (s == "refeed") n.adiabatic_decay = AdiabaticDecay::Refeed;
    else if (s == "sink") n.adiabatic_decay = AdiabaticDecay::Sink;
    else throw Error(ErrorKind::InvalidConfig, "unknown adiabatic_decay '" + s + "'");
  }
  n.max_rabi_ratio = j.value("max_rabi_ratio", n.max_rabi_ratio);
  n.truncation_threshold = j.value("truncation_threshold", n.truncation_threshold);
  return n;
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::InvalidConfig, "complex numbers are [re, im] arrays, got " + j.dump());
}

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(complex_to_json(m(r, c)));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw Error(ErrorKind::InvalidConfig, "matrix data length does not match rows*cols");
  Eigen::MatrixXcd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(data[r * cols + c]);
  return m;
}

json to_json(const SystemConfig& cfg) {
  json modes = json::array();
  for (const auto& m : cfg.modes)
    modes.push_back({{"delta", m.delta}, {"kappa", m.kappa}, {"drive", pulse_to_json(m.drive)}});
  json j = {{"dot_a", dot_to_json(cfg.dot_a)},
            {"dot_b", dot_to_json(cfg.dot_b)},
            {"modes", modes},
            {"fock_cutoff", cfg.fock_cutoff},
            {"time_grid", {{"t0", cfg.time_grid.t0}, {"t1", cfg.time_grid.t1}, {"n_steps", cfg.time_grid.n_steps}}},
            {"numeric", numeric_to_json(cfg.numeric)}};
  if (cfg.initial_state) j["initial_state"] = matrix_to_json(*cfg.initial_state);
  return j;
}

SystemConfig config_from_json(const json& j) {
  try {
    SystemConfig cfg;
    cfg.dot_a = dot_from_json(j.at("dot_a"), DotLabel::A);
    cfg.dot_b = dot_from_json(j.at("dot_b"), DotLabel::B);
    for (const auto& m : j.at("modes")) {
      CavityMode mode;
      mode.delta = m.at("delta").get<double>();
      mode.kappa = m.value("kappa", 0.0);
      mode.drive = pulse_from_json(m.at("drive"));
      cfg.modes.push_back(std::move(mode));
    }
    cfg.fock_cutoff = j.value("fock_cutoff", 3);
    const auto& g = j.at("time_grid");
    cfg.time_grid = {g.at("t0").get<double>(), g.at("t1").get<double>(), g.at("n_steps").get<int>()};
    if (j.contains("numeric")) cfg.numeric = numeric_from_json(j.at("numeric"));
    if (j.contains("initial_state")) {
      const auto m = matrix_from_json(j.at("initial_state"));
      if (m.rows() != 4 || m.cols() != 4) throw Error(ErrorKind::InvalidConfig, "initial_state must be 4x4");
      cfg.initial_state = Eigen::Matrix4cd(m);
    }
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open config file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, "cannot parse '" + path.string() + "': " + e.what());
  }
  return config_from_json(j);
}

void save_config(const SystemConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path.string() + "'");
  out << to_json(cfg).dump(2) << '\n';
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string config_hash(const SystemConfig& cfg) { return fnv1a_hex(to_json(cfg).dump()); }

}  // namespace cphase

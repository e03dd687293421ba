#include "cphase/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "cphase/adiabatic.hpp"
#include "cphase/config_io.hpp"
#include "cphase/error.hpp"
#include "cphase/perturb.hpp"

namespace cphase {

namespace {

constexpr double kCalibrationTol = 1e-6;
constexpr int kScanPoints = 9;
constexpr double kRelativeWidth = 0.01;

double theta_at(const SystemConfig& cfg, double amplitude) {
  return tracked_theta_ab(eigen_track(validate_config(with_amplitude(cfg, amplitude))));
}

/// max_j max_t |Omega_j(t)| / |Delta_j| per unit amplitude.
double rabi_ratio_per_unit(const SystemConfig& cfg) {
  const auto sys = validate_config(with_amplitude(cfg, 1.0), true);
  const auto drives = drive_trajectories(sys);
  double r = 0.0;
  for (int j = 0; j < 2; ++j) {
    const auto& om = j == 0 ? drives.omega_a : drives.omega_b;
    double peak = 0.0;
    for (const auto& v : om.values) peak = std::max(peak, std::abs(v));
    r = std::max(r, peak / std::abs(sys.dot(j).delta_exciton));
  }
  return r;
}

std::string error_text(const std::exception& e) {
  std::string s = e.what();
  if (dynamic_cast<const Error*>(&e) == nullptr) s = "Exception: " + s;
  return s;
}

}  // namespace

SystemConfig with_amplitude(const SystemConfig& cfg, double amplitude) {
  SystemConfig out = cfg;
  double largest = 0.0;
  for (const auto& m : cfg.modes) largest = std::max(largest, std::abs(m.drive.amplitude));
  for (auto& m : out.modes) m.drive.amplitude = largest > 0.0 ? amplitude * m.drive.amplitude / largest : amplitude;
  return out;
}

double seed_amplitude(const SystemConfig& cfg, double target) {
  const auto sys = validate_config(with_amplitude(cfg, 1.0), true);
  const auto& grid = sys.grid();
  std::vector<ComplexTrajectory> alphas;
  for (const auto& mode : sys.config().modes) {
    ComplexTrajectory a(grid);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = -pulse_envelope(mode.drive, a.time(i)) / mode.delta;
    alphas.push_back(std::move(a));
  }
  const auto& c = sys.config();
  const double unit = nonlinear_phase_4th(effective_rabi(c.dot_a, alphas), effective_rabi(c.dot_b, alphas), c.dot_a,
                                          c.dot_b, c.modes) /
                      4.0;
  if (!(std::abs(unit) > 0.0) || !std::isfinite(unit))
    throw Error(ErrorKind::NoBracket, "the configuration has no cavity-mediated entangling phase");
  if (target / unit < 0.0)
    throw Error(ErrorKind::TargetUnreachable, "target angle has the opposite sign of the achievable phase");
  return std::sqrt(target / unit);
}

Calibration calibrate_amplitude(const SystemConfig& cfg, double target) {
  Calibration cal;
  if (target == 0.0) return cal;

  const double seed = seed_amplitude(cfg, target);
  const double bound = cfg.numeric.max_rabi_ratio / rabi_ratio_per_unit(cfg);
  cal.seed_amplitude = seed;
  const double sign = target > 0.0 ? 1.0 : -1.0;

  double best_gap = INFINITY;
  double best_s = 0.0, best_theta = 0.0;
  auto f = [&](double s) {
    const double th = theta_at(cfg, s);
    ++cal.evaluations;
    if (std::abs(th - target) < best_gap) {
      best_gap = std::abs(th - target);
      best_s = s;
      best_theta = th;
    }
    return sign * (th - target);
  };

  double lo = 0.0, flo = -std::abs(target);
  double hi = std::min(seed, bound);
  double fhi = f(hi);
  while (fhi < 0.0) {
    if (hi >= bound) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "angle %.6g at the amplitude bound %.6g stays short of %.6g", sign * fhi + target,
                    bound, target);
      throw Error(ErrorKind::TargetUnreachable, buf);
    }
    lo = hi;
    flo = fhi;
    hi = std::min(1.25 * hi, bound);
    fhi = f(hi);
  }
  if (best_gap > kCalibrationTol) {
    std::uintmax_t iters = 60;
    boost::math::tools::eps_tolerance<double> eps(45);
    auto done = [&](double a, double b) { return best_gap < kCalibrationTol || eps(a, b); };
    boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, done, iters);
  }
  if (best_gap > 1e-3) throw Error(ErrorKind::NoBracket, "root search did not converge to the target angle");
  const auto dir = with_amplitude(cfg, best_s);
  cal.amplitude = dir.modes.front().drive.amplitude;
  cal.theta_ab = best_theta;
  return cal;
}

DetuningPoint evaluate_detuning(const DetuningFamily& family, double delta, double target) {
  DetuningPoint p;
  p.delta = delta;
  const SystemConfig cfg = family(delta);
  p.calibration = calibrate_amplitude(cfg, target);
  const auto res = adiabatic_evolve(validate_config(with_amplitude(cfg, std::abs(p.calibration.amplitude))));
  p.concurrence = res.concurrence;
  p.leakage = res.leakage;
  return p;
}

DetuningOptimum optimize_detuning(const DetuningFamily& family, double delta_opt) {
  if (!(delta_opt > 0.0)) throw Error(ErrorKind::NonpositiveInput, "analytic optimal detuning must be positive");
  DetuningOptimum out;
  out.delta_opt_analytic = delta_opt;

  const double x_lo = std::log(delta_opt / 5.0), x_hi = std::log(5.0 * delta_opt);
  const int n = kScanPoints;
  std::vector<double> xs(n);
  std::vector<DetuningPoint> scan;
  for (int k = 0; k < n; ++k) {
    xs[k] = x_lo + (x_hi - x_lo) * k / (n - 1);
    scan.push_back(evaluate_detuning(family, k == n / 2 ? delta_opt : std::exp(xs[k])));
  }
  out.evaluations = n;

  auto adopt = [&](const DetuningPoint& p) {
    out.delta_star = p.delta;
    out.concurrence_star = p.concurrence;
    out.calibration = p.calibration;
    out.leakage = p.leakage;
  };

  int peak = 0;
  for (int k = 1; k < n; ++k)
    if (scan[k].concurrence > scan[peak].concurrence) peak = k;
  if (scan[peak].concurrence <= 1e-12) {
    out.flat = true;
    adopt(scan[n / 2]);
    return out;
  }
  if (peak == 0 || peak == n - 1) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "concurrence peaks at the bracket end delta = %.6g", scan[peak].delta);
    throw Error(ErrorKind::BracketFailure, buf);
  }
  constexpr double slack = 1e-9;
  for (int k = 0; k < n - 1; ++k) {
    const bool rising = k < peak;
    const double step = scan[k + 1].concurrence - scan[k].concurrence;
    if ((rising && step < -slack) || (!rising && step > slack)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "concurrence is not unimodal in delta near %.6g", scan[k].delta);
      throw Error(ErrorKind::BracketFailure, buf);
    }
  }

  DetuningPoint best = scan[peak];
  auto eval = [&](double x) {
    auto p = evaluate_detuning(family, std::exp(x));
    ++out.evaluations;
    if (p.concurrence > best.concurrence) best = p;
    return p.concurrence;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = xs[peak - 1], b = xs[peak + 1];
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a > kRelativeWidth) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = eval(d);
    }
  }
  adopt(best);
  return out;
}

DetuningOptimum optimize_detuning(const SystemConfig& cfg) {
  const auto sys = validate_config(cfg, true);
  const double delta_opt = optimal_detuning(sys.dot(0), sys.dot(1), sys.config().modes) * sys.rate_scale();
  DetuningFamily family = [cfg](double delta) {
    SystemConfig c = cfg;
    c.modes.at(0).delta = delta;
    return c;
  };
  return optimize_detuning(family, delta_opt);
}

std::vector<SweepAxis> parse_grid_spec(const std::string& spec) {
  std::vector<SweepAxis> axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (part.find_first_not_of(" \t") == std::string::npos) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, "grid axis '" + part + "' lacks '='");
    SweepAxis ax;
    ax.name = part.substr(0, eq);
    ax.name.erase(std::remove_if(ax.name.begin(), ax.name.end(), ::isspace), ax.name.end());
    if (ax.name != "C" && ax.name != "g" && ax.name != "kappa")
      throw Error(ErrorKind::InvalidConfig, "unknown grid axis '" + ax.name + "' (expected C, g or kappa)");
    const std::string body = part.substr(eq + 1);
    auto number = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end == s.c_str() || !std::isfinite(v) || !(v > 0.0))
        throw Error(ErrorKind::InvalidConfig, "grid value '" + s + "' must be a positive number");
      while (*end == ' ') ++end;
      if (*end != '\0') throw Error(ErrorKind::InvalidConfig, "trailing characters in grid value '" + s + "'");
      return v;
    };
    if (std::count(body.begin(), body.end(), ':') == 2) {
      const auto p1 = body.find(':'), p2 = body.rfind(':');
      const double lo = number(body.substr(0, p1)), hi = number(body.substr(p1 + 1, p2 - p1 - 1));
      const double cnt = number(body.substr(p2 + 1));
      const int n = static_cast<int>(cnt);
      if (n != cnt) throw Error(ErrorKind::InvalidConfig, "grid point count must be an integer");
      for (int k = 0; k < n; ++k)
        ax.values.push_back(n == 1 ? lo : lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
    } else {
      std::stringstream vs(body);
      std::string item;
      while (std::getline(vs, item, ',')) ax.values.push_back(number(item));
    }
    if (ax.values.empty()) throw Error(ErrorKind::InvalidConfig, "grid axis '" + ax.name + "' has no values");
    for (const auto& other : axes)
      if (other.name == ax.name) throw Error(ErrorKind::InvalidConfig, "grid axis '" + ax.name + "' given twice");
    axes.push_back(std::move(ax));
  }
  if (axes.empty()) throw Error(ErrorKind::InvalidConfig, "empty grid spec");
  if (axes.size() > 2) throw Error(ErrorKind::InvalidConfig, "C, g and kappa cannot all be swept at once");
  return axes;
}

DetuningFamily sweep_family(const SystemConfig& base, double g, double kappa) {
  return [base, g, kappa](double delta) {
    SystemConfig c = base;
    c.modes.resize(1);
    auto& mode = c.modes[0];
    mode.delta = delta;
    mode.kappa = kappa;
    const double big_delta = 20.0 * std::max({delta, g, g * g / delta});
    for (DotParams* d : {&c.dot_a, &c.dot_b}) {
      const cplx old = d->couplings.empty() ? cplx(1.0) : d->couplings.front();
      d->couplings = {std::abs(old) > 0.0 ? g * old / std::abs(old) : cplx(g)};
      d->delta_exciton = d->delta_exciton < 0.0 ? -big_delta : big_delta;
    }
    // the pi/4 gate needs int |Omega|^2/Delta^2 dt = pi delta / (2 g^2)
    const double area = std::numbers::pi * delta / (2.0 * g * g);
    const double peak_ratio = 0.05;
    const double sigma = area / (std::sqrt(2.0 * std::numbers::pi) * peak_ratio * peak_ratio);
    auto& p = mode.drive;
    p.shape = PulseShape::Gaussian;
    p.sigma = sigma;
    p.center = 0.0;
    p.support.reset();
    p.samples.clear();
    c.time_grid.t0 = -10.0 * sigma;
    c.time_grid.t1 = 10.0 * sigma;
    return c;
  };
}

std::size_t SweepResult::succeeded() const {
  return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.ok(); }));
}

namespace {

SweepRecord run_point(const SystemConfig& base, const std::vector<SweepAxis>& axes, const std::vector<double>& vals) {
  SweepRecord rec;
  rec.axis_values = vals;
  try {
    const double gamma = base.dot_a.gamma;
    std::optional<double> c_val, g_val, k_val;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      if (axes[i].name == "C") c_val = vals[i];
      if (axes[i].name == "g") g_val = vals[i];
      if (axes[i].name == "kappa") k_val = vals[i];
    }
    if (base.modes.empty()) throw Error(ErrorKind::InvalidConfig, "sweep needs one cavity mode in the base config");
    if (c_val && !(gamma > 0.0)) throw Error(ErrorKind::ZeroGamma, "a C axis needs gamma_A > 0");
    if (!k_val) k_val = c_val && g_val ? 4.0 * *g_val * *g_val / (*c_val * gamma) : base.modes[0].kappa;
    if (!g_val) {
      if (c_val) g_val = std::sqrt(*c_val * *k_val * gamma) / 2.0;
      else g_val = base.dot_a.couplings.empty() ? 0.0 : std::abs(base.dot_a.couplings.front());
    }
    if (!(*g_val > 0.0)) throw Error(ErrorKind::NonpositiveInput, "coupling g must be positive");

    // every detuning of the family shares g, kappa and gamma, so any member gives the analytic values
    const auto family = sweep_family(base, *g_val, *k_val);
    const double probe = *g_val * std::sqrt(*k_val / std::max(gamma, 1e-300));
    const auto sys = validate_config(family(probe > 0.0 ? probe : 1.0), true);
    rec.cooperativity = cooperativity(sys.dot(0), sys.dot(1), sys.config().modes);
    rec.delta_opt_analytic = optimal_detuning(sys.dot(0), sys.dot(1), sys.config().modes) * sys.rate_scale();

    const auto opt = optimize_detuning(family, rec.delta_opt_analytic);
    rec.delta_opt_numeric = opt.delta_star;
    rec.calibrated_amplitude = opt.calibration.amplitude;
    rec.concurrence = opt.concurrence_star;
    rec.leakage = opt.leakage;
    rec.theta_ab_realized = opt.calibration.theta_ab;
    rec.config_hash = config_hash(with_amplitude(family(opt.delta_star), std::abs(opt.calibration.amplitude)));
  } catch (const std::exception& e) {
    rec.error = error_text(e);
  }
  return rec;
}

std::string csv_field(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ch == ',' ? ';' : ' ';
  return s;
}

const char* kRecordColumns[] = {"cooperativity", "delta_opt_analytic", "delta_opt_numeric", "amplitude_re",
                                "amplitude_im",  "concurrence",        "leakage",           "theta_ab_realized",
                                "solver",        "config_hash",        "error"};

}  // namespace

SweepResult concurrence_surface(const SystemConfig& base, const std::vector<SweepAxis>& axes, int jobs,
                                const std::function<void(const SweepRecord&)>& progress) {
  if (axes.empty()) throw Error(ErrorKind::InvalidConfig, "sweep needs at least one axis");
  std::size_t total = 1;
  for (const auto& ax : axes) {
    if (ax.values.empty()) throw Error(ErrorKind::InvalidConfig, "grid axis '" + ax.name + "' has no values");
    total *= ax.values.size();
  }

  SweepResult result;
  result.axes = axes;
  result.base_hash = config_hash(base);
  result.records.resize(total);

  auto values_of = [&](std::size_t flat) {
    std::vector<double> vals(axes.size());
    for (std::size_t i = axes.size(); i-- > 0;) {
      vals[i] = axes[i].values[flat % axes[i].values.size()];
      flat /= axes[i].values.size();
    }
    return vals;
  };

  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      result.records[i] = run_point(base, axes, values_of(i));
      if (progress) {
        std::lock_guard lock(log_mutex);
        progress(result.records[i]);
      }
    }
  };
  const std::size_t n_threads = std::clamp<std::size_t>(jobs > 0 ? jobs : 1, 1, total);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

nlohmann::json sweep_summary(const SweepResult& result) {
  nlohmann::json out;
  out["points"] = result.records.size();
  out["succeeded"] = result.succeeded();

  // group by cooperativity (relative 1e-6)
  std::vector<std::pair<double, std::vector<double>>> groups;
  for (const auto& r : result.records) {
    if (!r.ok()) continue;
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) {
      return std::abs(g.first - r.cooperativity) <= 1e-6 * std::max(g.first, r.cooperativity);
    });
    if (it == groups.end()) groups.push_back({r.cooperativity, {r.concurrence}});
    else it->second.push_back(r.concurrence);
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  nlohmann::json spread = nlohmann::json::array();
  for (const auto& [c, v] : groups) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    spread.push_back({{"cooperativity", c}, {"count", v.size()}, {"spread", *hi - *lo}});
  }
  out["spread_per_cooperativity"] = spread;

  // monotone in C along every grid line of the C axis
  auto c_axis = std::find_if(result.axes.begin(), result.axes.end(), [](const auto& a) { return a.name == "C"; });
  if (c_axis == result.axes.end()) {
    out["increasing_in_c"] = nullptr;
  } else {
    const std::size_t ci = static_cast<std::size_t>(c_axis - result.axes.begin());
    std::map<std::vector<double>, std::vector<std::pair<double, const SweepRecord*>>> lines;
    for (const auto& r : result.records) {
      auto key = r.axis_values;
      key.erase(key.begin() + static_cast<std::ptrdiff_t>(ci));
      lines[key].push_back({r.axis_values[ci], &r});
    }
    bool increasing = true;
    for (auto& [key, line] : lines) {
      std::sort(line.begin(), line.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t k = 1; k < line.size(); ++k) {
        const auto* a = line[k - 1].second;
        const auto* b = line[k].second;
        if (!a->ok() || !b->ok() || !(b->concurrence > a->concurrence)) increasing = false;
      }
    }
    out["increasing_in_c"] = increasing;
  }
  return out;
}

void write_sweep_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path.string() + "'");
  std::string header;
  for (const auto& ax : result.axes) header += ax.name + ",";
  for (std::size_t i = 0; i < std::size(kRecordColumns); ++i) header += std::string(i ? "," : "") + kRecordColumns[i];
  f << header << "\n";
  for (const auto& r : result.records) {
    std::string line;
    for (double v : r.axis_values) line += csv_field(v) + ",";
    const double nan = std::nan("");
    auto num = [&](double v) { return csv_field(r.ok() ? v : nan) + ","; };
    line += num(r.cooperativity) + num(r.delta_opt_analytic) + num(r.delta_opt_numeric) +
            num(r.calibrated_amplitude.real()) + num(r.calibrated_amplitude.imag()) + num(r.concurrence) +
            num(r.leakage) + num(r.theta_ab_realized);
    line += r.solver + "," + r.config_hash + "," + sanitize(r.error);
    f << line << "\n";
  }
}

SweepResult read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::InvalidConfig, "cannot open '" + path.string() + "'");
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
  };
  std::string line;
  if (!std::getline(f, line)) throw Error(ErrorKind::InvalidConfig, path.string() + ": empty file");
  const auto header = split(line);
  const std::size_t n_rec = std::size(kRecordColumns);
  if (header.size() < n_rec + 1) throw Error(ErrorKind::InvalidConfig, path.string() + ": header too short");
  const std::size_t n_axes = header.size() - n_rec;
  for (std::size_t i = 0; i < n_rec; ++i)
    if (header[n_axes + i] != kRecordColumns[i])
      throw Error(ErrorKind::InvalidConfig, path.string() + ": unexpected column '" + header[n_axes + i] + "'");

  SweepResult res;
  for (std::size_t i = 0; i < n_axes; ++i) res.axes.push_back({header[i], {}});
  std::size_t row = 1;
  while (std::getline(f, line)) {
    ++row;
    if (line.empty()) continue;
    auto cells = split(line);
    if (cells.size() < header.size())
      throw Error(ErrorKind::InvalidConfig, path.string() + ": line " + std::to_string(row) + " has too few fields");
    // the error column is last and may not contain commas, but join defensively
    for (std::size_t k = header.size(); k < cells.size(); ++k) cells[header.size() - 1] += "," + cells[k];
    auto num = [&](std::size_t k) {
      char* end = nullptr;
      const double v = std::strtod(cells[k].c_str(), &end);
      if (end == cells[k].c_str())
        throw Error(ErrorKind::InvalidConfig, path.string() + ": line " + std::to_string(row) + " bad number");
      return v;
    };
    SweepRecord r;
    for (std::size_t i = 0; i < n_axes; ++i) {
      r.axis_values.push_back(num(i));
      auto& vals = res.axes[i].values;
      if (std::find(vals.begin(), vals.end(), r.axis_values.back()) == vals.end()) vals.push_back(r.axis_values.back());
    }
    const std::size_t o = n_axes;
    r.cooperativity = num(o);
    r.delta_opt_analytic = num(o + 1);
    r.delta_opt_numeric = num(o + 2);
    r.calibrated_amplitude = {num(o + 3), num(o + 4)};
    r.concurrence = num(o + 5);
    r.leakage = num(o + 6);
    r.theta_ab_realized = num(o + 7);
    r.solver = cells[o + 8];
    r.config_hash = cells[o + 9];
    r.error = cells[o + 10];
    res.records.push_back(std::move(r));
  }
  return res;
}

}  // namespace cphase

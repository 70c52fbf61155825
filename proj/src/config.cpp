#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "hnls/experiment.hpp"

namespace hnls {

namespace {

constexpr double kPi = 3.14159265358979323846;

[[noreturn]] void config_error(const std::string& m) { throw Error(ErrorKind::config, m); }

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::string s = trim(v);
  if (s == "pi") return kPi;
  double out = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) config_error("'" + key + "': not a number: '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  std::string s = trim(v);
  int out = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  if (ec != std::errc() || ptr != end) config_error("'" + key + "': not an integer: '" + v + "'");
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(to_double(key, item));
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string s = trim(v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  config_error("'" + key + "': expected true/false");
}

ExperimentConfig family_a(double beta, double alpha, double delta, double r) {
  ExperimentConfig c;
  c.params.beta = beta;
  c.params.alpha = alpha;
  c.params.delta = delta;
  c.params.r = r;
  c.params.L = kPi;
  c.params.family = Family::A;
  return c;
}

ExperimentConfig family_b(double beta, double alpha, double delta, double r) {
  ExperimentConfig c = family_a(beta, alpha, delta, r);
  c.params.family = Family::B;
  return c;
}

}  // namespace

std::pair<double, double> ExperimentConfig::window() const {
  if (fit_window) return *fit_window;
  return {0.25 * T, 0.75 * T};
}

void ExperimentConfig::validate() const {
  params.validate();
  if (M < 5) config_error("M must be >= 5");
  if (N < 2) config_error("N must be >= 2");
  if (!(T > 0.0)) config_error("T must be > 0");
  if (fit_window && !(fit_window->first < fit_window->second)) config_error("fit_window needs t_a < t_b");
  if (fit_window && (fit_window->first < 0.0 || fit_window->second > T + 1e-12))
    config_error("fit_window must lie inside [0, T]");
  for (double s : snapshot_times)
    if (s < 0.0 || s > T + 1e-12) config_error("snapshot time outside [0, T]");
  if (kind == RunKind::observer && params.p_power != 0.0) config_error("observer runs are linear (p = 0)");
  if (!(nonlinear.inner_tol > 0.0) || nonlinear.max_inner < 1) config_error("inner_tol > 0 and max_inner >= 1 required");
  if (initial.rfind("file:", 0) != 0) initial_condition(initial, grid());
  if (kind == RunKind::observer && observer_initial != "zero") initial_condition(observer_initial, grid());
}

std::vector<std::string> preset_names() {
  return {"exp1_linear", "exp1_uncontrolled", "exp2", "exp2_uncontrolled", "exp3", "exp4_observer",
          "bcb_exp1", "bcb_uncontrolled", "bcb_exp2", "bcb_exp3"};
}

ExperimentConfig preset(const std::string& name, bool paper_scale) {
  ExperimentConfig c;
  if (name == "exp1_linear" || name == "exp1_uncontrolled") {
    c = family_a(1.0, 2.0, 8.0, 1.0);
    c.initial = "exp1";
    c.T = 4.0;
    c.fit_window = std::pair{1.0, 4.0};
    c.snapshot_times = {0.0, 1.0, 2.0, 4.0};
    if (name == "exp1_uncontrolled") {
      c.kind = RunKind::uncontrolled;
      c.T = 1.0;
      c.fit_window.reset();
      c.snapshot_times = {0.0, 0.5, 1.0};
    }
  } else if (name == "exp2" || name == "exp2_uncontrolled") {
    c = family_a(1.0, 2.0, 8.0, 8.0);
    c.params.p_power = 2.0;
    c.initial = "exp1";
    c.T = 1.0;
    c.scheme = Linearization::taylor;
    c.snapshot_times = {0.0, 0.25, 0.5, 1.0};
    if (name == "exp2_uncontrolled") c.kind = RunKind::uncontrolled;
  } else if (name == "exp3") {
    c = family_a(1.0, 2.0, 8.0, 5.0);
    c.params.p_power = 0.5;
    c.initial = "exp1";
    c.T = 2.0;
    c.scheme = Linearization::picard;
    c.snapshot_times = {0.0, 0.5, 1.0, 2.0};
  } else if (name == "exp4_observer") {
    c = family_a(0.5, 1.0, 0.5, 0.2);
    c.kind = RunKind::observer;
    c.initial = "gauss_wave";
    c.observer_initial = "zero";
    c.T = 25.0;
    c.fit_window = std::pair{5.0, 25.0};
    c.snapshot_times = {0.0, 0.5, 5.0, 25.0};
  } else if (name == "bcb_exp1" || name == "bcb_uncontrolled") {
    c = family_b(1.0, 1.0, 2.0, 1.0);
    c.initial = "sech";
    c.T = 4.0;
    c.snapshot_times = {0.0, 1.0, 4.0};
    if (name == "bcb_uncontrolled") c.kind = RunKind::uncontrolled;
  } else if (name == "bcb_exp2") {
    c = family_b(0.5, 1.0, 2.0, 1.5);
    c.params.p_power = 3.5;
    c.initial = "two_bump";
    c.T = 4.0;
    c.scheme = Linearization::taylor;
    c.snapshot_times = {0.0, 1.0, 4.0};
  } else if (name == "bcb_exp3") {
    c = family_b(1.0, 1.0, 2.0, 1.5);
    c.params.p_power = 0.25;
    c.initial = "sech";
    c.T = 4.0;
    c.scheme = Linearization::picard;
    c.snapshot_times = {0.0, 1.0, 4.0};
  } else {
    config_error("unknown preset '" + name + "'");
  }
  c.name = name;
  if (paper_scale) {
    c.M = 1001;
    c.N = 5000;
  }
  return c;
}

Eigen::VectorXcd initial_condition(const std::string& name, const Grid& g) {
  const double c = kPi / 2;
  if (name == "exp1")
    return sample(g, [](double x) { return 3.0 - std::exp(4.0 * I * x) - 2.0 * std::exp(-2.0 * I * x); });
  if (name == "gauss_wave")
    return sample(g, [c](double x) { return std::exp(-20.0 * (x - c) * (x - c)) * std::exp(5.0 * I * (x - c)); });
  if (name == "sech")
    return sample(g, [c](double x) { return (1.0 / std::cosh(8.0 * (x - c) * (x - c))) * std::exp(4.0 * I * (x - c)); });
  if (name == "two_bump") {
    const double d = 3.0 * kPi / 4;
    return sample(g, [c, d](double x) {
      return 3.0 * std::exp(-16.0 * (x - c) * (x - c)) * std::exp(4.0 * I * (x - c)) +
             5.0 * std::exp(-16.0 * (x - d) * (x - d)) * std::exp(4.0 * I * (x - d));
    });
  }
  if (name == "zero") return Eigen::VectorXcd::Zero(g.M);
  if (name.rfind("file:", 0) == 0) {
    const Table t = load_csv(name.substr(5));
    const auto& re = t.column("re");
    const auto& im = t.column("im");
    if (static_cast<int>(re.size()) != g.M) config_error("initial datum file has " + std::to_string(re.size()) + " rows, grid has " + std::to_string(g.M));
    Eigen::VectorXcd v(g.M);
    for (int m = 0; m < g.M; ++m) v[m] = cplx(re[m], im[m]);
    return v;
  }
  config_error("unknown initial datum '" + name + "'");
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (key == "name") cfg.name = v;
  else if (key == "beta") cfg.params.beta = to_double(key, v);
  else if (key == "alpha") cfg.params.alpha = to_double(key, v);
  else if (key == "delta") cfg.params.delta = to_double(key, v);
  else if (key == "r") cfg.params.r = to_double(key, v);
  else if (key == "L") cfg.params.L = to_double(key, v);
  else if (key == "p" || key == "p_power") cfg.params.p_power = to_double(key, v);
  else if (key == "bc_family") cfg.params.family = parse_family(v);
  else if (key == "initial") cfg.initial = v;
  else if (key == "observer_initial") cfg.observer_initial = v;
  else if (key == "M") cfg.M = to_int(key, v);
  else if (key == "N") cfg.N = to_int(key, v);
  else if (key == "T") cfg.T = to_double(key, v);
  else if (key == "kind") {
    if (v == "controlled") cfg.kind = RunKind::controlled;
    else if (v == "uncontrolled") cfg.kind = RunKind::uncontrolled;
    else if (v == "observer") cfg.kind = RunKind::observer;
    else config_error("kind: expected controlled, uncontrolled or observer");
  } else if (key == "scheme") {
    if (v == "taylor") cfg.scheme = Linearization::taylor;
    else if (v == "taylor_formal") cfg.scheme = Linearization::taylor_formal;
    else if (v == "picard") cfg.scheme = Linearization::picard;
    else config_error("scheme: expected taylor, taylor_formal or picard");
  } else if (key == "inner_tol") cfg.nonlinear.inner_tol = to_double(key, v);
  else if (key == "max_inner") cfg.nonlinear.max_inner = to_int(key, v);
  else if (key == "kernel_tol") cfg.kernel.tol = to_double(key, v);
  else if (key == "kernel_max_iter") cfg.kernel.max_iter = to_int(key, v);
  else if (key == "stencil") {
    if (v == "centered") cfg.stencil = Stencil::centered;
    else if (v == "paper") cfg.stencil = Stencil::paper;
    else config_error("stencil: expected centered or paper");
  } else if (key == "observer_sign") {
    if (v == "plus") cfg.observer_sign = ObserverSign::plus;
    else if (v == "minus") cfg.observer_sign = ObserverSign::minus;
    else config_error("observer_sign: expected plus or minus");
  } else if (key == "snapshots") cfg.snapshot_times = to_list(key, v);
  else if (key == "fit_window") {
    const auto w = to_list(key, v);
    if (w.size() != 2) config_error("fit_window: expected 't_a, t_b'");
    cfg.fit_window = std::pair{w[0], w[1]};
  } else if (key == "output_dir") cfg.output_dir = v;
  else if (key == "kernel_cache") cfg.kernel_cache = v;
  else if (key == "paper_scale") {
    if (to_bool(key, v)) {
      cfg.M = 1001;
      cfg.N = 5000;
    }
  } else config_error("unknown key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& is) {
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  ExperimentConfig cfg;
  for (const auto& [k, v] : kv)
    if (k == "preset") cfg = preset(v);
  for (const auto& [k, v] : kv)
    if (k != "preset") apply_setting(cfg, k, v);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) config_error("cannot read config file " + path);
  return parse_config(is);
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "name = " << c.name << "\n";
  os << "bc_family = " << to_string(c.params.family) << "\n";
  os << "beta = " << c.params.beta << "\nalpha = " << c.params.alpha << "\ndelta = " << c.params.delta << "\n";
  os << "r = " << c.params.r << "\nL = " << c.params.L << "\np = " << c.params.p_power << "\n";
  os << "kind = " << to_string(c.kind) << "\n";
  os << "initial = " << c.initial << "\n";
  if (c.kind == RunKind::observer) os << "observer_initial = " << c.observer_initial << "\n";
  os << "M = " << c.M << "\nN = " << c.N << "\nT = " << c.T << "\n";
  os << "scheme = " << to_string(c.scheme) << "\n";
  os << "inner_tol = " << c.nonlinear.inner_tol << "\nmax_inner = " << c.nonlinear.max_inner << "\n";
  os << "kernel_tol = " << c.kernel.tol << "\nkernel_max_iter = " << c.kernel.max_iter << "\n";
  os << "stencil = " << (c.stencil == Stencil::centered ? "centered" : "paper") << "\n";
  os << "observer_sign = " << (c.observer_sign == ObserverSign::plus ? "plus" : "minus") << "\n";
  if (!c.snapshot_times.empty()) {
    os << "snapshots = ";
    for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) os << (i ? ", " : "") << c.snapshot_times[i];
    os << "\n";
  }
  if (c.fit_window) os << "fit_window = " << c.fit_window->first << ", " << c.fit_window->second << "\n";
  if (!c.output_dir.empty()) os << "output_dir = " << c.output_dir << "\n";
  if (!c.kernel_cache.empty()) os << "kernel_cache = " << c.kernel_cache << "\n";
  return os.str();
}

const char* to_string(RunKind k) {
  switch (k) {
    case RunKind::controlled: return "controlled";
    case RunKind::uncontrolled: return "uncontrolled";
    case RunKind::observer: return "observer";
  }
  return "?";
}

const char* to_string(Linearization s) {
  switch (s) {
    case Linearization::taylor: return "taylor";
    case Linearization::taylor_formal: return "taylor_formal";
    case Linearization::picard: return "picard";
  }
  return "?";
}

}  // namespace hnls

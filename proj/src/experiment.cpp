#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "hnls/experiment.hpp"
#include "hnls/kernel_io.hpp"

namespace hnls {

namespace fs = std::filesystem;
using nlohmann::json;

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& norms, double t_a, double t_b) {
  if (t.size() != norms.size()) throw Error(ErrorKind::domain, "fit_decay: series lengths differ");
  if (!(t_a < t_b)) throw Error(ErrorKind::domain, "fit_decay: window needs t_a < t_b");
  const double eps = 1e-9 * std::max(1.0, std::abs(t_b));
  double st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_a - eps || t[k] > t_b + eps) continue;
    if (!(norms[k] > 0.0)) throw Error(ErrorKind::domain, "fit_decay: nonpositive norm in window (exact zero data?)");
    const double y = std::log(norms[k]);
    st += t[k];
    sy += y;
    stt += t[k] * t[k];
    sty += t[k] * y;
    ++n;
  }
  if (n < 10) throw Error(ErrorKind::domain, "fit_decay: fewer than 10 samples in window");
  const double tm = st / n, ym = sy / n;
  const double var = stt / n - tm * tm;
  const double slope = (sty / n - tm * ym) / var;
  const double icpt = ym - slope * tm;
  double ss = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_a - eps || t[k] > t_b + eps) continue;
    const double e = std::log(norms[k]) - (icpt + slope * t[k]);
    ss += e * e;
  }
  DecayFit f;
  f.t_a = t_a;
  f.t_b = t_b;
  f.gamma = -slope;
  f.amplitude = std::exp(icpt);
  f.residual = std::sqrt(ss / n);
  f.samples = n;
  if (!std::isfinite(f.gamma)) throw Error(ErrorKind::domain, "fit_decay: non-finite rate");
  return f;
}

DecayFit fit_decay(const RunRecord& rec, double t_a, double t_b) { return fit_decay(rec.t, rec.l2_u, t_a, t_b); }

const std::vector<double>& Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return columns[i];
  throw Error(ErrorKind::config, "table has no column '" + name + "'");
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
  os << "\n";
  const std::size_t rows = t.columns.empty() ? 0 : t.columns.front().size();
  char buf[40];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", t.columns[c][r]);
      os << (c ? "," : "") << buf;
    }
    os << "\n";
  }
}

Table read_csv(std::istream& is) {
  Table t;
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::config, "csv: empty input");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
      t.header.push_back(cell);
    }
  }
  t.columns.assign(t.header.size(), {});
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      if (c >= t.header.size()) throw Error(ErrorKind::config, "csv: too many fields on row " + std::to_string(row));
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw Error(ErrorKind::config, "csv: bad number on row " + std::to_string(row));
      t.columns[c++].push_back(v);
    }
    if (c != t.header.size()) throw Error(ErrorKind::config, "csv: too few fields on row " + std::to_string(row));
  }
  return t;
}

Table load_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::config, "cannot read " + path);
  return read_csv(is);
}

void save_csv(const std::string& path, const Table& t) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorKind::io, "cannot write " + path);
  write_csv(os, t);
}

namespace {

std::string cache_path(const std::string& dir, const PhysicsParams& p, const KernelOptions& opt, const std::string& tag) {
  std::ostringstream key;
  key << std::setprecision(17) << tag << '|' << to_string(p.family) << '|' << p.beta << '|' << p.alpha << '|'
      << p.delta << '|' << p.r << '|' << p.L << '|' << opt.tol << '|' << opt.max_iter << '|' << opt.degree_cap;
  std::ostringstream name;
  name << "kernel_" << tag << '_' << std::hex << std::hash<std::string>{}(key.str()) << ".txt";
  return (fs::path(dir) / name.str()).string();
}

Kernel cached(const std::string& dir, const std::string& path, const std::function<Kernel()>& build) {
  if (dir.empty()) return build();
  if (fs::exists(path)) return load_kernel(path);
  Kernel k = build();
  fs::create_directories(dir);
  save_kernel(path, k);
  return load_kernel(path);
}

json fit_json(const std::vector<double>& t, const std::vector<double>& y, std::pair<double, double> w) {
  try {
    const DecayFit f = fit_decay(t, y, w.first, w.second);
    return {{"gamma", f.gamma}, {"amplitude", f.amplitude}, {"residual", f.residual},
            {"t_a", f.t_a},     {"t_b", f.t_b},             {"samples", f.samples}};
  } catch (const Error& e) {
    return {{"error", e.what()}, {"t_a", w.first}, {"t_b", w.second}};
  }
}

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

void add_snapshot_columns(Table& tab, const std::string& field, const std::vector<Snapshot>& snaps) {
  for (const auto& s : snaps) {
    std::vector<double> re(s.u.size()), im(s.u.size());
    for (Eigen::Index m = 0; m < s.u.size(); ++m) {
      re[m] = s.u[m].real();
      im[m] = s.u[m].imag();
    }
    tab.header.push_back(field + "_re_t" + time_tag(s.t));
    tab.columns.push_back(std::move(re));
    tab.header.push_back(field + "_im_t" + time_tag(s.t));
    tab.columns.push_back(std::move(im));
  }
}

std::vector<double> grid_x(const Grid& g) {
  std::vector<double> x(g.M);
  for (int m = 0; m < g.M; ++m) x[m] = g.x(m);
  return x;
}

json params_json(const PhysicsParams& p) {
  return {{"beta", p.beta}, {"alpha", p.alpha}, {"delta", p.delta}, {"r", p.r},
          {"L", p.L},       {"p", p.p_power},   {"bc_family", to_string(p.family)}};
}

}  // namespace

Kernel cached_control_kernel(const PhysicsParams& p, const KernelOptions& opt, const std::string& cache_dir) {
  const std::string tag = p.family == Family::A ? "control_k" : "control_ell";
  return cached(cache_dir, cache_dir.empty() ? "" : cache_path(cache_dir, p, opt, tag),
                [&] { return solve_kernel(p, opt); });
}

Kernel cached_observer_kernel(const PhysicsParams& p, const KernelOptions& opt, ObserverSign sign,
                              const std::string& cache_dir) {
  const std::string tag = sign == ObserverSign::plus ? "observer_plus" : "observer_minus";
  return cached(cache_dir, cache_dir.empty() ? "" : cache_path(cache_dir, p, opt, tag),
                [&] { return observer_kernel(p, opt, sign); });
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Grid g = cfg.grid();
  const TimeGrid tg = cfg.time_grid();
  const PhysicsParams& p = cfg.params;
  const auto window = cfg.window();
  OperatorOptions op;
  op.stencil = cfg.stencil;

  ExperimentResult res;
  json& s = res.summary;
  s["name"] = cfg.name;
  s["kind"] = to_string(cfg.kind);
  s["params"] = params_json(p);
  s["grid"] = {{"M", g.M}, {"N", tg.N}, {"T", tg.T}, {"h", g.h()}, {"dt", tg.dt()}};
  s["stencil"] = cfg.stencil == Stencil::centered ? "centered" : "paper";
  s["initial"] = cfg.initial;
  s["fit_window"] = {window.first, window.second};

  const Eigen::VectorXcd u0 = initial_condition(cfg.initial, g);
  Table& norms = res.norms;
  Table& snaps = res.snapshots;
  snaps.header.push_back("x");
  snaps.columns.push_back(grid_x(g));

  if (cfg.kind == RunKind::observer) {
    const Kernel kc = cached_control_kernel(p, cfg.kernel, cfg.kernel_cache);
    const Kernel kp = cached_observer_kernel(p, cfg.kernel, cfg.observer_sign, cfg.kernel_cache);
    const Eigen::VectorXcd uh0 = initial_condition(cfg.observer_initial, g);
    ObserverOptions oo;
    oo.sign = cfg.observer_sign;
    oo.kernel = cfg.kernel;
    oo.op = op;
    oo.snapshot_times = cfg.snapshot_times;
    const ObserverRun run = run_plant_observer(u0, uh0, p, g, tg, oo);
    norms.header = {"t", "l2_u", "l2_uhat", "l2_utilde", "l2_what", "abs_g0", "g0_re", "g0_im"};
    norms.columns.assign(norms.header.size(), {});
    for (std::size_t n = 0; n < run.t.size(); ++n) {
      const double vals[] = {run.t[n],         run.l2_u[n],          run.l2_uhat[n],       run.l2_utilde[n],
                             run.l2_what[n],   std::abs(run.g0[n]),  run.g0[n].real(),     run.g0[n].imag()};
      for (std::size_t c = 0; c < norms.header.size(); ++c) norms.columns[c].push_back(vals[c]);
    }
    add_snapshot_columns(snaps, "u", run.snap_u);
    add_snapshot_columns(snaps, "uhat", run.snap_uhat);
    add_snapshot_columns(snaps, "utilde", run.snap_utilde);
    s["observer_sign"] = cfg.observer_sign == ObserverSign::plus ? "plus" : "minus";
    s["kernel"] = {{"control_iterations", kc.iterations()}, {"observer_iterations", kp.iterations()}};
    s["fits"] = {{"l2_u", fit_json(run.t, run.l2_u, window)},
                 {"l2_uhat", fit_json(run.t, run.l2_uhat, window)},
                 {"l2_utilde", fit_json(run.t, run.l2_utilde, window)}};
    s["gamma"] = s["fits"]["l2_utilde"].value("gamma", std::nan(""));
    s["consistency"] = run.max_consistency;
    s["c_k"] = stability_constant(build_upsilon(kc, g));
    s["initial_l2"] = run.l2_u.front();
    s["final_l2"] = run.l2_u.back();
  } else {
    const bool controlled = cfg.kind == RunKind::controlled;
    op.include_damping = controlled;
    std::optional<TransformMatrix> T;
    if (controlled) {
      const Kernel k = cached_control_kernel(p, cfg.kernel, cfg.kernel_cache);
      T = build_upsilon(k, g);
      s["kernel"] = {{"iterations", k.iterations()}, {"last_increment", k.last_increment()}};
      s["c_k"] = stability_constant(*T);
    }
    const CnSystem sys = make_cn(g, p, p.family, tg.dt(), op);
    const Eigen::VectorXcd w0 = T ? forward(*T, u0) : u0;
    std::optional<NonlinearStepper> nl;
    if (p.p_power > 0.0) {
      NonlinearOptions no = cfg.nonlinear;
      no.scheme = cfg.scheme;
      nl.emplace(sys, T ? forward_matrix(*T) : Eigen::MatrixXcd::Identity(g.M, g.M), p.p_power, no);
      s["scheme"] = to_string(cfg.scheme);
    }
    RunOptions ro;
    ro.snapshot_times = cfg.snapshot_times;
    if (!controlled) ro.reference = u0;
    const RunRecord rec = run_target(w0, sys, tg, T ? &*T : nullptr, nl ? &*nl : nullptr, ro);
    norms.header = {"t", "l2_u", "l2_w", "abs_g0", "g0_re", "g0_im", "trace_re", "trace_im"};
    if (nl) norms.header.push_back("inner_iterations");
    norms.columns.assign(norms.header.size(), {});
    for (std::size_t n = 0; n < rec.t.size(); ++n) {
      const double vals[] = {rec.t[n],          rec.l2_u[n],         rec.l2_w[n],          std::abs(rec.g0[n]),
                             rec.g0[n].real(),  rec.g0[n].imag(),    rec.trace[n].real(),  rec.trace[n].imag()};
      for (std::size_t c = 0; c < 8; ++c) norms.columns[c].push_back(vals[c]);
      if (nl) norms.columns[8].push_back(n == 0 ? 0.0 : rec.solve.iterations[n - 1]);
    }
    add_snapshot_columns(snaps, "u", rec.snapshots);
    s["fits"] = {{"l2_u", fit_json(rec.t, rec.l2_u, window)}, {"l2_w", fit_json(rec.t, rec.l2_w, window)}};
    s["gamma"] = s["fits"]["l2_u"].value("gamma", std::nan(""));
    s["initial_l2"] = rec.l2_u.front();
    s["final_l2"] = rec.l2_u.back();
    s["final_ratio"] = rec.l2_u.back() / rec.l2_u.front();
    if (nl)
      s["inner_iterations"] = {{"max", rec.solve.max_iterations()}, {"mean", rec.solve.mean_iterations()}};
    if (!controlled) {
      double dev = 0.0, ndrift = 0.0;
      for (std::size_t n = 0; n < rec.t.size(); ++n) {
        dev = std::max(dev, rec.deviation[n]);
        ndrift = std::max(ndrift, std::abs(rec.l2_u[n] - rec.l2_u.front()));
      }
      s["state_drift"] = dev / rec.l2_u.front();
      s["norm_drift"] = ndrift / rec.l2_u.front();
      bool mono = true;
      for (std::size_t n = 2; n < rec.l2_u.size(); ++n) mono = mono && rec.l2_u[n] <= rec.l2_u[n - 1] * (1 + 1e-12);
      s["nonincreasing_after_first_step"] = mono;
    }
  }

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    const fs::path dir(cfg.output_dir);
    save_csv((dir / "norms.csv").string(), norms);
    save_csv((dir / "snapshots.csv").string(), snaps);
    {
      std::ofstream os(dir / "plot.py");
      os << plot_script(cfg);
    }
    {
      std::ofstream os(dir / "summary.json");
      os << s.dump(2) << "\n";
    }
    {
      std::ofstream os(dir / "config.txt");
      os << format_config(cfg);
    }
    for (const char* f : {"norms.csv", "snapshots.csv", "plot.py", "summary.json", "config.txt"})
      res.files.push_back((dir / f).string());
  }
  return res;
}

std::string plot_script(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# Plots for run '" << cfg.name << "'. Requires numpy and matplotlib.\n"
     << "import csv, os\n"
     << "import numpy as np\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "here = os.path.dirname(os.path.abspath(__file__))\n\n"
     << "def load(name):\n"
     << "    with open(os.path.join(here, name)) as f:\n"
     << "        rows = list(csv.reader(f))\n"
     << "    head, data = rows[0], np.array(rows[1:], dtype=float)\n"
     << "    return {h: data[:, i] for i, h in enumerate(head)}\n\n"
     << "n = load('norms.csv')\n"
     << "fig, ax = plt.subplots(figsize=(6, 4))\n"
     << "for key in ('l2_u', 'l2_uhat', 'l2_utilde'):\n"
     << "    if key in n:\n"
     << "        ax.plot(n['t'], n[key], label=key)\n"
     << "ax.set_xlabel('t')\nax.set_ylabel('L2 norm')\nax.legend()\n"
     << "fig.tight_layout()\nfig.savefig(os.path.join(here, 'norms.png'), dpi=150)\n\n"
     << "s = load('snapshots.csv')\n"
     << "fig, ax = plt.subplots(figsize=(6, 4))\n"
     << "for key in s:\n"
     << "    if '_re_t' in key:\n"
     << "        im = s[key.replace('_re_t', '_im_t')]\n"
     << "        ax.plot(s['x'], np.hypot(s[key], im), label='|' + key.replace('_re_t', '| t='))\n"
     << "ax.set_xlabel('x')\nax.set_ylabel('modulus')\nax.legend(fontsize=7)\n"
     << "fig.tight_layout()\nfig.savefig(os.path.join(here, 'snapshots.png'), dpi=150)\n";
  return os.str();
}

}  // namespace hnls

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hnls/experiment.hpp"
#include "hnls/kernel_io.hpp"

namespace {

using namespace hnls;
using nlohmann::json;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config:
    case ErrorKind::io:
    case ErrorKind::domain: return 2;
    case ErrorKind::kernel: return 3;
    case ErrorKind::solver: return 4;
  }
  return 1;
}

struct CommonOpts {
  std::string preset;
  std::string config;
  std::vector<std::string> sets;
  bool paper_scale = false;
};

ExperimentConfig resolve(const CommonOpts& o) {
  if (!o.preset.empty() && !o.config.empty()) throw Error(ErrorKind::config, "give either --preset or --config");
  ExperimentConfig cfg;
  if (!o.config.empty())
    cfg = load_config(o.config);
  else if (!o.preset.empty())
    cfg = preset(o.preset, o.paper_scale);
  else
    throw Error(ErrorKind::config, "one of --preset or --config is required");
  if (o.paper_scale) {
    cfg.M = 1001;
    cfg.N = 5000;
  }
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::config, "--set expects key=value, got '" + kv + "'");
    apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* app, CommonOpts& o) {
  app->add_option("--preset", o.preset, "Experiment preset");
  app->add_option("--config", o.config, "Flat key = value config file");
  app->add_option("--set", o.sets, "Override a config key (key=value), repeatable");
  app->add_flag("--paper-scale", o.paper_scale, "Use M = 1001, N = 5000");
}

int cmd_kernel(const CommonOpts& o, const std::string& role, const std::string& sign, const std::string& out,
               bool residual) {
  const ExperimentConfig cfg = resolve(o);
  const ObserverSign os = sign == "minus" ? ObserverSign::minus : ObserverSign::plus;
  if (sign != "plus" && sign != "minus") throw Error(ErrorKind::config, "--observer-sign: plus or minus");
  Kernel k = role == "observer" ? observer_kernel(cfg.params, cfg.kernel, os) : solve_kernel(cfg.params, cfg.kernel);
  if (role != "observer" && role != "control") throw Error(ErrorKind::config, "--role: control or observer");
  json j;
  j["role"] = to_string(k.role());
  j["iterations"] = k.iterations();
  j["last_increment"] = k.last_increment();
  j["degree"] = k.G().degree();
  if (cfg.params.r == 0.0) j["warning"] = "r = 0 gives the zero kernel";
  if (residual) {
    const KernelResidual res = kernel_residual(k);
    j["pde_residual"] = res.pde_max;
    j["bc_residual"] = res.bc_max;
    for (const auto& t : res.bc_terms) j["bc_terms"][t.name] = t.value;
  }
  if (!out.empty()) {
    save_kernel(out, k);
    j["file"] = out;
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_run(const CommonOpts& o, const std::string& out) {
  ExperimentConfig cfg = resolve(o);
  if (!out.empty()) cfg.output_dir = out;
  const ExperimentResult r = run_experiment(cfg);
  std::cout << r.summary.dump(2) << "\n";
  return 0;
}

int cmd_fit(const std::string& csv, const std::string& column, const std::vector<double>& window) {
  const Table t = load_csv(csv);
  const auto& tc = t.column("t");
  const auto& y = t.column(column);
  std::pair<double, double> w;
  if (window.empty())
    w = {0.25 * tc.back(), 0.75 * tc.back()};
  else if (window.size() == 2)
    w = {window[0], window[1]};
  else
    throw Error(ErrorKind::config, "--window expects two values");
  DecayFit f;
  try {
    f = fit_decay(tc, y, w.first, w.second);
  } catch (const Error& e) {
    throw Error(ErrorKind::config, e.what());
  }
  json j = {{"column", column}, {"gamma", f.gamma}, {"amplitude", f.amplitude}, {"residual", f.residual},
            {"t_a", f.t_a},     {"t_b", f.t_b},     {"samples", f.samples}};
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::vector<double>& rs, const std::string& out) {
  const ExperimentConfig base = resolve(o);
  if (rs.empty()) throw Error(ErrorKind::config, "--r needs at least one value");
  std::vector<json> results(rs.size());
  std::vector<std::string> errors(rs.size());
  std::vector<int> codes(rs.size(), 0);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < static_cast<int>(rs.size()); ++i) {
    ExperimentConfig cfg = base;
    cfg.params.r = rs[i];
    char tag[64];
    std::snprintf(tag, sizeof tag, "r_%g", rs[i]);
    cfg.name = base.name + "_" + tag;
    if (!out.empty()) cfg.output_dir = (std::filesystem::path(out) / tag).string();
    try {
      results[i] = run_experiment(cfg).summary;
    } catch (const Error& e) {
      errors[i] = e.what();
      codes[i] = exit_code(e.kind());
    }
  }
  json j = json::array();
  int code = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (codes[i]) {
      j.push_back({{"r", rs[i]}, {"error", errors[i]}});
      if (!code) code = codes[i];
    } else {
      j.push_back({{"r", rs[i]}, {"gamma", results[i]["gamma"]}, {"final_l2", results[i]["final_l2"]}});
    }
  }
  std::cout << j.dump(2) << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backstepping kernels and Crank-Nicolson simulation for higher-order Schrodinger equations"};
  app.require_subcommand(1);

  CommonOpts ko, ro, so;
  std::string k_role = "control", k_sign = "plus", k_out;
  bool k_res = false;
  auto* kernel = app.add_subcommand("kernel", "Build a kernel and optionally export it");
  add_common(kernel, ko);
  kernel->add_option("--role", k_role, "control or observer");
  kernel->add_option("--observer-sign", k_sign, "plus or minus");
  kernel->add_option("--out", k_out, "Export file");
  kernel->add_flag("--residual", k_res, "Report lattice residuals");

  std::string r_out;
  auto* run = app.add_subcommand("run", "Run a preset or config file");
  add_common(run, ro);
  run->add_option("--out", r_out, "Output directory");

  std::string f_csv, f_col = "l2_u";
  std::vector<double> f_win;
  auto* fit = app.add_subcommand("fit", "Fit an exponential decay rate to a norms CSV");
  fit->add_option("csv", f_csv, "norms.csv")->required();
  fit->add_option("--column", f_col, "Column to fit");
  fit->add_option("--window", f_win, "t_a t_b")->expected(2)->delimiter(',');

  std::vector<double> s_r;
  std::string s_out;
  auto* sweep = app.add_subcommand("sweep", "Run a preset for several values of r");
  add_common(sweep, so);
  sweep->add_option("--r", s_r, "Comma-separated rates")->required()->delimiter(',');
  sweep->add_option("--out", s_out, "Output directory (one subdirectory per r)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*kernel) return cmd_kernel(ko, k_role, k_sign, k_out, k_res);
    if (*run) return cmd_run(ro, r_out);
    if (*fit) return cmd_fit(f_csv, f_col, f_win);
    if (*sweep) return cmd_sweep(so, s_r, s_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

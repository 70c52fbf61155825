#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hnls/kernel.hpp"
#include "hnls/observer.hpp"
#include "hnls/stepper.hpp"

namespace hnls {

enum class RunKind { controlled, uncontrolled, observer };

struct ExperimentConfig {
  std::string name = "custom";
  PhysicsParams params;
  /// Named initial datum (see initial_condition) or "file:<csv>" with columns x,re,im on the grid.
  std::string initial = "exp1";
  /// Observer runs: initial observer state, "zero" or a named datum.
  std::string observer_initial = "zero";
  int M = 201;
  int N = 1000;
  double T = 4.0;
  RunKind kind = RunKind::controlled;
  Linearization scheme = Linearization::taylor;
  NonlinearOptions nonlinear;
  KernelOptions kernel;
  Stencil stencil = Stencil::centered;
  ObserverSign observer_sign = ObserverSign::plus;
  std::vector<double> snapshot_times;
  std::optional<std::pair<double, double>> fit_window;
  std::string output_dir;
  std::string kernel_cache;

  Grid grid() const { return {M, params.L}; }
  TimeGrid time_grid() const { return {N, T}; }
  std::pair<double, double> window() const;
  void validate() const;
};

std::vector<std::string> preset_names();
/// Desk-scale preset; paper_scale switches to M = 1001, N = 5000.
ExperimentConfig preset(const std::string& name, bool paper_scale = false);

/// Flat "key = value" text; '#' starts a comment. A "preset" key loads the preset first.
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string format_config(const ExperimentConfig& cfg);

Eigen::VectorXcd initial_condition(const std::string& name, const Grid& g);

struct DecayFit {
  double t_a = 0.0, t_b = 0.0;
  double gamma = 0.0;
  double amplitude = 0.0;
  /// Root-mean-square residual of the log-linear fit.
  double residual = 0.0;
  int samples = 0;
};

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& norms, double t_a, double t_b);
DecayFit fit_decay(const RunRecord& rec, double t_a, double t_b);

/// Column-oriented table; all values real.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
};

void write_csv(std::ostream& os, const Table& t);
Table read_csv(std::istream& is);
Table load_csv(const std::string& path);
void save_csv(const std::string& path, const Table& t);

struct ExperimentResult {
  nlohmann::json summary;
  Table norms;
  Table snapshots;
  std::vector<std::string> files;
};

/// Loads a cached kernel or solves and stores it when cache_dir is nonempty.
Kernel cached_control_kernel(const PhysicsParams& p, const KernelOptions& opt, const std::string& cache_dir);
Kernel cached_observer_kernel(const PhysicsParams& p, const KernelOptions& opt, ObserverSign sign,
                              const std::string& cache_dir);

/// Runs the experiment; writes norms.csv, snapshots.csv, plot.py and summary.json when output_dir is set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

std::string plot_script(const ExperimentConfig& cfg);

const char* to_string(RunKind k);
const char* to_string(Linearization s);

}  // namespace hnls

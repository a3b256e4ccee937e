#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ntklab/config.hpp"
#include "ntklab/runio.hpp"

namespace ntklab::commands {

struct Command {
  enum class Kind { train, bench, dynamics, sweep, report };
  Kind kind = Kind::train;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::vector<std::filesystem::path> archives; // report inputs
  std::string sweep_param;                     // e.g. "strategy.n"
  std::vector<double> sweep_values;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed_override;
};

/// Exit status contract: 0 success, 2 config error, 3 numerical failure,
/// 4 I/O failure.
int run(const Command& cmd);

// Library-level entry points behind the subcommands; these throw instead of
// returning exit codes.

std::filesystem::path run_train(const config::RunConfig& cfg,
                                const std::filesystem::path& out_dir);

struct BenchResult {
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  // metrics[method][seed][task] = held-out loss
  std::vector<std::vector<std::vector<double>>> metrics;
  std::vector<std::vector<double>> stl_metrics;    // [seed][task]
  std::vector<std::vector<double>> delta_m;        // [method][seed]
  bench::MetricTable mean_table;                   // per-task means over seeds
  std::vector<double> mean_delta_m;                // per method
  std::vector<double> mean_rank;                   // per method
};

BenchResult run_bench_suite(const config::SuiteConfig& cfg,
                            const std::filesystem::path& out_dir, std::size_t workers,
                            bool save_archives = true);

struct DynamicsResult {
  double trajectory_rel_err = 0.0; // prediction vs integration, aggregate 2-norm ratio
  double spearman = 0.0;           // eigenvalue vs fitted rate, included components
  std::size_t top_checked = 0;     // top-3 components with strong fits
  double worst_rate_rel_err = 0.0; // among the checked components
  dynamics::DecayReport report;
  std::vector<double> eigenvalues;
  bool prediction_ok = false;
  bool rates_ok = false;
  bool spearman_ok = false;
};

DynamicsResult run_dynamics_experiment(const config::DynamicsConfig& cfg);

/// Runs the experiment and archives the decay report plus
/// prediction-versus-actual plot data.
DynamicsResult run_dynamics(const config::DynamicsConfig& cfg,
                            const std::filesystem::path& out_dir);

struct SweepRow {
  double value = 0.0;
  double mean_wall_time_s = 0.0;
  double omega_seed_variance = 0.0; // mean over rows/tasks of across-seed variance
  double mean_eval_loss = 0.0;      // mean over seeds and tasks
};

struct SweepResult {
  std::string param;
  std::vector<SweepRow> rows; // sorted by value
};

SweepResult run_sweep(const config::SweepConfig& cfg, const std::string& param,
                      const std::vector<double>& values,
                      const std::filesystem::path& out_dir, std::size_t workers);

void run_report(const std::vector<std::filesystem::path>& archives,
                const std::filesystem::path& out_dir);

} // namespace ntklab::commands

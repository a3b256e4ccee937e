#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ntklab/net.hpp"
#include "ntklab/weighting.hpp"

namespace ntklab::trainer {

/// Aligned multi-task samples (inputs plus one target list per task).
struct TaskData {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<std::vector<double>>> targets; // [task][sample]

  std::size_t size() const { return inputs.size(); }
  std::size_t task_count() const { return targets.size(); }
};

struct Dataset {
  TaskData train;
  TaskData eval;
};

enum class DiagEstimator { sr, full_theta };

struct TrainConfig {
  net::NetSpec net_spec;
  weighting::StrategyKind strategy;
  double lr = 0.1;
  std::size_t iterations = 1000;
  std::size_t batch_size = 64;
  std::size_t record_every = 10;
  std::size_t eig_record_every = 100;
  std::uint64_t seed = 0;
  // Diagnostic eigenvalues are computed the same way for every strategy so
  // that trajectories are comparable across methods.
  DiagEstimator diag_estimator = DiagEstimator::sr;
  std::size_t diag_n = 4;

  void validate() const;
};

struct RunRow {
  std::size_t iteration = 0;
  std::vector<double> losses;
  std::vector<double> omegas;
  std::vector<double> lambdas;
  double wall_time_s = 0.0; // cumulative; stored outside rows.tsv
};

struct RunRecord {
  TrainConfig config;
  std::vector<RunRow> rows;
  std::vector<double> final_metrics; // per-task held-out eval losses
  bool valid = true;
  std::string abort_reason;
  double total_wall_time_s = 0.0;
};

/// Runs exactly config.iterations SGD steps. Mini-batches are drawn without
/// replacement within an epoch; the shuffle stream is derived from the run
/// seed, so the record is a pure function of (config, dataset). A NaN loss
/// aborts the loop and returns the partial record flagged invalid.
RunRecord train(const TrainConfig& config, const Dataset& dataset);

struct FlowTrajectory {
  std::vector<double> times;
  // outputs[sample_index] is the stacked task-major output vector at that time.
  std::vector<std::vector<double>> outputs;
  std::vector<double> stacked_targets;
};

inline constexpr double kFlowDivergenceLimit = 1e12;

/// Full-batch explicit-Euler integration of shared-parameter gradient flow:
/// theta steps by -dt*eta times the gradient of the summed squared-error
/// loss, heads held fixed. With that scaling the trajectory is directly
/// comparable to the kernel prediction y + exp(-eta*K*t)(o0 - y) at equal t.
/// Requires dt <= eta; throws NumericalError (with the blow-up time) if the
/// loss exceeds kFlowDivergenceLimit.
FlowTrajectory gradient_flow(net::MtlNet& net, const TaskData& data, double eta,
                             double t_end, double dt, std::size_t record_points = 50);

/// Stacks per-task target vectors task-major then sample-major then
/// coordinate-minor, matching the row order of the assembled extended kernel.
std::vector<double> stack_targets(const TaskData& data);

} // namespace ntklab::trainer

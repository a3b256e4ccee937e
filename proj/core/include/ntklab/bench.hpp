#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ntklab/trainer.hpp"

namespace ntklab::bench {

enum class SynthKind { multifreq, scalemix, randlin };

/// Synthetic multi-task generator spec. multifreq builds per-task sums of
/// sinusoids along random unit directions, so low-frequency tasks sit on the
/// easy end of the kernel spectrum and high-frequency ones on the hard end.
/// scalemix reuses one target per task scaled by a per-task factor; randlin
/// emits random linear maps with prescribed condition numbers.
struct SynthSpec {
  SynthKind kind = SynthKind::multifreq;
  std::size_t input_dim = 2;
  std::size_t samples = 512;        // training samples
  std::size_t eval_samples = 128;   // held-out samples, same distribution
  double noise_std = 0.0;
  std::uint64_t seed = 0;

  // multifreq: one frequency list per task, one amplitude list per task.
  std::vector<std::vector<double>> freqs;
  std::vector<std::vector<double>> amplitudes; // empty = all ones
  // Length of the sinusoid direction vectors. At the default 0.35 the
  // frequency-1 component spans under one period across the input cube, so
  // the configured frequencies are spread across the kernel spectrum.
  double dir_scale = 0.35;

  // scalemix: per-task scale factors applied to the shared target.
  std::vector<double> scales;

  // randlin: per-task condition numbers; output_dim = input_dim.
  std::vector<double> cond;

  std::size_t task_count() const;
  std::size_t output_dim() const {
    return kind == SynthKind::randlin ? input_dim : 1;
  }
  void validate() const;
};

/// The spec's default threeway benchmark: frequencies {1}, {3}, {7} in two
/// input dimensions, 512 samples, noise 0.01.
SynthSpec default_multifreq(std::uint64_t seed = 0);

trainer::Dataset generate(const SynthSpec& spec);

/// Trains one single-head net per task under the same budget and returns the
/// per-task held-out losses. The trunk/head shapes and every training
/// hyperparameter are taken from train_cfg; only the head roster changes.
std::vector<double> stl_baseline(const SynthSpec& spec, const trainer::TrainConfig& train_cfg);

/// Signed mean relative change versus baseline, in percent; direction flag
/// 1 means higher is better. A zero baseline entry is an error.
double delta_m(const std::vector<double>& method_metrics,
               const std::vector<double>& baseline_metrics,
               const std::vector<int>& higher_is_better);

struct MetricTable {
  std::vector<std::string> methods;
  std::vector<std::vector<double>> values; // [method][metric]
  std::vector<int> higher_is_better;       // per metric
};

/// Average rank per method across all metric columns (best = 1, ties get the
/// average of their positions).
std::vector<double> mean_rank(const MetricTable& table);

/// Ranks of values (1 = best under the direction flag; ties averaged).
std::vector<double> average_ranks(const std::vector<double>& values, bool higher_better);

/// Spearman rank correlation with average-rank tie handling.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Dataset CSV: header x0..x{d-1} then task{i}_y{j} columns, LF endings,
/// full-precision decimals.
void export_csv(const trainer::TaskData& data, const std::filesystem::path& path);
trainer::TaskData import_csv(const std::filesystem::path& path);

} // namespace ntklab::bench

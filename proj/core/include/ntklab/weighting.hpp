#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ntklab/net.hpp"
#include "ntklab/ntk.hpp"
#include "ntklab/rng.hpp"

namespace ntklab::weighting {

enum class Strategy { LS, SI, RLW, DWA, NTKMTL, NTKMTL_SR };

/// Strategy selection plus its hyperparameters. n is the mini-batch count
/// for the kernel-based strategies; temperature drives DWA's softmax;
/// ema > 0 enables optional exponential smoothing of the emitted weights
/// (an extension, off by default).
struct StrategyKind {
  Strategy strategy = Strategy::LS;
  std::size_t n = 1;
  double temperature = 2.0;
  double ema = 0.0;

  static StrategyKind ls() { return {Strategy::LS}; }
  static StrategyKind si() { return {Strategy::SI}; }
  static StrategyKind rlw() { return {Strategy::RLW}; }
  static StrategyKind dwa(double temperature = 2.0) {
    return {Strategy::DWA, 1, temperature};
  }
  static StrategyKind ntkmtl(std::size_t n = 1) { return {Strategy::NTKMTL, n}; }
  static StrategyKind ntkmtl_sr(std::size_t n = 4) { return {Strategy::NTKMTL_SR, n}; }

  void validate() const;
};

std::string to_string(Strategy s);
std::optional<Strategy> strategy_from_string(const std::string& name);

enum class UpdateMode { weighted_gradient_sum, weighted_loss_backprop };

/// What one iteration of a strategy asks the optimizer to do. The
/// gradient-sum mode may carry the per-task gradients the strategy already
/// computed so they are not recomputed by the update step.
struct UpdateDirective {
  UpdateMode mode = UpdateMode::weighted_loss_backprop;
  std::vector<double> omegas;
  std::optional<std::vector<std::vector<double>>> shared_grads; // [task][theta]
  std::optional<std::vector<std::vector<double>>> head_grads;   // [task][head]
  std::optional<ntk::NtkSummary> summary;
};

/// Per-run mutable state owned by a single training loop.
class WeightState {
public:
  WeightState(StrategyKind kind, std::uint64_t seed);

  const StrategyKind& kind() const { return kind_; }
  const std::optional<ntk::NtkSummary>& last_summary() const { return last_summary_; }

  /// Produces this iteration's weights and update mode. losses are the
  /// current per-task batch losses; a NaN loss poisons the run.
  UpdateDirective compute_weights(const net::MtlNet& net, const net::TaskBatch& batch,
                                  const std::vector<double>& losses);

private:
  std::vector<double> smooth(std::vector<double> omegas);

  StrategyKind kind_;
  Rng rng_;
  std::vector<std::vector<double>> loss_history_; // up to 2 entries, newest last
  std::vector<double> prev_omegas_;
  std::optional<ntk::NtkSummary> last_summary_;
};

inline constexpr double kSiLossEpsilon = 1e-12;

/// Applies one step. weighted_gradient_sum: theta -= lr * sum_i omega_i g_i,
/// each head takes its own unweighted gradient. weighted_loss_backprop: one
/// backward pass through sum_i omega_i l_i updates theta and all heads.
void apply_update(const UpdateDirective& directive, net::MtlNet& net,
                  const net::TaskBatch& batch, double lr);

} // namespace ntklab::weighting

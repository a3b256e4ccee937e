#pragma once

#include <cstddef>
#include <vector>

#include "ntklab/linalg.hpp"
#include "ntklab/net.hpp"

namespace ntklab::ntk {

/// Kernel granularity: one Gram row per sample output coordinate, or one row
/// per mini-batch loss gradient.
struct Granularity {
  enum class Kind { per_sample, per_minibatch };
  Kind kind = Kind::per_minibatch;
  std::size_t n = 1; // mini-batch count, per_minibatch only

  static Granularity per_sample() { return {Kind::per_sample, 1}; }
  static Granularity per_minibatch(std::size_t n) { return {Kind::per_minibatch, n}; }
};

/// Block-structured kernel over task pairs plus its assembled form.
struct ExtendedNtk {
  std::size_t task_count = 0;
  std::vector<std::size_t> block_dims;           // rows of block row i
  std::vector<std::vector<linalg::Matrix>> blocks; // blocks[i][j]
  linalg::SymMatrix assembled;
};

/// Per-task top eigenvalues, their mean, and the derived weights
/// omega_i = sqrt(lambda_bar / lambda_i).
struct NtkSummary {
  std::vector<double> lambdas;   // floored values actually used
  std::vector<double> lambdas_raw;
  double lambda_bar = 0.0;
  double floor = 0.0;
  std::vector<double> omegas;
};

inline constexpr double kDefaultEigenFloorScale = 1e-12;

/// Task kernel for one task. per_sample: Gram of the task's parameter-space
/// Jacobian rows. per_minibatch: n x n Gram of per-mini-batch mean-loss
/// gradients over theta.
linalg::SymMatrix task_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                           std::size_t task, Granularity gran);

/// All task-pair blocks and the assembled kernel, which equals the Gram of
/// the vertically stacked per-task row sets.
ExtendedNtk extended_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                         Granularity gran);

/// Shared-representation variant: rows differentiate w.r.t. z instead of
/// theta. per_sample rows live in the concatenated per-sample z space;
/// per_minibatch rows are mini-batch loss gradients w.r.t. that mini-batch's
/// concatenated z.
linalg::SymMatrix sr_task_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                              std::size_t task, Granularity gran);

/// Extended kernel in z space (same row conventions as sr_task_ntk).
ExtendedNtk sr_extended_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                            Granularity gran);

/// Top eigenvalue per kernel, floored at floor_scale * max(1, mean of the
/// raw values), then lambda_bar and omegas. All-zero kernels therefore give
/// every task lambda = floor and omega = 1.
NtkSummary summarize(const std::vector<linalg::SymMatrix>& ntks,
                     double floor_scale = kDefaultEigenFloorScale);

/// Internal row sets behind the kernels; exposed for the weighted-kernel
/// identity check and reuse of gradients by the update step.
linalg::Matrix task_rows_shared(const net::MtlNet& net, const net::TaskBatch& batch,
                                std::size_t task, Granularity gran);
linalg::Matrix task_rows_repr(const net::MtlNet& net, const net::TaskBatch& batch,
                              std::size_t task, Granularity gran);

} // namespace ntklab::ntk

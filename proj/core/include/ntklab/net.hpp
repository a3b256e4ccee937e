#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ntklab/linalg.hpp"

namespace ntklab::net {

enum class Activation { tanh, relu };

/// One task head: optional hidden layers (affine + activation each) followed
/// by a final affine map to output_dim.
struct HeadSpec {
  std::vector<std::size_t> hidden;
  std::size_t output_dim = 1;
};

/// Architecture of a shared-trunk multi-head MLP.
///
/// The trunk is a chain of affine layers with the activation applied after
/// each one; the activated output of the last trunk layer is the shared
/// representation z. An empty trunk means z = x (so exactly linear models are
/// expressible with a bare head). repr_dim must equal the last trunk width,
/// or input_dim when the trunk is empty.
struct NetSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> trunk;
  std::size_t repr_dim = 1;
  std::vector<HeadSpec> heads;
  Activation activation = Activation::tanh;
  std::uint64_t seed = 0;
  bool use_bias = true;

  std::size_t task_count() const { return heads.size(); }
  void validate() const;

  /// Stable hash over every architectural field; used to guard checkpoints.
  std::uint64_t hash() const;
};

/// A batch with one target list per task, all aligned with inputs. The
/// sample count is truncated at construction to a multiple of n_minibatches
/// (trailing samples are dropped).
struct TaskBatch {
  std::vector<std::vector<double>> inputs;
  // targets[task][sample] is the target vector for that task and sample.
  std::vector<std::vector<std::vector<double>>> targets;
  std::size_t n_minibatches = 1;

  TaskBatch() = default;
  TaskBatch(std::vector<std::vector<double>> in,
            std::vector<std::vector<std::vector<double>>> tg,
            std::size_t n_mb = 1);

  std::size_t size() const { return inputs.size(); }
  std::size_t task_count() const { return targets.size(); }
  std::size_t minibatch_size() const { return inputs.size() / n_minibatches; }
};

/// Everything forward() caches so that backprop is exact: per-layer
/// pre-activations and activations for the trunk and every head.
struct ForwardTrace {
  std::size_t batch = 0;
  // trunk_pre[layer][sample], trunk_act[layer][sample]
  std::vector<std::vector<std::vector<double>>> trunk_pre;
  std::vector<std::vector<std::vector<double>>> trunk_act;
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> z; // [sample][repr_dim]
  // head_pre[task][layer][sample], head_act likewise (activated hidden only)
  std::vector<std::vector<std::vector<std::vector<double>>>> head_pre;
  std::vector<std::vector<std::vector<std::vector<double>>>> head_act;
  std::vector<std::vector<std::vector<double>>> outputs; // [task][sample]
};

/// Per-task gradients produced by one backward pass.
struct GradSet {
  std::vector<double> shared;                   // over theta
  std::vector<std::vector<double>> heads;       // over each head's params
};

class MtlNet {
public:
  MtlNet() = default;
  explicit MtlNet(NetSpec spec);

  const NetSpec& spec() const { return spec_; }
  std::size_t task_count() const { return spec_.heads.size(); }

  std::vector<double>& theta() { return theta_; }
  const std::vector<double>& theta() const { return theta_; }
  std::vector<double>& head_params(std::size_t task) { return head_params_[task]; }
  const std::vector<double>& head_params(std::size_t task) const { return head_params_[task]; }

  std::size_t theta_size() const { return theta_.size(); }
  std::size_t head_size(std::size_t task) const { return head_params_[task].size(); }
  std::size_t param_count() const;

  ForwardTrace forward(const std::vector<std::vector<double>>& inputs) const;

  /// Mean over samples of 0.5 * ||f_task - y_task||^2.
  double task_loss(const ForwardTrace& trace, const TaskBatch& batch,
                   std::size_t task) const;
  std::vector<double> task_losses(const ForwardTrace& trace, const TaskBatch& batch) const;

  /// Exact gradient of task_loss w.r.t. theta (heads held fixed).
  std::vector<double> grad_shared(const TaskBatch& batch, std::size_t task) const;

  /// Exact gradient of task_loss w.r.t. the task's own head parameters.
  std::vector<double> grad_head(const TaskBatch& batch, std::size_t task) const;

  /// Gradients of sum_i omega_i * task_loss_i in one backward pass: the
  /// shared part and every head part.
  GradSet grad_weighted(const TaskBatch& batch, const std::vector<double>& omegas) const;

  /// Rows are output-coordinate gradients over theta, sample-major then
  /// coordinate-minor; (samples*output_dim) x |theta|.
  linalg::Matrix jacobian_shared(const std::vector<std::vector<double>>& inputs,
                                 std::size_t task) const;

  /// Rows as in jacobian_shared, columns indexed by the concatenated
  /// per-sample z coordinates ((samples*output_dim) x (samples*repr_dim)).
  /// An output row only touches its own sample's z block, so the layout is
  /// block diagonal.
  linalg::Matrix jacobian_repr(const std::vector<std::vector<double>>& inputs,
                               std::size_t task) const;

  /// d z / d theta, rows sample-major then representation-coordinate-minor;
  /// (samples*repr_dim) x |theta|.
  linalg::Matrix jacobian_trunk(const std::vector<std::vector<double>>& inputs) const;

  /// Gradient of one task's mean loss over a sample range [begin, end)
  /// w.r.t. theta; used for mini-batch kernels.
  std::vector<double> grad_shared_range(const ForwardTrace& trace, const TaskBatch& batch,
                                        std::size_t task, std::size_t begin,
                                        std::size_t end) const;

  /// Gradient of one task's mean loss over [begin, end) w.r.t. the
  /// concatenated z of those samples (length (end-begin)*repr_dim).
  std::vector<double> grad_repr_range(const ForwardTrace& trace, const TaskBatch& batch,
                                      std::size_t task, std::size_t begin,
                                      std::size_t end) const;

  /// Gradient of the plain (unweighted) sum-over-samples-and-tasks loss
  /// w.r.t. theta, heads held fixed; used by the gradient-flow integrator.
  std::vector<double> grad_shared_sum_loss(const TaskBatch& batch) const;

private:
  struct LayerLayout {
    std::size_t in = 0, out = 0;
    std::size_t weight_off = 0, bias_off = 0;
  };

  void backprop_trunk(const ForwardTrace& trace, std::size_t sample,
                      std::vector<double> dz, std::span<double> dtheta) const;
  // Returns d(loss)/dz for the sample and accumulates head gradients when
  // dhead is non-empty.
  std::vector<double> backprop_head(const ForwardTrace& trace, std::size_t task,
                                    std::size_t sample, std::vector<double> dout,
                                    std::span<double> dhead) const;

  double act(double x) const;
  double act_deriv(double pre) const;

  NetSpec spec_;
  std::vector<double> theta_;
  std::vector<std::vector<double>> head_params_;
  std::vector<LayerLayout> trunk_layout_;
  std::vector<std::vector<LayerLayout>> head_layout_;
};

/// Seeded scaled-normal initialization (weights and biases drawn with
/// std = 1/sqrt(fan_in)); identical spec+seed gives identical parameters.
MtlNet init(const NetSpec& spec);

/// Little-endian binary checkpoint: magic, spec hash, parameter count, then
/// the trunk and head parameters as 64-bit floats.
void save_params(const MtlNet& net, const std::filesystem::path& path);
void load_params(MtlNet& net, const std::filesystem::path& path);

} // namespace ntklab::net

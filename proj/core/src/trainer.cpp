#include "ntklab/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ntklab/ntk.hpp"
#include "ntklab/rng.hpp"

namespace ntklab::trainer {

void TrainConfig::validate() const {
  net_spec.validate();
  strategy.validate();
  if (!(lr > 0.0)) throw InvalidInputError("TrainConfig: lr must be positive");
  if (iterations == 0) throw InvalidInputError("TrainConfig: iterations must be >= 1");
  if (record_every == 0) throw InvalidInputError("TrainConfig: record_every must be >= 1");
  if (eig_record_every == 0) {
    throw InvalidInputError("TrainConfig: eig_record_every must be >= 1");
  }
  if (batch_size == 0) throw InvalidInputError("TrainConfig: batch_size must be >= 1");
  if (diag_n == 0) throw InvalidInputError("TrainConfig: diag_n must be >= 1");
}

namespace {

net::TaskBatch gather(const TaskData& data, const std::vector<std::size_t>& idx,
                      std::size_t n_minibatches) {
  std::vector<std::vector<double>> in(idx.size());
  std::vector<std::vector<std::vector<double>>> tg(data.task_count());
  for (auto& t : tg) t.resize(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    in[i] = data.inputs[idx[i]];
    for (std::size_t t = 0; t < data.task_count(); ++t) {
      tg[t][i] = data.targets[t][idx[i]];
    }
  }
  return net::TaskBatch(std::move(in), std::move(tg), n_minibatches);
}

net::TaskBatch whole(const TaskData& data, std::size_t n_minibatches = 1) {
  return net::TaskBatch(data.inputs, data.targets, n_minibatches);
}

std::vector<double> diag_lambdas(const net::MtlNet& net, const net::TaskBatch& batch,
                                 const TrainConfig& cfg) {
  const std::size_t n = std::min(cfg.diag_n, batch.size());
  const auto gran = ntk::Granularity::per_minibatch(n);
  std::vector<double> out(net.task_count());
  for (std::size_t t = 0; t < net.task_count(); ++t) {
    const linalg::SymMatrix k = cfg.diag_estimator == DiagEstimator::sr
                                    ? ntk::sr_task_ntk(net, batch, t, gran)
                                    : ntk::task_ntk(net, batch, t, gran);
    out[t] = linalg::max_eigenpair(k).lambda;
  }
  return out;
}

} // namespace

RunRecord train(const TrainConfig& config, const Dataset& dataset) {
  config.validate();
  if (dataset.train.task_count() != config.net_spec.task_count()) {
    throw InvalidInputError("train: dataset task count does not match net heads");
  }
  if (dataset.train.size() == 0) throw InvalidInputError("train: empty training split");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  RunRecord rec;
  rec.config = config;

  net::MtlNet model = net::init(config.net_spec);
  weighting::WeightState state(config.strategy, config.seed);

  const std::size_t n_train = dataset.train.size();
  const std::size_t bs = std::min(config.batch_size, n_train);
  if (bs < config.strategy.n) {
    throw InvalidInputError("train: batch smaller than the strategy's mini-batch count");
  }
  std::vector<std::size_t> order(n_train);
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = n_train; // force a shuffle before the first batch
  std::size_t epoch = 0;

  std::vector<double> last_lambdas(model.task_count(),
                                   std::numeric_limits<double>::quiet_NaN());

  const std::size_t strat_n = config.strategy.n;
  for (std::size_t it = 0; it < config.iterations; ++it) {
    if (cursor + bs > n_train) {
      Rng shuffle_rng(derive_seed(config.seed, 0x1000 + epoch));
      deterministic_shuffle(order, shuffle_rng);
      cursor = 0;
      ++epoch;
    }
    std::vector<std::size_t> idx(order.begin() + cursor, order.begin() + cursor + bs);
    cursor += bs;

    net::TaskBatch batch = gather(dataset.train, idx, strat_n);
    const net::ForwardTrace trace = model.forward(batch.inputs);
    const std::vector<double> losses = model.task_losses(trace, batch);

    // A diverged loss poisons the run before it can reach the weighting
    // stage or the diagnostics as NaN/Inf parameters.
    bool poisoned = false;
    for (std::size_t t = 0; t < losses.size(); ++t) {
      if (!std::isfinite(losses[t])) {
        rec.valid = false;
        rec.abort_reason =
            "poisoned run: non-finite loss for task " + std::to_string(t) +
            " at iteration " + std::to_string(it);
        poisoned = true;
        break;
      }
    }
    if (poisoned) break;

    weighting::UpdateDirective directive;
    try {
      directive = state.compute_weights(model, batch, losses);
    } catch (const PoisonedRunError& e) {
      rec.valid = false;
      rec.abort_reason = e.what();
      break;
    }

    const bool eig_tick = (it % config.eig_record_every == 0);
    if (eig_tick) {
      last_lambdas = diag_lambdas(model, batch, config);
    }
    // Rows are logged on either cadence so eigenvalue trajectories always
    // have a row at their own tick.
    if (it % config.record_every == 0 || eig_tick) {
      rec.rows.push_back({it, losses, directive.omegas, last_lambdas, elapsed()});
    }

    weighting::apply_update(directive, model, batch, config.lr);
  }

  if (rec.valid && dataset.eval.size() > 0) {
    const net::TaskBatch eval_batch = whole(dataset.eval);
    const net::ForwardTrace tr = model.forward(eval_batch.inputs);
    rec.final_metrics = model.task_losses(tr, eval_batch);
  }
  rec.total_wall_time_s = elapsed();
  return rec;
}

std::vector<double> stack_targets(const TaskData& data) {
  std::vector<double> out;
  for (const auto& task : data.targets) {
    for (const auto& y : task) out.insert(out.end(), y.begin(), y.end());
  }
  return out;
}

FlowTrajectory gradient_flow(net::MtlNet& net, const TaskData& data, double eta,
                             double t_end, double dt, std::size_t record_points) {
  if (!(eta > 0.0)) throw InvalidInputError("gradient_flow: eta must be positive");
  if (!(dt > 0.0) || dt > eta) {
    throw InvalidInputError("gradient_flow: need 0 < dt <= eta");
  }
  if (!(t_end > 0.0)) throw InvalidInputError("gradient_flow: t_end must be positive");
  if (data.size() == 0) throw InvalidInputError("gradient_flow: empty data");

  const net::TaskBatch batch(data.inputs, data.targets, 1);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(t_end / dt));
  const std::size_t stride = std::max<std::size_t>(1, steps / std::max<std::size_t>(1, record_points));

  FlowTrajectory traj;
  traj.stacked_targets = stack_targets(data);

  auto record = [&](double t) {
    const net::ForwardTrace tr = net.forward(batch.inputs);
    std::vector<double> stacked;
    double loss = 0.0;
    for (std::size_t task = 0; task < net.task_count(); ++task) {
      for (std::size_t s = 0; s < batch.size(); ++s) {
        const auto& f = tr.outputs[task][s];
        const auto& y = batch.targets[task][s];
        for (std::size_t c = 0; c < f.size(); ++c) {
          stacked.push_back(f[c]);
          loss += 0.5 * (f[c] - y[c]) * (f[c] - y[c]);
        }
      }
    }
    if (!(loss < kFlowDivergenceLimit)) {
      std::ostringstream msg;
      msg << "gradient_flow: diverged at t = " << t << " (loss " << loss << ")";
      throw NumericalError(msg.str());
    }
    traj.times.push_back(t);
    traj.outputs.push_back(std::move(stacked));
  };

  record(0.0);
  const double step_scale = dt * eta;
  for (std::size_t s = 1; s <= steps; ++s) {
    const std::vector<double> g = net.grad_shared_sum_loss(batch);
    for (std::size_t i = 0; i < g.size(); ++i) net.theta()[i] -= step_scale * g[i];
    if (s % stride == 0 || s == steps) {
      record(static_cast<double>(s) * dt);
    }
  }
  return traj;
}

} // namespace ntklab::trainer

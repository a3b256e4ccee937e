#include "ntklab/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ntklab::weighting {

void StrategyKind::validate() const {
  if (!(temperature > 0.0)) {
    throw InvalidInputError("StrategyKind: temperature must be positive");
  }
  if (n == 0) throw InvalidInputError("StrategyKind: n must be >= 1");
  if (ema < 0.0 || ema >= 1.0) {
    throw InvalidInputError("StrategyKind: ema must lie in [0, 1)");
  }
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::LS: return "ls";
    case Strategy::SI: return "si";
    case Strategy::RLW: return "rlw";
    case Strategy::DWA: return "dwa";
    case Strategy::NTKMTL: return "ntkmtl";
    case Strategy::NTKMTL_SR: return "ntkmtl_sr";
  }
  return "?";
}

std::optional<Strategy> strategy_from_string(const std::string& name) {
  if (name == "ls") return Strategy::LS;
  if (name == "si") return Strategy::SI;
  if (name == "rlw") return Strategy::RLW;
  if (name == "dwa") return Strategy::DWA;
  if (name == "ntkmtl") return Strategy::NTKMTL;
  if (name == "ntkmtl_sr") return Strategy::NTKMTL_SR;
  return std::nullopt;
}

namespace {

std::vector<double> softmax(const std::vector<double>& x) {
  const double mx = *std::max_element(x.begin(), x.end());
  std::vector<double> e(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    e[i] = std::exp(x[i] - mx);
    sum += e[i];
  }
  for (double& v : e) v /= sum;
  return e;
}

} // namespace

WeightState::WeightState(StrategyKind kind, std::uint64_t seed)
    : kind_(kind), rng_(derive_seed(seed, 0x57)) {
  kind_.validate();
}

std::vector<double> WeightState::smooth(std::vector<double> omegas) {
  if (kind_.ema > 0.0 && !prev_omegas_.empty()) {
    for (std::size_t i = 0; i < omegas.size(); ++i) {
      omegas[i] = kind_.ema * prev_omegas_[i] + (1.0 - kind_.ema) * omegas[i];
    }
  }
  prev_omegas_ = omegas;
  return omegas;
}

UpdateDirective WeightState::compute_weights(const net::MtlNet& net,
                                             const net::TaskBatch& batch,
                                             const std::vector<double>& losses) {
  const std::size_t k = losses.size();
  if (k != net.task_count()) {
    throw InvalidInputError("compute_weights: loss count does not match task count");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (std::isnan(losses[i])) {
      std::ostringstream msg;
      msg << "poisoned run: NaN loss for task " << i;
      throw PoisonedRunError(msg.str());
    }
  }

  UpdateDirective d;
  switch (kind_.strategy) {
    case Strategy::LS: {
      d.mode = UpdateMode::weighted_loss_backprop;
      d.omegas.assign(k, 1.0);
      break;
    }
    case Strategy::SI: {
      d.mode = UpdateMode::weighted_loss_backprop;
      d.omegas.resize(k);
      for (std::size_t i = 0; i < k; ++i) {
        d.omegas[i] = 1.0 / std::max(losses[i], kSiLossEpsilon);
      }
      break;
    }
    case Strategy::RLW: {
      d.mode = UpdateMode::weighted_loss_backprop;
      std::vector<double> draws(k);
      for (double& v : draws) v = rng_.normal();
      d.omegas = softmax(draws);
      for (double& v : d.omegas) v *= static_cast<double>(k);
      break;
    }
    case Strategy::DWA: {
      d.mode = UpdateMode::weighted_loss_backprop;
      if (loss_history_.size() < 2) {
        d.omegas.assign(k, 1.0);
      } else {
        std::vector<double> r(k);
        for (std::size_t i = 0; i < k; ++i) {
          const double denom = std::max(loss_history_[0][i], kSiLossEpsilon);
          r[i] = loss_history_[1][i] / denom / kind_.temperature;
        }
        d.omegas = softmax(r);
        for (double& v : d.omegas) v *= static_cast<double>(k);
      }
      break;
    }
    case Strategy::NTKMTL: {
      d.mode = UpdateMode::weighted_gradient_sum;
      const auto gran = ntk::Granularity::per_minibatch(kind_.n);
      std::vector<linalg::SymMatrix> kernels;
      std::vector<std::vector<double>> shared(k);
      std::vector<std::vector<double>> heads(k);
      kernels.reserve(k);
      for (std::size_t t = 0; t < k; ++t) {
        linalg::Matrix rows = ntk::task_rows_shared(net, batch, t, gran);
        kernels.push_back(linalg::gram(rows));
        // The batch gradient is the average of the mini-batch gradients.
        std::vector<double> g(rows.cols(), 0.0);
        for (std::size_t b = 0; b < rows.rows(); ++b) {
          const auto row = rows.row(b);
          for (std::size_t c = 0; c < rows.cols(); ++c) g[c] += row[c];
        }
        const double inv_n = 1.0 / static_cast<double>(rows.rows());
        for (double& v : g) v *= inv_n;
        shared[t] = std::move(g);
        heads[t] = net.grad_head(batch, t);
      }
      ntk::NtkSummary summary = ntk::summarize(kernels);
      d.omegas = summary.omegas;
      d.summary = std::move(summary);
      d.shared_grads = std::move(shared);
      d.head_grads = std::move(heads);
      break;
    }
    case Strategy::NTKMTL_SR: {
      d.mode = UpdateMode::weighted_loss_backprop;
      const auto gran = ntk::Granularity::per_minibatch(kind_.n);
      std::vector<linalg::SymMatrix> kernels;
      kernels.reserve(k);
      for (std::size_t t = 0; t < k; ++t) {
        kernels.push_back(ntk::sr_task_ntk(net, batch, t, gran));
      }
      ntk::NtkSummary summary = ntk::summarize(kernels);
      d.omegas = summary.omegas;
      d.summary = std::move(summary);
      break;
    }
  }

  // DWA history: newest at the back, at most two entries.
  loss_history_.push_back(losses);
  if (loss_history_.size() > 2) loss_history_.erase(loss_history_.begin());

  d.omegas = smooth(std::move(d.omegas));
  if (d.summary) last_summary_ = d.summary;
  for (double w : d.omegas) {
    if (!std::isfinite(w)) throw NumericalError("compute_weights: non-finite weight");
  }
  return d;
}

void apply_update(const UpdateDirective& directive, net::MtlNet& net,
                  const net::TaskBatch& batch, double lr) {
  if (!(lr > 0.0)) throw InvalidInputError("apply_update: lr must be positive");
  const std::size_t k = net.task_count();
  if (directive.omegas.size() != k) {
    throw InvalidInputError("apply_update: weight count mismatch");
  }

  if (directive.mode == UpdateMode::weighted_gradient_sum) {
    std::vector<double> step(net.theta_size(), 0.0);
    for (std::size_t t = 0; t < k; ++t) {
      const std::vector<double> g = directive.shared_grads
                                        ? (*directive.shared_grads)[t]
                                        : net.grad_shared(batch, t);
      for (std::size_t i = 0; i < step.size(); ++i) step[i] += directive.omegas[t] * g[i];
    }
    for (std::size_t i = 0; i < step.size(); ++i) net.theta()[i] -= lr * step[i];
    for (std::size_t t = 0; t < k; ++t) {
      const std::vector<double> gh =
          directive.head_grads ? (*directive.head_grads)[t] : net.grad_head(batch, t);
      auto& hp = net.head_params(t);
      for (std::size_t i = 0; i < hp.size(); ++i) hp[i] -= lr * gh[i];
    }
  } else {
    const net::GradSet g = net.grad_weighted(batch, directive.omegas);
    for (std::size_t i = 0; i < g.shared.size(); ++i) net.theta()[i] -= lr * g.shared[i];
    for (std::size_t t = 0; t < k; ++t) {
      auto& hp = net.head_params(t);
      for (std::size_t i = 0; i < hp.size(); ++i) hp[i] -= lr * g.heads[t][i];
    }
  }
}

} // namespace ntklab::weighting

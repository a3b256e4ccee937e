#include "ntklab/ntk.hpp"

#include <algorithm>
#include <cmath>

namespace ntklab::ntk {

namespace {

void check_gran(const net::TaskBatch& batch, Granularity gran) {
  if (gran.kind == Granularity::Kind::per_minibatch) {
    if (gran.n == 0) throw InvalidInputError("ntk: mini-batch count must be >= 1");
    if (batch.size() / gran.n == 0) {
      throw InvalidInputError("ntk: batch smaller than mini-batch count");
    }
  }
}

} // namespace

linalg::Matrix task_rows_shared(const net::MtlNet& net, const net::TaskBatch& batch,
                                std::size_t task, Granularity gran) {
  check_gran(batch, gran);
  if (gran.kind == Granularity::Kind::per_sample) {
    return net.jacobian_shared(batch.inputs, task);
  }
  const std::size_t n = gran.n;
  const std::size_t bs = batch.size() / n;
  const net::ForwardTrace tr = net.forward(batch.inputs);
  linalg::Matrix rows(n, net.theta_size());
  for (std::size_t b = 0; b < n; ++b) {
    const std::vector<double> g =
        net.grad_shared_range(tr, batch, task, b * bs, (b + 1) * bs);
    std::copy(g.begin(), g.end(), rows.row(b).begin());
  }
  return rows;
}

linalg::Matrix task_rows_repr(const net::MtlNet& net, const net::TaskBatch& batch,
                              std::size_t task, Granularity gran) {
  check_gran(batch, gran);
  if (gran.kind == Granularity::Kind::per_sample) {
    return net.jacobian_repr(batch.inputs, task);
  }
  const std::size_t n = gran.n;
  const std::size_t bs = batch.size() / n;
  const net::ForwardTrace tr = net.forward(batch.inputs);
  linalg::Matrix rows(n, bs * net.spec().repr_dim);
  for (std::size_t b = 0; b < n; ++b) {
    const std::vector<double> g =
        net.grad_repr_range(tr, batch, task, b * bs, (b + 1) * bs);
    std::copy(g.begin(), g.end(), rows.row(b).begin());
  }
  return rows;
}

linalg::SymMatrix task_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                           std::size_t task, Granularity gran) {
  return linalg::gram(task_rows_shared(net, batch, task, gran));
}

linalg::SymMatrix sr_task_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                              std::size_t task, Granularity gran) {
  return linalg::gram(task_rows_repr(net, batch, task, gran));
}

namespace {

ExtendedNtk assemble(std::vector<linalg::Matrix> row_sets) {
  const std::size_t k = row_sets.size();
  ExtendedNtk out;
  out.task_count = k;
  out.block_dims.resize(k);
  std::size_t total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    out.block_dims[i] = row_sets[i].rows();
    total += row_sets[i].rows();
  }

  out.blocks.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.blocks[i].resize(k);
    for (std::size_t j = 0; j < k; ++j) {
      if (j < i) {
        out.blocks[i][j] = out.blocks[j][i].transposed();
      } else {
        out.blocks[i][j] = linalg::cross_gram(row_sets[i], row_sets[j]);
      }
    }
  }

  out.assembled = linalg::SymMatrix(total);
  std::size_t roff = 0;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t coff = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const linalg::Matrix& b = out.blocks[i][j];
      for (std::size_t r = 0; r < b.rows(); ++r) {
        for (std::size_t c = 0; c < b.cols(); ++c) {
          out.assembled(roff + r, coff + c) = b(r, c);
        }
      }
      coff += out.block_dims[j];
    }
    roff += out.block_dims[i];
  }
  return out;
}

} // namespace

ExtendedNtk extended_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                         Granularity gran) {
  std::vector<linalg::Matrix> rows;
  rows.reserve(net.task_count());
  for (std::size_t t = 0; t < net.task_count(); ++t) {
    rows.push_back(task_rows_shared(net, batch, t, gran));
  }
  return assemble(std::move(rows));
}

ExtendedNtk sr_extended_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                            Granularity gran) {
  std::vector<linalg::Matrix> rows;
  rows.reserve(net.task_count());
  for (std::size_t t = 0; t < net.task_count(); ++t) {
    rows.push_back(task_rows_repr(net, batch, t, gran));
  }
  return assemble(std::move(rows));
}

NtkSummary summarize(const std::vector<linalg::SymMatrix>& ntks, double floor_scale) {
  if (ntks.empty()) throw InvalidInputError("summarize: need at least one kernel");
  if (!(floor_scale > 0.0)) throw InvalidInputError("summarize: floor must be positive");

  NtkSummary s;
  const std::size_t k = ntks.size();
  s.lambdas_raw.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    s.lambdas_raw[i] = linalg::max_eigenpair(ntks[i]).lambda;
  }
  double mean_raw = 0.0;
  for (double l : s.lambdas_raw) mean_raw += l;
  mean_raw /= static_cast<double>(k);

  // A converged or dead task would otherwise drive omega to infinity.
  s.floor = floor_scale * std::max(1.0, mean_raw);
  s.lambdas.resize(k);
  for (std::size_t i = 0; i < k; ++i) s.lambdas[i] = std::max(s.lambdas_raw[i], s.floor);

  double mean = 0.0;
  for (double l : s.lambdas) mean += l;
  s.lambda_bar = mean / static_cast<double>(k);

  s.omegas.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    s.omegas[i] = std::sqrt(s.lambda_bar / s.lambdas[i]);
  }
  return s;
}

} // namespace ntklab::ntk

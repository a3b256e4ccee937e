#include "ntklab/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace ntklab::dynamics {

std::vector<double> predict_training_error(const linalg::SymMatrix& k,
                                           const std::vector<double>& y,
                                           const std::vector<double>& o0, double eta,
                                           double t) {
  const std::size_t n = k.dim();
  if (y.size() != n || o0.size() != n) {
    throw InvalidInputError("predict_training_error: dimension mismatch");
  }
  const linalg::SymMatrix decay = linalg::sym_exp(k, -eta * t);
  std::vector<double> err(n);
  for (std::size_t i = 0; i < n; ++i) err[i] = o0[i] - y[i];
  const std::vector<double> prop = linalg::matvec(decay, err);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + prop[i];
  return out;
}

std::vector<double> eigenbasis_projection(const linalg::EigenDecomp& eig,
                                          const std::vector<double>& outputs,
                                          const std::vector<double>& y) {
  const std::size_t n = eig.eigenvalues.size();
  if (outputs.size() != n || y.size() != n) {
    throw InvalidInputError("eigenbasis_projection: dimension mismatch");
  }
  std::vector<double> proj(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += eig.eigenvectors(i, j) * (outputs[i] - y[i]);
    }
    proj[j] = s;
  }
  return proj;
}

std::vector<double> eigenbasis_projection(const linalg::SymMatrix& k,
                                          const std::vector<double>& outputs,
                                          const std::vector<double>& y) {
  return eigenbasis_projection(linalg::sym_eig(k), outputs, y);
}

DecayReport fit_decay(const std::vector<double>& times,
                      const std::vector<std::vector<double>>& projections,
                      const std::vector<double>& eigenvalues, double eta) {
  if (times.size() < 5) {
    throw InvalidInputError("fit_decay: need at least 5 time samples");
  }
  if (projections.size() != times.size()) {
    throw InvalidInputError("fit_decay: one projection vector per time sample");
  }
  const std::size_t dim = eigenvalues.size();
  for (const auto& p : projections) {
    if (p.size() != dim) {
      throw InvalidInputError("fit_decay: projection dimension mismatch");
    }
  }

  DecayReport rep;
  rep.eigenvalues = eigenvalues;
  rep.eta = eta;
  rep.horizon = times.size();
  rep.fitted_rates.assign(dim, 0.0);
  rep.r_squared.assign(dim, 0.0);
  rep.included.assign(dim, false);

  for (std::size_t j = 0; j < dim; ++j) {
    if (std::abs(projections[0][j]) < kProjectionInitialThreshold) continue;

    std::vector<double> ts, ls;
    for (std::size_t s = 0; s < times.size(); ++s) {
      const double mag = std::abs(projections[s][j]);
      if (mag < kProjectionTruncation) break;
      ts.push_back(times[s]);
      ls.push_back(std::log(mag));
    }
    if (ts.size() < 2) continue;

    const double n = static_cast<double>(ts.size());
    double st = 0.0, sl = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      st += ts[i];
      sl += ls[i];
    }
    const double mt = st / n, ml = sl / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double dx = ts[i] - mt;
      const double dy = ls[i] - ml;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
    }
    if (sxx == 0.0) continue;
    const double slope = sxy / sxx;
    rep.fitted_rates[j] = -slope;
    // A flat series has nothing to explain; flag the fit as uninformative.
    rep.r_squared[j] = syy == 0.0 ? 0.0 : (sxy * sxy) / (sxx * syy);
    rep.included[j] = true;
  }
  return rep;
}

linalg::SymMatrix scale_blocks(const ntk::ExtendedNtk& k,
                               const std::vector<double>& omegas) {
  if (omegas.size() != k.task_count) {
    throw InvalidInputError("scale_blocks: weight count mismatch");
  }
  linalg::SymMatrix out(k.assembled.dim());
  std::size_t roff = 0;
  for (std::size_t i = 0; i < k.task_count; ++i) {
    std::size_t coff = 0;
    for (std::size_t j = 0; j < k.task_count; ++j) {
      const linalg::Matrix& b = k.blocks[i][j];
      const double w = omegas[i] * omegas[j];
      for (std::size_t r = 0; r < b.rows(); ++r) {
        for (std::size_t c = 0; c < b.cols(); ++c) {
          out(roff + r, coff + c) = w * b(r, c);
        }
      }
      coff += k.block_dims[j];
    }
    roff += k.block_dims[i];
  }
  return out;
}

double verify_weighted_ntk(const net::MtlNet& net, const net::TaskBatch& batch,
                           const std::vector<double>& omegas, ntk::Granularity gran) {
  if (omegas.size() != net.task_count()) {
    throw InvalidInputError("verify_weighted_ntk: weight count mismatch");
  }

  const ntk::ExtendedNtk plain = ntk::extended_ntk(net, batch, gran);
  const linalg::SymMatrix scaled = scale_blocks(plain, omegas);

  // Route (b): scale the row sets first, then take the Gram.
  std::size_t total_rows = 0;
  std::vector<linalg::Matrix> row_sets;
  row_sets.reserve(net.task_count());
  for (std::size_t t = 0; t < net.task_count(); ++t) {
    row_sets.push_back(ntk::task_rows_shared(net, batch, t, gran));
    total_rows += row_sets.back().rows();
  }
  linalg::Matrix stacked(total_rows, row_sets[0].cols());
  std::size_t roff = 0;
  for (std::size_t t = 0; t < net.task_count(); ++t) {
    for (std::size_t r = 0; r < row_sets[t].rows(); ++r) {
      auto dst = stacked.row(roff + r);
      const auto src = row_sets[t].row(r);
      for (std::size_t c = 0; c < src.size(); ++c) dst[c] = omegas[t] * src[c];
    }
    roff += row_sets[t].rows();
  }
  const linalg::SymMatrix direct = linalg::gram(stacked);

  // Max over blocks of the Frobenius deviation, relative to the kernel scale.
  const double scale = std::max(linalg::frobenius_norm(direct), 1e-300);
  double worst = 0.0;
  std::size_t ro = 0;
  for (std::size_t i = 0; i < plain.task_count; ++i) {
    std::size_t co = 0;
    for (std::size_t j = 0; j < plain.task_count; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < plain.block_dims[i]; ++r) {
        for (std::size_t c = 0; c < plain.block_dims[j]; ++c) {
          const double d = scaled(ro + r, co + c) - direct(ro + r, co + c);
          acc += d * d;
        }
      }
      worst = std::max(worst, std::sqrt(acc) / scale);
      co += plain.block_dims[j];
    }
    ro += plain.block_dims[i];
  }
  return worst;
}

} // namespace ntklab::dynamics

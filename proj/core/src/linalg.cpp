#include "ntklab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ntklab/rng.hpp"

namespace ntklab::linalg {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidInputError("Matrix: data length does not match rows*cols");
  }
  check_finite("Matrix");
}

void Matrix::check_finite(const char* what) const {
  if (!all_finite(data_)) {
    throw InvalidInputError(std::string(what) + ": non-finite entry");
  }
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

SymMatrix::SymMatrix(std::size_t dim, std::vector<double> data)
    : dim_(dim), data_(std::move(data)) {
  if (data_.size() != dim_ * dim_) {
    throw InvalidInputError("SymMatrix: data length does not match dim*dim");
  }
  if (!all_finite(data_)) {
    throw InvalidInputError("SymMatrix: non-finite entry");
  }
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = r + 1; c < dim_; ++c) {
      const double a = data_[r * dim_ + c];
      const double b = data_[c * dim_ + r];
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
        std::ostringstream msg;
        msg << "SymMatrix: entries (" << r << "," << c << ") and (" << c << "," << r
            << ") differ by " << std::abs(a - b);
        throw InvalidInputError(msg.str());
      }
      const double s = 0.5 * (a + b);
      data_[r * dim_ + c] = s;
      data_[c * dim_ + r] = s;
    }
  }
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

double frobenius_norm(const SymMatrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x * x;
  return std::sqrt(s);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw InvalidInputError("matmul: inner dimensions disagree");
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double av = a(r, k);
      if (av == 0.0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += av * b(k, c);
    }
  }
  return out;
}

std::vector<double> matvec(const SymMatrix& m, std::span<const double> v) {
  if (v.size() != m.dim()) {
    throw InvalidInputError("matvec: dimension mismatch");
  }
  std::vector<double> out(m.dim(), 0.0);
  for (std::size_t r = 0; r < m.dim(); ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < m.dim(); ++c) s += m(r, c) * v[c];
    out[r] = s;
  }
  return out;
}

SymMatrix gram(const Matrix& j) {
  if (j.rows() == 0) {
    throw InvalidInputError("gram: matrix must have at least one row");
  }
  j.check_finite("gram");
  SymMatrix out(j.rows());
  for (std::size_t r = 0; r < j.rows(); ++r) {
    for (std::size_t c = r; c < j.rows(); ++c) {
      out.set(r, c, dot(j.row(r), j.row(c)));
    }
  }
  return out;
}

Matrix cross_gram(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw InvalidInputError("cross_gram: column counts disagree");
  }
  Matrix out(a.rows(), b.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < b.rows(); ++c) out(r, c) = dot(a.row(r), b.row(c));
  }
  return out;
}

EigenDecomp sym_eig(const SymMatrix& m) {
  const std::size_t n = m.dim();
  if (n == 0) {
    throw InvalidInputError("sym_eig: dimension must be at least 1");
  }

  // Work on copies: a converges to the diagonal, q accumulates rotations.
  std::vector<double> a(m.data());
  std::vector<double> q(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) s += a[r * n + c] * a[r * n + c];
    }
    return std::sqrt(2.0 * s);
  };

  const double scale = std::max(1.0, frobenius_norm(m));
  const double target = 1e-14 * scale;
  const std::size_t max_sweeps = 64;

  std::size_t sweep = 0;
  for (; sweep < max_sweeps && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t s = p + 1; s < n; ++s) {
        const double apq = a[p * n + s];
        if (apq == 0.0) continue;
        const double app = a[p * n + p];
        const double aqq = a[s * n + s];
        // Stable rotation angle (Golub & Van Loan 8.4).
        const double tau = (aqq - app) / (2.0 * apq);
        double t;
        if (tau >= 0.0) {
          t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
        } else {
          t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + s];
          a[k * n + p] = c * akp - sn * akq;
          a[k * n + s] = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[s * n + k];
          a[p * n + k] = c * apk - sn * aqk;
          a[s * n + k] = sn * apk + c * aqk;
        }
        a[p * n + s] = 0.0;
        a[s * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double qkp = q[k * n + p];
          const double qkq = q[k * n + s];
          q[k * n + p] = c * qkp - sn * qkq;
          q[k * n + s] = sn * qkp + c * qkq;
        }
      }
    }
  }

  const double residual = off_norm();
  if (residual > 1e-10 * scale) {
    std::ostringstream msg;
    msg << "sym_eig: Jacobi sweeps did not converge, off-diagonal norm " << residual;
    throw NumericalError(msg.str());
  }

  // Sort eigenpairs descending; fix each eigenvector's sign so the largest
  // magnitude component is positive (keeps outputs deterministic).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a[x * n + x] > a[y * n + y];
  });

  EigenDecomp out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.eigenvalues[j] = a[src * n + src];
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double mag = std::abs(q[k * n + src]);
      if (mag > best) {
        best = mag;
        arg = k;
      }
    }
    const double sign = q[arg * n + src] < 0.0 ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      out.eigenvectors(k, j) = sign * q[k * n + src];
    }
  }
  return out;
}

MaxEigenpair max_eigenpair(const SymMatrix& m, double tol, std::size_t max_iters) {
  const std::size_t n = m.dim();
  if (n == 0) {
    throw InvalidInputError("max_eigenpair: dimension must be at least 1");
  }
  if (!(tol > 0.0)) {
    throw InvalidInputError("max_eigenpair: tol must be positive");
  }

  const double scale = frobenius_norm(m);
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));

  auto iterate = [&](std::vector<double>& x, std::size_t budget,
                     double& rayleigh_out) -> bool {
    double prev = 0.0;
    for (std::size_t it = 0; it < budget; ++it) {
      std::vector<double> w = matvec(m, x);
      const double rayleigh = dot(std::span<const double>(w), std::span<const double>(x));
      const double wn = norm2(std::span<const double>(w));
      if (wn <= 1e-300 * std::max(1.0, scale)) {
        // x is (numerically) in the kernel; for a PSD matrix that means
        // lambda_max contribution along x is zero.
        rayleigh_out = 0.0;
        return true;
      }
      for (std::size_t i = 0; i < n; ++i) x[i] = w[i] / wn;
      if (it > 0 && std::abs(rayleigh - prev) <= tol * std::max(1.0, std::abs(rayleigh))) {
        rayleigh_out = rayleigh;
        return true;
      }
      prev = rayleigh;
    }
    rayleigh_out = prev;
    return false;
  };

  double lambda = 0.0;
  if (iterate(v, max_iters, lambda)) {
    if (lambda == 0.0 && scale > 0.0) {
      // All-ones start happened to lie in the kernel; retry from a seeded
      // random direction before accepting zero.
      Rng rng(0x5eedULL);
      std::vector<double> r(n);
      for (auto& x : r) x = rng.normal();
      const double rn = norm2(std::span<const double>(r));
      for (auto& x : r) x /= rn;
      double lambda2 = 0.0;
      if (iterate(r, max_iters, lambda2) && lambda2 > lambda) {
        return {lambda2, std::move(r)};
      }
    }
    return {lambda, std::move(v)};
  }

  // Stalled: one restart from a seeded random vector.
  Rng rng(0x9e3779b9ULL);
  std::vector<double> r(n);
  for (auto& x : r) x = rng.normal();
  const double rn = norm2(std::span<const double>(r));
  for (auto& x : r) x /= rn;
  double lambda2 = 0.0;
  if (iterate(r, max_iters, lambda2)) {
    return {lambda2, std::move(r)};
  }

  std::ostringstream msg;
  msg << "max_eigenpair: no convergence after " << max_iters
      << " iterations, last Rayleigh quotient " << lambda2;
  throw NumericalError(msg.str());
}

SymMatrix sym_exp(const SymMatrix& m, double s) {
  if (!std::isfinite(s)) {
    throw InvalidInputError("sym_exp: scale must be finite");
  }
  if (s == 0.0) {
    return SymMatrix::identity(m.dim());
  }
  const EigenDecomp eig = sym_eig(m);
  const std::size_t n = m.dim();
  std::vector<double> ex(n);
  for (std::size_t j = 0; j < n; ++j) ex[j] = std::exp(s * eig.eigenvalues[j]);

  SymMatrix out(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r; c < n; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        acc += eig.eigenvectors(r, j) * ex[j] * eig.eigenvectors(c, j);
      }
      out.set(r, c, acc);
    }
  }
  return out;
}

} // namespace ntklab::linalg

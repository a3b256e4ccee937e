#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ntklab/error.hpp"

namespace ntklab::linalg {

/// Dense row-major matrix of doubles. Entries are checked finite on
/// construction from data.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// Throws InvalidInputError if any entry is NaN or infinite.
  void check_finite(const char* what) const;

  Matrix transposed() const;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Dense symmetric matrix. Construction verifies symmetry to a relative
/// 1e-12 tolerance and finiteness, then stores the symmetrized values.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}
  SymMatrix(std::size_t dim, std::vector<double> data);

  static SymMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  const std::vector<double>& data() const { return data_; }

  /// Sets (r,c) and (c,r) together so the invariant cannot drift.
  void set(std::size_t r, std::size_t c, double v) {
    data_[r * dim_ + c] = v;
    data_[c * dim_ + r] = v;
  }

private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Spectral decomposition M = Q diag(eigenvalues) Q^T with eigenvalues in
/// descending order; column j of eigenvectors pairs with eigenvalues[j].
struct EigenDecomp {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

// Basic dense kernels used throughout the project.

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
double frobenius_norm(const Matrix& m);
double frobenius_norm(const SymMatrix& m);

Matrix matmul(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const SymMatrix& m, std::span<const double> v);

/// J * J^T. Rows of J become the index set of the Gram matrix.
SymMatrix gram(const Matrix& j);

/// Gram matrix of two row sets: A * B^T (general, not symmetric).
Matrix cross_gram(const Matrix& a, const Matrix& b);

/// Full symmetric eigendecomposition by cyclic Jacobi rotations.
/// Deterministic for a fixed input; throws NumericalError if the off-diagonal
/// norm fails to vanish within the sweep budget.
EigenDecomp sym_eig(const SymMatrix& m);

struct MaxEigenpair {
  double lambda = 0.0;
  std::vector<double> vector;
};

inline constexpr double kDefaultPowerTol = 1e-10;
inline constexpr std::size_t kDefaultPowerIters = 10000;

/// Dominant eigenpair of a PSD matrix by power iteration. Starts from the
/// normalized all-ones vector; restarts once from a seeded random vector if
/// the Rayleigh quotient stalls away from convergence. Throws
/// InvalidInputError on dim 0 and NumericalError (with the last Rayleigh
/// quotient in the message) on non-convergence.
MaxEigenpair max_eigenpair(const SymMatrix& m, double tol = kDefaultPowerTol,
                           std::size_t max_iters = kDefaultPowerIters);

/// Q exp(s*Lambda) Q^T. s = 0 yields the exact identity.
SymMatrix sym_exp(const SymMatrix& m, double s);

} // namespace ntklab::linalg

#include <doctest.h>

#include <cmath>

#include "ntklab/linalg.hpp"
#include "oracles.hpp"

using namespace ntklab;
using namespace ntklab::linalg;

namespace {

double frob_diff(const SymMatrix& a, const SymMatrix& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    s += d * d;
  }
  return std::sqrt(s);
}

SymMatrix reconstruct(const EigenDecomp& e) {
  const std::size_t n = e.eigenvalues.size();
  SymMatrix m(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = r; c < n; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        acc += e.eigenvectors(r, j) * e.eigenvalues[j] * e.eigenvectors(c, j);
      }
      m.set(r, c, acc);
    }
  }
  return m;
}

} // namespace

TEST_CASE("matrix construction validates shape and finiteness") {
  CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), InvalidInputError);
  CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::nan("")}), InvalidInputError);
  CHECK_THROWS_AS(SymMatrix(2, {1.0, 2.0, 3.0, 4.0}), InvalidInputError);
  // Near-symmetric input is accepted and symmetrized.
  const SymMatrix m(2, {1.0, 2.0, 2.0 + 1e-15, 4.0});
  CHECK(m(0, 1) == m(1, 0));
}

TEST_CASE("gram hand values") {
  SUBCASE("identity") {
    Matrix j(2, 2, {1.0, 0.0, 0.0, 1.0});
    const SymMatrix g = gram(j);
    CHECK(g(0, 0) == 1.0);
    CHECK(g(0, 1) == 0.0);
    CHECK(g(1, 1) == 1.0);
  }
  SUBCASE("2x2 product") {
    Matrix j(2, 2, {1.0, 2.0, 3.0, 4.0});
    const SymMatrix g = gram(j);
    CHECK(g(0, 0) == 5.0);
    CHECK(g(0, 1) == 11.0);
    CHECK(g(1, 0) == 11.0);
    CHECK(g(1, 1) == 25.0);
  }
  SUBCASE("single row") {
    Matrix j(1, 2, {3.0, 4.0});
    const SymMatrix g = gram(j);
    CHECK(g.dim() == 1);
    CHECK(g(0, 0) == 25.0);
  }
  SUBCASE("zero rows rejected") {
    Matrix j(0, 3);
    CHECK_THROWS_AS(gram(j), InvalidInputError);
  }
}

TEST_CASE("gram of random rectangles is positive semi-definite") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 1 + rng.below(16);
    const std::size_t cols = 1 + rng.below(64);
    Matrix j(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) j(r, c) = rng.normal();
    }
    const SymMatrix g = gram(j);
    const EigenDecomp e = sym_eig(g);
    const double lmax = e.eigenvalues.front();
    CHECK(e.eigenvalues.back() >= -1e-8 * std::max(1.0, lmax));
  }
}

TEST_CASE("sym_eig hand values") {
  SUBCASE("diagonal") {
    const SymMatrix m(2, {3.0, 0.0, 0.0, 1.0});
    const EigenDecomp e = sym_eig(m);
    CHECK(e.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.eigenvectors(0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(e.eigenvectors(1, 1)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("coupled 2x2") {
    const SymMatrix m(2, {2.0, 1.0, 1.0, 2.0});
    const EigenDecomp e = sym_eig(m);
    CHECK(e.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("zero matrix") {
    const SymMatrix m(2);
    const EigenDecomp e = sym_eig(m);
    CHECK(e.eigenvalues[0] == 0.0);
    CHECK(e.eigenvalues[1] == 0.0);
  }
  SUBCASE("dim 0 rejected") { CHECK_THROWS_AS(sym_eig(SymMatrix(0)), InvalidInputError); }
}

TEST_CASE("sym_eig satisfies its reconstruction and orthonormality bounds") {
  Rng rng(7);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 1 + rng.below(24);
    const SymMatrix m = oracles::random_sym(rng, n);
    const EigenDecomp e = sym_eig(m);

    for (std::size_t j = 0; j + 1 < n; ++j) {
      CHECK(e.eigenvalues[j] >= e.eigenvalues[j + 1]);
    }
    const double scale = std::max(1.0, frobenius_norm(m));
    CHECK(frob_diff(reconstruct(e), m) <= 1e-9 * scale);

    double ortho = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          d += e.eigenvectors(i, a) * e.eigenvectors(i, b);
        }
        const double want = a == b ? 1.0 : 0.0;
        ortho += (d - want) * (d - want);
      }
    }
    CHECK(std::sqrt(ortho) <= 1e-9 * static_cast<double>(n));
  }
}

TEST_CASE("sym_eig is deterministic and permutation-consistent") {
  Rng rng(11);
  const SymMatrix m = oracles::random_sym(rng, 6);
  const EigenDecomp a = sym_eig(m);
  const EigenDecomp b = sym_eig(m);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors.data() == b.eigenvectors.data());

  // Conjugating by a permutation leaves the spectrum unchanged and permutes
  // eigenvector entries.
  std::vector<std::size_t> perm = {3, 0, 5, 1, 4, 2};
  SymMatrix pm(6);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 6; ++c) pm(r, c) = m(perm[r], perm[c]);
  }
  const EigenDecomp p = sym_eig(pm);
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(p.eigenvalues[j] == doctest::Approx(a.eigenvalues[j]).epsilon(1e-9));
  }
  // Compare |v| entries to stay sign-agnostic; spectrum here is simple.
  for (std::size_t j = 0; j < 6; ++j) {
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(std::abs(p.eigenvectors(i, j)) ==
            doctest::Approx(std::abs(a.eigenvectors(perm[i], j))).epsilon(1e-7));
    }
  }
}

TEST_CASE("max_eigenpair hand values") {
  SUBCASE("diagonal") {
    const SymMatrix m(2, {2.0, 0.0, 0.0, 1.0});
    const auto [lambda, v] = max_eigenpair(m, 1e-10);
    CHECK(lambda == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(std::abs(v[0]) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(norm2(std::span<const double>(v)) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("coupled") {
    const SymMatrix m(2, {2.0, 1.0, 1.0, 2.0});
    CHECK(max_eigenpair(m).lambda == doctest::Approx(3.0).epsilon(1e-9));
  }
  SUBCASE("scalar") {
    const SymMatrix m(1, {7.0});
    const auto [lambda, v] = max_eigenpair(m);
    CHECK(lambda == doctest::Approx(7.0));
    CHECK(v[0] == doctest::Approx(1.0));
  }
  SUBCASE("dim 0 and bad tol rejected") {
    CHECK_THROWS_AS(max_eigenpair(SymMatrix(0)), InvalidInputError);
    CHECK_THROWS_AS(max_eigenpair(SymMatrix(1, {1.0}), 0.0), InvalidInputError);
  }
  SUBCASE("dominant eigenvector orthogonal to the all-ones start") {
    const SymMatrix m(2, {1.0, -1.0, -1.0, 1.0});
    CHECK(max_eigenpair(m).lambda == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("max_eigenpair agrees with sym_eig on random PSD matrices") {
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 1 + rng.below(64);
    const SymMatrix m = oracles::random_psd(rng, n, n + 4);
    const double top = sym_eig(m).eigenvalues.front();
    const double pow = max_eigenpair(m).lambda;
    CHECK(std::abs(pow - top) <= 1e-8 * std::max(1.0, top));
  }
}

TEST_CASE("sym_exp hand values and series oracle") {
  SUBCASE("s = 0 is the identity") {
    Rng rng(3);
    const SymMatrix m = oracles::random_sym(rng, 5);
    const SymMatrix e = sym_exp(m, 0.0);
    CHECK(frob_diff(e, SymMatrix::identity(5)) == 0.0);
  }
  SUBCASE("diagonal scalars") {
    const SymMatrix m(2, {1.0, 0.0, 0.0, 0.0});
    const SymMatrix e = sym_exp(m, -std::log(2.0));
    CHECK(e(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(e(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("coupled matrix against 30-term series") {
    const SymMatrix m(2, {2.0, 1.0, 1.0, 2.0});
    const SymMatrix fast = sym_exp(m, 1.0);
    const SymMatrix slow = oracles::taylor_expm(m, 1.0);
    CHECK(frob_diff(fast, slow) <= 1e-10 * frobenius_norm(slow));
  }
  SUBCASE("non-finite scale rejected") {
    CHECK_THROWS_AS(sym_exp(SymMatrix(1, {1.0}), std::nan("")), InvalidInputError);
  }
}

TEST_CASE("sym_exp composes: exp(aM) exp(bM) = exp((a+b)M)") {
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 2 + rng.below(8);
    const SymMatrix m = oracles::random_sym(rng, n);
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    const SymMatrix ea = sym_exp(m, a);
    const SymMatrix eb = sym_exp(m, b);
    const SymMatrix eab = sym_exp(m, a + b);

    Matrix pa(n, n, std::vector<double>(ea.data()));
    Matrix pb(n, n, std::vector<double>(eb.data()));
    const Matrix prod = matmul(pa, pb);
    double diff = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) {
        const double d = prod(r, c) - eab(r, c);
        diff += d * d;
      }
    }
    CHECK(std::sqrt(diff) <= 1e-8 * std::max(1.0, frobenius_norm(eab)));
  }
}

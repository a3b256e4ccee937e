#include <doctest.h>

#include <cmath>

#include "ntklab/dynamics.hpp"
#include "oracles.hpp"

using namespace ntklab;
using namespace ntklab::dynamics;

TEST_CASE("predict_training_error") {
  SUBCASE("t = 0 returns the initial outputs") {
    Rng rng(1);
    const linalg::SymMatrix k = oracles::random_psd(rng, 4, 6);
    std::vector<double> y(4), o0(4);
    for (int i = 0; i < 4; ++i) {
      y[i] = rng.normal();
      o0[i] = rng.normal();
    }
    const auto out = predict_training_error(k, y, o0, 0.5, 0.0);
    for (int i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(o0[i]).epsilon(1e-12));
  }
  SUBCASE("long horizon reaches the targets on a positive definite kernel") {
    Rng rng(2);
    const linalg::SymMatrix k = oracles::random_psd(rng, 3, 8); // full rank w.h.p.
    const double lmin = linalg::sym_eig(k).eigenvalues.back();
    REQUIRE(lmin > 1e-6);
    std::vector<double> y = {1.0, -2.0, 0.5};
    std::vector<double> o0 = {0.0, 0.0, 0.0};
    const double eta = 0.7, t = 80.0 / (eta * lmin);
    const auto out = predict_training_error(k, y, o0, eta, t);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(out[i] - y[i]) <= 1e-6);
  }
  SUBCASE("scalar kernel reproduces the closed form 1 - exp(-eta x^2 t)") {
    const double x = 0.9, eta = 0.3, t = 2.5;
    const linalg::SymMatrix k(1, {x * x});
    const auto out = predict_training_error(k, {1.0}, {0.0}, eta, t);
    CHECK(out[0] == doctest::Approx(1.0 - std::exp(-eta * x * x * t)).epsilon(1e-12));
  }
  SUBCASE("dimension mismatch rejected") {
    const linalg::SymMatrix k(2);
    CHECK_THROWS_AS(predict_training_error(k, {1.0}, {0.0, 0.0}, 1.0, 1.0),
                    InvalidInputError);
  }
}

TEST_CASE("eigenbasis_projection") {
  Rng rng(3);
  const linalg::SymMatrix k = oracles::random_psd(rng, 5, 7);
  std::vector<double> y(5), o(5);
  for (int i = 0; i < 5; ++i) {
    y[i] = rng.normal();
    o[i] = rng.normal();
  }

  SUBCASE("zero error projects to zero") {
    const auto p = eigenbasis_projection(k, y, y);
    for (double v : p) CHECK(v == doctest::Approx(0.0));
  }
  SUBCASE("projection is an isometry and reconstructs the error") {
    const auto eig = linalg::sym_eig(k);
    const auto p = eigenbasis_projection(eig, o, y);
    double pn = 0.0, en = 0.0;
    for (int i = 0; i < 5; ++i) {
      pn += p[i] * p[i];
      const double e = o[i] - y[i];
      en += e * e;
    }
    CHECK(std::sqrt(pn) == doctest::Approx(std::sqrt(en)).epsilon(1e-10));

    // Q * p == o - y
    for (int i = 0; i < 5; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 5; ++j) acc += eig.eigenvectors(i, j) * p[j];
      CHECK(acc == doctest::Approx(o[i] - y[i]).epsilon(1e-9));
    }
  }
  SUBCASE("diagonal kernel gives a signed permutation of the error") {
    const linalg::SymMatrix d(3, {3.0, 0, 0, 0, 1.0, 0, 0, 0, 2.0});
    const auto p = eigenbasis_projection(d, {1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
    // Descending eigenvalues 3, 2, 1 select components 0, 2, 1.
    CHECK(std::abs(p[0]) == doctest::Approx(1.0));
    CHECK(std::abs(p[1]) == doctest::Approx(3.0));
    CHECK(std::abs(p[2]) == doctest::Approx(2.0));
  }
}

TEST_CASE("fit_decay") {
  SUBCASE("exact single exponential") {
    std::vector<double> times;
    std::vector<std::vector<double>> proj;
    for (int s = 0; s <= 20; ++s) {
      const double t = 0.1 * s;
      times.push_back(t);
      proj.push_back({std::exp(-2.0 * t)});
    }
    const DecayReport rep = fit_decay(times, proj, {2.0}, 1.0);
    REQUIRE(rep.included[0]);
    CHECK(rep.fitted_rates[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(rep.r_squared[0] == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("two synthetic components") {
    std::vector<double> times;
    std::vector<std::vector<double>> proj;
    for (int s = 0; s <= 30; ++s) {
      const double t = 0.05 * s;
      times.push_back(t);
      proj.push_back({0.8 * std::exp(-1.0 * t), -1.2 * std::exp(-5.0 * t)});
    }
    const DecayReport rep = fit_decay(times, proj, {5.0, 1.0}, 1.0);
    CHECK(rep.fitted_rates[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.fitted_rates[1] == doctest::Approx(5.0).epsilon(1e-9));
  }
  SUBCASE("constant series fits rate zero with a flagged r^2") {
    std::vector<double> times;
    std::vector<std::vector<double>> proj;
    for (int s = 0; s < 10; ++s) {
      times.push_back(0.5 * s);
      proj.push_back({0.7});
    }
    const DecayReport rep = fit_decay(times, proj, {1.0}, 1.0);
    REQUIRE(rep.included[0]);
    CHECK(rep.fitted_rates[0] == doctest::Approx(0.0));
    CHECK(rep.r_squared[0] == 0.0); // no decay to explain
  }
  SUBCASE("tiny initial projections are excluded") {
    std::vector<double> times = {0, 1, 2, 3, 4};
    std::vector<std::vector<double>> proj(5, std::vector<double>{1e-12});
    const DecayReport rep = fit_decay(times, proj, {1.0}, 1.0);
    CHECK(!rep.included[0]);
  }
  SUBCASE("series truncate once they fall under the magnitude floor") {
    std::vector<double> times;
    std::vector<std::vector<double>> proj;
    for (int s = 0; s <= 40; ++s) {
      times.push_back(s * 1.0);
      proj.push_back({std::exp(-1.5 * s)});
    }
    // exp(-1.5*16) < 1e-10: later samples must not pollute the fit.
    const DecayReport rep = fit_decay(times, proj, {1.5}, 1.0);
    REQUIRE(rep.included[0]);
    CHECK(rep.fitted_rates[0] == doctest::Approx(1.5).epsilon(1e-9));
  }
  SUBCASE("too few samples rejected") {
    CHECK_THROWS_AS(fit_decay({0, 1}, {{1.0}, {0.5}}, {1.0}, 1.0), InvalidInputError);
  }
}

TEST_CASE("verify_weighted_ntk agreement between the two constructions") {
  SUBCASE("unit weights agree to rounding") {
    auto [model, batch] = oracles::random_net_and_batch(301, 500, 2, 1);
    const double dev = verify_weighted_ntk(model, batch, {1.0, 1.0},
                                           ntk::Granularity::per_sample());
    CHECK(dev <= 1e-12);
  }
  SUBCASE("generic weights stay within the contract") {
    for (std::uint64_t seed : {311ULL, 312ULL, 313ULL}) {
      auto [model, batch] = oracles::random_net_and_batch(seed, 500, 2, 2);
      const double dev = verify_weighted_ntk(model, batch, {2.0, 3.0},
                                             ntk::Granularity::per_minibatch(2));
      CHECK(dev <= 1e-10);
    }
  }
  SUBCASE("a zero weight annihilates the task's blocks in both constructions") {
    auto [model, batch] = oracles::random_net_and_batch(321, 500, 2, 1);
    const ntk::ExtendedNtk plain =
        ntk::extended_ntk(model, batch, ntk::Granularity::per_sample());
    const linalg::SymMatrix scaled = scale_blocks(plain, {0.0, 1.0});
    const std::size_t d0 = plain.block_dims[0];
    for (std::size_t r = 0; r < d0; ++r) {
      for (std::size_t c = 0; c < scaled.dim(); ++c) {
        CHECK(scaled(r, c) == 0.0);
        CHECK(scaled(c, r) == 0.0);
      }
    }
    CHECK(verify_weighted_ntk(model, batch, {0.0, 1.0},
                              ntk::Granularity::per_sample()) <= 1e-12);
  }
}

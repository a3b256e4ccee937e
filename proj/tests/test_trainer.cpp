#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "ntklab/bench.hpp"
#include "ntklab/trainer.hpp"
#include "oracles.hpp"

using namespace ntklab;
using namespace ntklab::trainer;

namespace {

// Noiseless realizable linear regression: y = a.x + b over one task.
Dataset linear_dataset(std::size_t samples, std::uint64_t seed) {
  Rng rng(seed);
  const std::vector<double> a = {0.7, -0.3};
  const double b = 0.2;
  Dataset ds;
  auto fill = [&](TaskData& split, std::size_t count) {
    split.targets.resize(1);
    for (std::size_t s = 0; s < count; ++s) {
      std::vector<double> x = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
      const double y = a[0] * x[0] + a[1] * x[1] + b;
      split.inputs.push_back(x);
      split.targets[0].push_back({y});
    }
  };
  fill(ds.train, samples);
  fill(ds.eval, samples / 4);
  return ds;
}

TrainConfig linear_config() {
  TrainConfig cfg;
  cfg.net_spec.input_dim = 2;
  cfg.net_spec.trunk = {};
  cfg.net_spec.repr_dim = 2;
  cfg.net_spec.heads = {net::HeadSpec{{}, 1}};
  cfg.net_spec.seed = 3;
  cfg.strategy = weighting::StrategyKind::ls();
  cfg.lr = 0.1;
  cfg.iterations = 2000;
  cfg.batch_size = 32;
  cfg.record_every = 100;
  cfg.eig_record_every = 500;
  cfg.seed = 3;
  return cfg;
}

} // namespace

TEST_CASE("train rejects invalid configurations") {
  TrainConfig cfg = linear_config();
  Dataset ds = linear_dataset(64, 1);
  cfg.lr = 0.0;
  CHECK_THROWS_AS(train(cfg, ds), InvalidInputError);
  cfg = linear_config();
  cfg.iterations = 0;
  CHECK_THROWS_AS(train(cfg, ds), InvalidInputError);
  cfg = linear_config();
  Dataset wrong = ds;
  wrong.train.targets.push_back(wrong.train.targets[0]);
  CHECK_THROWS_AS(train(cfg, wrong), InvalidInputError);
}

TEST_CASE("train is bitwise reproducible for a fixed config and dataset") {
  const TrainConfig cfg = linear_config();
  const Dataset ds = linear_dataset(64, 2);
  const RunRecord a = train(cfg, ds);
  const RunRecord b = train(cfg, ds);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].iteration == b.rows[i].iteration);
    CHECK(a.rows[i].losses == b.rows[i].losses);
    CHECK(a.rows[i].omegas == b.rows[i].omegas);
    CHECK(a.rows[i].lambdas == b.rows[i].lambdas);
  }
  CHECK(a.final_metrics == b.final_metrics);
}

TEST_CASE("ls on a realizable linear task converges to the least-squares optimum") {
  const TrainConfig cfg = linear_config();
  const Dataset ds = linear_dataset(64, 3);
  const RunRecord rec = train(cfg, ds);
  REQUIRE(rec.valid);
  REQUIRE(!rec.rows.empty());
  // The data is exactly representable, so the attainable minimum is 0.
  CHECK(rec.rows.back().losses[0] < 1e-6);
  CHECK(rec.final_metrics[0] < 1e-6);
}

TEST_CASE("train with ls and one task reduces to a minimal sgd loop, bitwise") {
  TrainConfig cfg = linear_config();
  cfg.iterations = 57;
  cfg.batch_size = 16;
  const Dataset ds = linear_dataset(48, 4);
  const RunRecord rec = train(cfg, ds);

  // Independent re-implementation of the same loop.
  net::MtlNet model = net::init(cfg.net_spec);
  std::vector<std::size_t> order(ds.train.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = ds.train.size();
  std::size_t epoch = 0;
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    if (cursor + cfg.batch_size > ds.train.size()) {
      Rng shuffle_rng(derive_seed(cfg.seed, 0x1000 + epoch));
      deterministic_shuffle(order, shuffle_rng);
      cursor = 0;
      ++epoch;
    }
    std::vector<std::vector<double>> in;
    std::vector<std::vector<double>> tg;
    for (std::size_t i = 0; i < cfg.batch_size; ++i) {
      in.push_back(ds.train.inputs[order[cursor + i]]);
      tg.push_back(ds.train.targets[0][order[cursor + i]]);
    }
    cursor += cfg.batch_size;
    net::TaskBatch batch(in, {tg}, 1);
    const auto g = model.grad_weighted(batch, {1.0});
    for (std::size_t i = 0; i < model.theta_size(); ++i) {
      model.theta()[i] -= cfg.lr * g.shared[i];
    }
    auto& hp = model.head_params(0);
    for (std::size_t i = 0; i < hp.size(); ++i) hp[i] -= cfg.lr * g.heads[0][i];
  }
  const net::TaskBatch eval(ds.eval.inputs, ds.eval.targets, 1);
  const auto tr = model.forward(eval.inputs);
  CHECK(rec.final_metrics[0] == model.task_loss(tr, eval, 0));
}

TEST_CASE("rows are logged on both cadences with diagnostics attached") {
  TrainConfig cfg = linear_config();
  cfg.iterations = 50;
  cfg.record_every = 7;
  cfg.eig_record_every = 10;
  const Dataset ds = linear_dataset(64, 5);
  const RunRecord rec = train(cfg, ds);
  for (const RunRow& row : rec.rows) {
    const bool on_record = row.iteration % 7 == 0;
    const bool on_eig = row.iteration % 10 == 0;
    CHECK((on_record || on_eig));
    REQUIRE(row.lambdas.size() == 1);
    CHECK(std::isfinite(row.lambdas[0]));
  }
  // Every eig tick up to the horizon shows up as a row.
  std::size_t eig_rows = 0;
  for (const RunRow& row : rec.rows) {
    if (row.iteration % 10 == 0) ++eig_rows;
  }
  CHECK(eig_rows == 5);
}

TEST_CASE("poisoned run aborts with a partial, invalid record") {
  TrainConfig cfg = linear_config();
  cfg.lr = 1e6; // blows the quadratic up within a few steps
  cfg.iterations = 500;
  cfg.record_every = 1;
  const Dataset ds = linear_dataset(64, 6);
  const RunRecord rec = train(cfg, ds);
  CHECK(!rec.valid);
  CHECK(!rec.abort_reason.empty());
  CHECK(rec.rows.size() < 500);
}

TEST_CASE("gradient_flow") {
  SUBCASE("equilibrium start stays constant") {
    net::NetSpec spec;
    spec.input_dim = 1;
    spec.trunk = {4};
    spec.repr_dim = 4;
    spec.heads = {net::HeadSpec{{}, 1}};
    spec.seed = 7;
    net::MtlNet model = net::init(spec);
    TaskData data;
    data.inputs = {{0.5}, {-0.5}};
    const auto tr = model.forward(data.inputs);
    data.targets = {tr.outputs[0]};

    const FlowTrajectory traj = gradient_flow(model, data, 1.0, 1.0, 0.01, 10);
    for (const auto& o : traj.outputs) {
      for (std::size_t i = 0; i < o.size(); ++i) {
        CHECK(o[i] == doctest::Approx(traj.outputs[0][i]).epsilon(1e-12));
      }
    }
  }
  SUBCASE("scalar linear model matches the closed-form solution") {
    // f = theta * x on one sample, summed half-quadratic loss, eta = 1:
    // O(t) = y (1 - exp(-x^2 t)) from O(0) = 0.
    net::NetSpec spec;
    spec.input_dim = 1;
    spec.trunk = {1};
    spec.repr_dim = 1;
    spec.heads = {net::HeadSpec{{}, 1}};
    spec.activation = net::Activation::relu;
    spec.use_bias = false; // theta is the single weight of f = theta * x
    net::MtlNet model(spec);
    // relu is inactive at exactly 0, so start infinitesimally positive to
    // sit on the active branch where f = theta * x exactly.
    model.theta() = {1e-12};
    model.head_params(0) = {1.0};

    const double x = 0.8, y = 1.5;
    TaskData data;
    data.inputs = {{x}};
    data.targets = {{{y}}};

    const FlowTrajectory traj = gradient_flow(model, data, 1.0, 3.0, 1e-4, 30);
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
      const double t = traj.times[s];
      const double expect = y * (1.0 - std::exp(-x * x * t));
      CHECK(std::abs(traj.outputs[s][0] - expect) <= 1e-4 * std::max(1.0, expect));
    }
  }
  SUBCASE("halving dt passes a first-order Richardson check") {
    net::NetSpec spec;
    spec.input_dim = 2;
    spec.trunk = {8};
    spec.repr_dim = 8;
    spec.heads = {net::HeadSpec{{}, 1}};
    spec.seed = 8;
    TaskData data;
    Rng rng(9);
    data.targets.resize(1);
    for (int s = 0; s < 6; ++s) {
      data.inputs.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
      data.targets[0].push_back({rng.uniform(-1, 1)});
    }

    net::MtlNet m1 = net::init(spec);
    net::MtlNet m2 = net::init(spec);
    const FlowTrajectory c1 = gradient_flow(m1, data, 1.0, 1.0, 0.02, 1);
    const FlowTrajectory c2 = gradient_flow(m2, data, 1.0, 1.0, 0.01, 1);

    net::MtlNet m3 = net::init(spec);
    const FlowTrajectory fine = gradient_flow(m3, data, 1.0, 1.0, 0.0005, 1);

    double e1 = 0.0, e2 = 0.0;
    for (std::size_t i = 0; i < fine.outputs.back().size(); ++i) {
      e1 += std::abs(c1.outputs.back()[i] - fine.outputs.back()[i]);
      e2 += std::abs(c2.outputs.back()[i] - fine.outputs.back()[i]);
    }
    // Explicit Euler is first order: halving dt should roughly halve the
    // endpoint error; allow generous slack.
    CHECK(e2 <= 0.75 * e1);
  }
  SUBCASE("loss is non-increasing for small steps") {
    net::NetSpec spec;
    spec.input_dim = 2;
    spec.trunk = {8};
    spec.repr_dim = 8;
    spec.heads = {net::HeadSpec{{}, 1}, net::HeadSpec{{}, 1}};
    spec.seed = 10;
    net::MtlNet model = net::init(spec);
    TaskData data;
    Rng rng(10);
    data.targets.resize(2);
    for (int s = 0; s < 5; ++s) {
      data.inputs.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
      data.targets[0].push_back({rng.uniform(-1, 1)});
      data.targets[1].push_back({rng.uniform(-1, 1)});
    }
    const FlowTrajectory traj = gradient_flow(model, data, 1.0, 0.5, 1e-4, 40);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& o : traj.outputs) {
      double loss = 0.0;
      for (std::size_t i = 0; i < o.size(); ++i) {
        const double d = o[i] - traj.stacked_targets[i];
        loss += 0.5 * d * d;
      }
      CHECK(loss <= prev * (1.0 + 1e-9));
      prev = loss;
    }
  }
  SUBCASE("precondition dt <= eta enforced and divergence detected") {
    net::NetSpec spec;
    spec.input_dim = 1;
    spec.trunk = {2};
    spec.repr_dim = 2;
    spec.heads = {net::HeadSpec{{}, 1}};
    net::MtlNet model = net::init(spec);
    TaskData data;
    data.inputs = {{1.0}};
    data.targets = {{{1.0}}};
    CHECK_THROWS_AS(gradient_flow(model, data, 1e-3, 1.0, 1e-2, 5), InvalidInputError);
  }
}

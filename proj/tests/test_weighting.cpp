#include <doctest.h>

#include <cmath>

#include "ntklab/weighting.hpp"
#include "oracles.hpp"

using namespace ntklab;
using namespace ntklab::weighting;

namespace {

net::MtlNet twin_head_net(std::uint64_t seed) {
  net::NetSpec spec;
  spec.input_dim = 2;
  spec.trunk = {6};
  spec.repr_dim = 6;
  spec.heads = {net::HeadSpec{{}, 1}, net::HeadSpec{{}, 1}};
  spec.seed = seed;
  return net::init(spec);
}

net::TaskBatch twin_batch() {
  std::vector<std::vector<double>> in = {{0.2, -0.5}, {0.8, 0.1}, {-0.3, 0.7}, {0.5, 0.5}};
  std::vector<std::vector<double>> y = {{0.3}, {-0.6}, {0.2}, {0.9}};
  return net::TaskBatch(in, {y, y}, 1);
}

} // namespace

TEST_CASE("strategy parameter validation") {
  CHECK_THROWS_AS(StrategyKind::dwa(0.0).validate(), InvalidInputError);
  CHECK_THROWS_AS(StrategyKind::ntkmtl(0).validate(), InvalidInputError);
  StrategyKind bad = StrategyKind::ls();
  bad.ema = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInputError);
  CHECK(strategy_from_string("ntkmtl_sr").has_value());
  CHECK(!strategy_from_string("mgda").has_value());
}

TEST_CASE("baseline weight formulas") {
  net::MtlNet model = twin_head_net(1);
  net::TaskBatch batch = twin_batch();

  SUBCASE("ls is all ones") {
    WeightState state(StrategyKind::ls(), 9);
    const auto d = state.compute_weights(model, batch, {3.0, 0.25});
    CHECK(d.mode == UpdateMode::weighted_loss_backprop);
    CHECK(d.omegas == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("si is the reciprocal loss") {
    WeightState state(StrategyKind::si(), 9);
    const auto d = state.compute_weights(model, batch, {2.0, 0.5});
    CHECK(d.omegas[0] == doctest::Approx(0.5));
    CHECK(d.omegas[1] == doctest::Approx(2.0));
  }
  SUBCASE("rlw sums to k and is reproducible per seed") {
    WeightState s1(StrategyKind::rlw(), 33);
    WeightState s2(StrategyKind::rlw(), 33);
    const auto d1 = s1.compute_weights(model, batch, {1.0, 1.0});
    const auto d2 = s2.compute_weights(model, batch, {1.0, 1.0});
    CHECK(d1.omegas == d2.omegas);
    CHECK(d1.omegas[0] + d1.omegas[1] == doctest::Approx(2.0).epsilon(1e-12));
    for (double w : d1.omegas) CHECK(w > 0.0);

    WeightState s3(StrategyKind::rlw(), 34);
    const auto d3 = s3.compute_weights(model, batch, {1.0, 1.0});
    CHECK(d1.omegas != d3.omegas);
  }
  SUBCASE("dwa warms up with ones then follows loss ratios") {
    WeightState state(StrategyKind::dwa(2.0), 9);
    const auto d0 = state.compute_weights(model, batch, {4.0, 1.0});
    const auto d1 = state.compute_weights(model, batch, {2.0, 1.0});
    CHECK(d0.omegas == std::vector<double>{1.0, 1.0});
    CHECK(d1.omegas == std::vector<double>{1.0, 1.0});
    // r = l(t-1)/l(t-2) = [0.5, 1]; colder task gets the larger weight.
    const auto d2 = state.compute_weights(model, batch, {1.5, 1.0});
    CHECK(d2.omegas[0] + d2.omegas[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d2.omegas[0] < d2.omegas[1]);
    const double r0 = std::exp(0.5 / 2.0), r1 = std::exp(1.0 / 2.0);
    CHECK(d2.omegas[0] == doctest::Approx(2.0 * r0 / (r0 + r1)).epsilon(1e-12));
  }
  SUBCASE("nan loss poisons the run") {
    WeightState state(StrategyKind::ls(), 9);
    CHECK_THROWS_AS(state.compute_weights(model, batch, {1.0, std::nan("")}),
                    PoisonedRunError);
  }
}

TEST_CASE("ntkmtl weights") {
  SUBCASE("identical duplicated tasks get unit weights") {
    net::MtlNet model = twin_head_net(2);
    model.head_params(1) = model.head_params(0);
    net::TaskBatch batch = twin_batch();
    WeightState state(StrategyKind::ntkmtl(1), 9);
    const auto tr = model.forward(batch.inputs);
    const auto d = state.compute_weights(model, batch, model.task_losses(tr, batch));
    CHECK(d.mode == UpdateMode::weighted_gradient_sum);
    CHECK(d.omegas[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.omegas[1] == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(d.shared_grads.has_value());
    CHECK((*d.shared_grads)[0] == (*d.shared_grads)[1]);
  }
  SUBCASE("weights are strictly positive and finite") {
    auto [model, batch] = oracles::random_net_and_batch(207, 500, 3, 2);
    WeightState state(StrategyKind::ntkmtl(2), 11);
    const auto tr = model.forward(batch.inputs);
    const auto d = state.compute_weights(model, batch, model.task_losses(tr, batch));
    for (double w : d.omegas) {
      CHECK(w > 0.0);
      CHECK(std::isfinite(w));
    }
    REQUIRE(d.summary.has_value());
  }
  SUBCASE("uniform loss rescaling leaves the weights unchanged") {
    net::MtlNet model = twin_head_net(3);
    net::TaskBatch batch = twin_batch();
    const auto tr = model.forward(batch.inputs);

    WeightState s1(StrategyKind::ntkmtl(1), 9);
    const auto d1 = s1.compute_weights(model, batch, model.task_losses(tr, batch));

    // Scale every task's loss by c via the final head layers and targets.
    const double c = 5.0;
    const double s = std::sqrt(c);
    for (std::size_t t = 0; t < 2; ++t) {
      for (double& v : model.head_params(t)) v *= s;
      for (auto& y : batch.targets[t]) {
        for (double& vv : y) vv *= s;
      }
    }
    const auto tr2 = model.forward(batch.inputs);
    WeightState s2(StrategyKind::ntkmtl(1), 9);
    const auto d2 = s2.compute_weights(model, batch, model.task_losses(tr2, batch));
    for (std::size_t t = 0; t < 2; ++t) {
      CHECK(d2.omegas[t] == doctest::Approx(d1.omegas[t]).epsilon(1e-8));
    }
  }
}

TEST_CASE("ntkmtl_sr emits loss-backprop directives with positive weights") {
  auto [model, batch] = oracles::random_net_and_batch(217, 500, 3, 4);
  WeightState state(StrategyKind::ntkmtl_sr(4), 11);
  const auto tr = model.forward(batch.inputs);
  const auto d = state.compute_weights(model, batch, model.task_losses(tr, batch));
  CHECK(d.mode == UpdateMode::weighted_loss_backprop);
  for (double w : d.omegas) CHECK(w > 0.0);
  CHECK(state.last_summary().has_value());
}

TEST_CASE("apply_update") {
  SUBCASE("unit weights in gradient-sum mode equal plain summed descent, bitwise") {
    net::MtlNet model = twin_head_net(4);
    net::TaskBatch batch = twin_batch();
    net::MtlNet manual = model;

    UpdateDirective d;
    d.mode = UpdateMode::weighted_gradient_sum;
    d.omegas = {1.0, 1.0};
    apply_update(d, model, batch, 0.05);

    // Manual summed-gradient step with the same task order.
    std::vector<double> step(manual.theta_size(), 0.0);
    for (std::size_t t = 0; t < 2; ++t) {
      const auto g = manual.grad_shared(batch, t);
      for (std::size_t i = 0; i < step.size(); ++i) step[i] += 1.0 * g[i];
    }
    for (std::size_t i = 0; i < step.size(); ++i) manual.theta()[i] -= 0.05 * step[i];
    for (std::size_t t = 0; t < 2; ++t) {
      const auto gh = manual.grad_head(batch, t);
      auto& hp = manual.head_params(t);
      for (std::size_t i = 0; i < hp.size(); ++i) hp[i] -= 0.05 * gh[i];
    }
    CHECK(model.theta() == manual.theta());
    CHECK(model.head_params(0) == manual.head_params(0));
    CHECK(model.head_params(1) == manual.head_params(1));
  }
  SUBCASE("zero gradients leave parameters unchanged") {
    net::MtlNet model = twin_head_net(5);
    // Fit targets exactly: use the model's own outputs as targets.
    std::vector<std::vector<double>> in = {{0.1, 0.2}, {0.3, -0.1}};
    const auto tr = model.forward(in);
    net::TaskBatch batch(in, {tr.outputs[0], tr.outputs[1]}, 1);
    const auto before_theta = model.theta();
    UpdateDirective d;
    d.mode = UpdateMode::weighted_loss_backprop;
    d.omegas = {1.0, 1.0};
    apply_update(d, model, batch, 0.1);
    CHECK(model.theta() == before_theta);
  }
  SUBCASE("omega [2, 0] doubles the first task's direction") {
    net::MtlNet model = twin_head_net(6);
    net::TaskBatch batch = twin_batch();
    const auto theta0 = model.theta();
    const auto g0 = model.grad_shared(batch, 0);

    UpdateDirective d;
    d.mode = UpdateMode::weighted_gradient_sum;
    d.omegas = {2.0, 0.0};
    apply_update(d, model, batch, 0.1);
    for (std::size_t i = 0; i < theta0.size(); ++i) {
      CHECK(model.theta()[i] == doctest::Approx(theta0[i] - 0.1 * 2.0 * g0[i]).epsilon(1e-12));
    }
  }
  SUBCASE("non-positive learning rate rejected") {
    net::MtlNet model = twin_head_net(7);
    net::TaskBatch batch = twin_batch();
    UpdateDirective d;
    d.omegas = {1.0, 1.0};
    CHECK_THROWS_AS(apply_update(d, model, batch, 0.0), InvalidInputError);
  }
  SUBCASE("weighted_loss_backprop equals a hand-weighted gradient step") {
    net::MtlNet model = twin_head_net(8);
    net::TaskBatch batch = twin_batch();
    net::MtlNet manual = model;
    const std::vector<double> omegas = {0.7, 1.9};

    UpdateDirective d;
    d.mode = UpdateMode::weighted_loss_backprop;
    d.omegas = omegas;
    apply_update(d, model, batch, 0.05);

    std::vector<double> step(manual.theta_size(), 0.0);
    for (std::size_t t = 0; t < 2; ++t) {
      const auto g = manual.grad_shared(batch, t);
      for (std::size_t i = 0; i < step.size(); ++i) step[i] += omegas[t] * g[i];
    }
    for (std::size_t i = 0; i < step.size(); ++i) {
      CHECK(model.theta()[i] ==
            doctest::Approx(manual.theta()[i] - 0.05 * step[i]).epsilon(1e-10));
    }
    for (std::size_t t = 0; t < 2; ++t) {
      const auto gh = manual.grad_head(batch, t);
      for (std::size_t i = 0; i < gh.size(); ++i) {
        CHECK(model.head_params(t)[i] ==
              doctest::Approx(manual.head_params(t)[i] - 0.05 * omegas[t] * gh[i])
                  .epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("si update direction is invariant to rescaling one task's loss") {
  net::MtlNet model = twin_head_net(10);
  net::TaskBatch batch = twin_batch();

  auto si_direction = [](const net::MtlNet& m, const net::TaskBatch& b) {
    const auto tr = m.forward(b.inputs);
    std::vector<double> dir(m.theta_size(), 0.0);
    for (std::size_t t = 0; t < m.task_count(); ++t) {
      const double loss = m.task_loss(tr, b, t);
      const auto g = m.grad_shared(b, t);
      for (std::size_t i = 0; i < dir.size(); ++i) dir[i] += g[i] / std::max(loss, 1e-12);
    }
    return dir;
  };

  const std::vector<double> base = si_direction(model, batch);

  // Scale task 0's loss by 9 (outputs and targets by 3).
  for (double& v : model.head_params(0)) v *= 3.0;
  for (auto& y : batch.targets[0]) {
    for (double& v : y) v *= 3.0;
  }
  const std::vector<double> scaled = si_direction(model, batch);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(scaled[i] == doctest::Approx(base[i]).epsilon(1e-9));
  }
}

TEST_CASE("optional weight smoothing blends consecutive weights") {
  net::MtlNet model = twin_head_net(11);
  net::TaskBatch batch = twin_batch();
  StrategyKind kind = StrategyKind::si();
  kind.ema = 0.5;
  WeightState state(kind, 9);
  const auto d1 = state.compute_weights(model, batch, {2.0, 0.5});
  CHECK(d1.omegas[0] == doctest::Approx(0.5));
  const auto d2 = state.compute_weights(model, batch, {1.0, 1.0});
  // 0.5 * previous + 0.5 * new
  CHECK(d2.omegas[0] == doctest::Approx(0.5 * 0.5 + 0.5 * 1.0));
  CHECK(d2.omegas[1] == doctest::Approx(0.5 * 2.0 + 0.5 * 1.0));
}

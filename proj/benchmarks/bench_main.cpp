#include <benchmark/benchmark.h>

#include "ntklab/bench.hpp"
#include "ntklab/ntk.hpp"
#include "ntklab/trainer.hpp"

using namespace ntklab;

namespace {

linalg::SymMatrix make_psd(std::size_t dim) {
  Rng rng(dim);
  linalg::Matrix j(dim, dim + 8);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim + 8; ++c) j(r, c) = rng.normal();
  }
  return linalg::gram(j);
}

struct TrainSetup {
  trainer::TrainConfig cfg;
  trainer::Dataset data;
};

TrainSetup make_train_setup(weighting::StrategyKind strategy, std::size_t iterations) {
  bench::SynthSpec spec = bench::default_multifreq(1);
  spec.samples = 256;
  spec.eval_samples = 16;

  TrainSetup setup;
  setup.cfg.net_spec.input_dim = 2;
  setup.cfg.net_spec.trunk = {128};
  setup.cfg.net_spec.repr_dim = 128;
  setup.cfg.net_spec.heads.assign(3, net::HeadSpec{{}, 1});
  setup.cfg.net_spec.seed = 1;
  setup.cfg.strategy = strategy;
  setup.cfg.lr = 0.05;
  setup.cfg.iterations = iterations;
  setup.cfg.batch_size = 64;
  setup.cfg.record_every = iterations;
  setup.cfg.eig_record_every = iterations;
  setup.cfg.seed = 1;
  setup.data = bench::generate(spec);
  return setup;
}

} // namespace

static void BM_SymEig(benchmark::State& state) {
  const linalg::SymMatrix m = make_psd(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::sym_eig(m));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SymEig)->RangeMultiplier(2)->Range(4, 64)->Complexity();

static void BM_MaxEigenpair(benchmark::State& state) {
  const linalg::SymMatrix m = make_psd(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::max_eigenpair(m));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MaxEigenpair)->RangeMultiplier(2)->Range(4, 64)->Complexity();

static void BM_SymExp(benchmark::State& state) {
  const linalg::SymMatrix m = make_psd(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(linalg::sym_exp(m, -0.5));
  }
}
BENCHMARK(BM_SymExp)->Arg(8)->Arg(32);

static void BM_TaskNtk(benchmark::State& state) {
  bench::SynthSpec spec = bench::default_multifreq(1);
  spec.samples = 64;
  spec.eval_samples = 8;
  const trainer::Dataset ds = bench::generate(spec);
  net::NetSpec nspec;
  nspec.input_dim = 2;
  nspec.trunk = {128};
  nspec.repr_dim = 128;
  nspec.heads.assign(3, net::HeadSpec{{}, 1});
  nspec.seed = 1;
  const net::MtlNet model = net::init(nspec);
  const net::TaskBatch batch(ds.train.inputs, ds.train.targets,
                             static_cast<std::size_t>(state.range(0)));
  const auto gran = ntk::Granularity::per_minibatch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ntk::task_ntk(model, batch, 2, gran));
  }
}
BENCHMARK(BM_TaskNtk)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

static void BM_SrTaskNtk(benchmark::State& state) {
  bench::SynthSpec spec = bench::default_multifreq(1);
  spec.samples = 64;
  spec.eval_samples = 8;
  const trainer::Dataset ds = bench::generate(spec);
  net::NetSpec nspec;
  nspec.input_dim = 2;
  nspec.trunk = {128};
  nspec.repr_dim = 128;
  nspec.heads.assign(3, net::HeadSpec{{}, 1});
  nspec.seed = 1;
  const net::MtlNet model = net::init(nspec);
  const net::TaskBatch batch(ds.train.inputs, ds.train.targets,
                             static_cast<std::size_t>(state.range(0)));
  const auto gran = ntk::Granularity::per_minibatch(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(ntk::sr_task_ntk(model, batch, 2, gran));
  }
}
BENCHMARK(BM_SrTaskNtk)->Arg(1)->Arg(2)->Arg(4)->Arg(8);

static void BM_TrainIterations(benchmark::State& state) {
  weighting::StrategyKind strategy;
  switch (state.range(0)) {
    case 0: strategy = weighting::StrategyKind::ls(); break;
    case 1: strategy = weighting::StrategyKind::ntkmtl(1); break;
    default: strategy = weighting::StrategyKind::ntkmtl_sr(4); break;
  }
  TrainSetup setup = make_train_setup(strategy, 50);
  for (auto _ : state) {
    benchmark::DoNotOptimize(trainer::train(setup.cfg, setup.data));
  }
  state.SetLabel(weighting::to_string(strategy.strategy));
}
BENCHMARK(BM_TrainIterations)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "spotfit/batch_engine.hpp"
#include "spotfit/initializer.hpp"
#include "spotfit/lm_solver.hpp"
#include "spotfit/simulator.hpp"

namespace {

struct Fixture {
  spotfit::SimulatedBatch data;
  std::vector<spotfit::InitialEstimate> inits;
};

Fixture make_fixture(int size, std::size_t count) {
  spotfit::SimConfig sim;
  sim.size = size;
  sim.count = count;
  sim.seed = 3;
  Fixture f{spotfit::simulate_batch(sim), {}};
  f.inits = spotfit::estimate_batch(f.data.images, spotfit::FitConfig{}.bounds_for(sim.grid()));
  return f;
}

constexpr std::size_t kPool = 256;

void BM_FitSingle(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), kPool);
  const spotfit::FitConfig config;
  std::size_t i = 0;
  for (auto _ : state) {
    auto r = spotfit::fit_single(f.data.images[i], f.inits[i].shape, config);
    benchmark::DoNotOptimize(r);
    i = (i + 1) % kPool;
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_FitExplicit5(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), kPool);
  const spotfit::FitConfig config;
  std::size_t i = 0;
  for (auto _ : state) {
    auto r = spotfit::fit_explicit5(f.data.images[i], f.inits[i].shape, f.inits[i].amps, config);
    benchmark::DoNotOptimize(r);
    i = (i + 1) % kPool;
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_EvaluateModel(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), kPool);
  std::size_t i = 0;
  for (auto _ : state) {
    auto ev = spotfit::evaluate_model(f.data.images[i], f.inits[i].shape);
    benchmark::DoNotOptimize(ev);
    i = (i + 1) % kPool;
  }
  state.SetItemsProcessed(state.iterations());
}

void BM_EstimateInitial(benchmark::State& state) {
  const Fixture f = make_fixture(static_cast<int>(state.range(0)), kPool);
  const auto bounds = spotfit::FitConfig{}.bounds_for(f.data.images.grid());
  std::size_t i = 0;
  for (auto _ : state) {
    auto e = spotfit::estimate_initial(f.data.images[i], bounds);
    benchmark::DoNotOptimize(e);
    i = (i + 1) % kPool;
  }
}

void BM_FitBatch(benchmark::State& state) {
  const Fixture f = make_fixture(9, static_cast<std::size_t>(state.range(0)));
  spotfit::BatchRequest request;
  request.images = &f.data.images;
  request.inits = f.inits;
  for (auto _ : state) {
    auto r = spotfit::fit_batch(request);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_FitSingle)->Arg(9)->Arg(16)->Arg(25);
BENCHMARK(BM_FitExplicit5)->Arg(9)->Arg(16)->Arg(25);
BENCHMARK(BM_EvaluateModel)->Arg(9)->Arg(16)->Arg(25);
BENCHMARK(BM_EstimateInitial)->Arg(9)->Arg(25);
BENCHMARK(BM_FitBatch)->Arg(10)->Arg(1000)->Arg(10000)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

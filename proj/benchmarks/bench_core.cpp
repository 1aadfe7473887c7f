#include <hyperfit/hyperfit.hpp>

#include <benchmark/benchmark.h>

using namespace hyperfit;

namespace {

Instance instance(int dim, int m, int n, double noise) {
  InstanceSpec spec;
  spec.dim = dim;
  spec.num_hyperplanes = m;
  spec.total_points = n;
  spec.noise = noise;
  spec.seed = 42;
  return generate_instance(spec);
}

void BM_Descend(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Instance inst = instance(dim, 1, n, 0.1);
  const Vector w = Vector::Ones(n);
  Rng rng(7);
  const Vector start = random_unit_vector(dim, rng);
  for (auto _ : state) benchmark::DoNotOptimize(descend(inst.points, w, start));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Descend)->Args({2, 120})->Args({2, 3000})->Args({3, 3000})->Args({5, 3000});

void BM_InitialHyperplanes(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Instance inst = instance(2, 4, n, 0.1);
  WindowConfig wc;
  wc.width = 0.4;
  for (auto _ : state) benchmark::DoNotOptimize(initial_hyperplanes(inst.points, SamplingPlan::for_dim(2), wc));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_InitialHyperplanes)->Arg(120)->Arg(1200)->Arg(12000)->Unit(benchmark::kMillisecond);

void BM_Fit(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const Instance inst = instance(2, m, n, 0.1);
  WindowConfig wc;
  wc.width = 0.4;
  const auto init = initial_hyperplanes(inst.points, SamplingPlan::for_dim(2), wc);
  const FitConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(fit(inst.points, init, cfg));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Fit)->Args({3, 120})->Args({5, 120})->Args({5, 3000})->Unit(benchmark::kMillisecond);

void BM_LaplaceBicSweep(benchmark::State& state) {
  const Instance inst = instance(2, 3, 120, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(sweep_model_order(inst.points, 6, FitConfig{}, 3, 11));
}
BENCHMARK(BM_LaplaceBicSweep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "zerores/bounds.hpp"

using namespace zerores;

static void BM_Green6d(benchmark::State& state) {
  double xi = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(green6d(xi));
    xi = xi < 20.0 ? xi * 1.07 : 0.1;
  }
}
BENCHMARK(BM_Green6d);

static void BM_Lemma3Integral(benchmark::State& state) {
  const Profile g(ProfileShape::gaussian, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(lemma3_integral(g, 1.0, 1e-5));
}
BENCHMARK(BM_Lemma3Integral);

static void BM_Zabyv(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(zabyv_check(1.0, 0.5, state.range(0)).min_ratio);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Zabyv)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

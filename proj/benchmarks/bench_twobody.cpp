#include <benchmark/benchmark.h>

#include "zerores/twobody.hpp"

using namespace zerores;

static void BM_BuildBSMatrix(benchmark::State& state) {
  const PairPotential well(Shape::square_well, 2.4674, 1.0);
  const QuadratureRule grid = radial_grid(well, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_bs_matrix(well, 1e-3, grid).entries.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildBSMatrix)->RangeMultiplier(2)->Range(100, 800)->Complexity();

static void BM_CouplingThreshold(benchmark::State& state) {
  const PairPotential g(Shape::gaussian, 1.0, 1.0);
  const QuadratureRule grid = radial_grid(g, static_cast<int>(state.range(0)));
  ThresholdOptions o;
  o.cross_check = false;
  for (auto _ : state) benchmark::DoNotOptimize(coupling_threshold(g, grid, o).lambda_cr);
}
BENCHMARK(BM_CouplingThreshold)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

// shooting oracle for comparison
static void BM_ShootingThreshold(benchmark::State& state) {
  const PairPotential g(Shape::gaussian, 1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(shooting_threshold(g, 1.0, 4.0, 12.0));
}
BENCHMARK(BM_ShootingThreshold)->Unit(benchmark::kMillisecond);

#include <benchmark/benchmark.h>

#include "zerores/threebody.hpp"

using namespace zerores;

namespace {

const PairPotentials& gaussians() {
  static const PairPotential g(Shape::gaussian, 1.0, 1.0);
  static const PairPotentials p{{g, g, g}};
  return p;
}

const VariationalProblem& problem() {
  static const MassConfig m = reduced_masses(1, 1, 1);
  static const VariationalProblem p(make_basis(m, BasisRecipe::standard()), m, gaussians(),
                                    two_body_subthresholds(m, gaussians()).lambda12);
  return p;
}

}  // namespace

static void BM_ElementMatrices(benchmark::State& state) {
  const MassConfig m = reduced_masses(1, 1, 1);
  const GaussianBasis basis = make_basis(m, BasisRecipe::standard());
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(element_matrices(basis, m, gaussians(), threads).overlap.data());
  }
}
BENCHMARK(BM_ElementMatrices)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_GroundState(benchmark::State& state) {
  const VariationalProblem& p = problem();
  for (auto _ : state) benchmark::DoNotOptimize(p.energy(2.3, 1.0));
}
BENCHMARK(BM_GroundState)->Unit(benchmark::kMillisecond);

static void BM_Spreading(benchmark::State& state) {
  const VariationalProblem& p = problem();
  const VariationalResult r = p.solve(2.5, 1.0);
  const double radius = 5.0;
  for (auto _ : state) benchmark::DoNotOptimize(spreading_metric(r, p.basis(), radius));
}
BENCHMARK(BM_Spreading)->Unit(benchmark::kMillisecond);

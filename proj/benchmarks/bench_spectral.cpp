#include <benchmark/benchmark.h>

#include "mfda/nse.hpp"
#include "mfda/source.hpp"
#include "mfda/spectral.hpp"

using namespace mfda;

static void ForwardInverse(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)));
  const SpectralField f = random_field(g, g.n() / 3, 1);
  for (auto _ : state) {
    const std::vector<double> v = f.to_physical();
    SpectralField back = SpectralField::from_physical(g, v);
    benchmark::DoNotOptimize(back);
  }
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(ForwardInverse)->RangeMultiplier(2)->Range(32, 512)->Complexity(benchmark::oNLogN);

static void Nonlinear(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)));
  const VectorField u = leray(VectorField(random_field(g, g.n() / 3, 1), random_field(g, g.n() / 3, 2)));
  for (auto _ : state) {
    VectorField b = nonlinear_term(u);
    benchmark::DoNotOptimize(b);
  }
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(Nonlinear)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oNLogN);

static void Leray(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)));
  const VectorField w(random_field(g, g.n() / 3, 1), random_field(g, g.n() / 3, 2));
  for (auto _ : state) {
    VectorField p = leray(w);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(Leray)->Arg(128)->Arg(256);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include <string>

#include "mfda/global_interp.hpp"
#include "mfda/source.hpp"

using namespace mfda;

namespace {

const char* const kKinds[] = {"volavg0", "lagrange:1", "lagrange:2", "volpoly:2", "sobolev:1"};

}  // namespace

// range(0): interpolant index, range(1): cells per axis.
static void Applicator(benchmark::State& state) {
  const Grid g(128);
  const std::string kind = kKinds[state.range(0)];
  const GlobalInterpolant I =
      GlobalInterpolant::uniform(uniform_cover(static_cast<int>(state.range(1)), 0.25), LocalInterpolant::parse(kind));
  const GridApplicator app(I, g);
  const SpectralField phi = random_field(g, 40, 3);
  for (auto _ : state) {
    SpectralField j = app.apply_mean_free(phi);
    benchmark::DoNotOptimize(j);
  }
  state.SetLabel(kind);
}
BENCHMARK(Applicator)->ArgsProduct({{0, 1, 2, 3, 4}, {8, 16, 32}})->Unit(benchmark::kMillisecond);

static void ApplicatorSetup(benchmark::State& state) {
  const Grid g(128);
  const GlobalInterpolant I =
      GlobalInterpolant::uniform(uniform_cover(static_cast<int>(state.range(0)), 0.25), LocalInterpolant::lagrange(2));
  for (auto _ : state) {
    GridApplicator app(I, g);
    benchmark::DoNotOptimize(app);
  }
}
BENCHMARK(ApplicatorSetup)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void GlobalNormsLadder(benchmark::State& state) {
  const Grid g(64);
  const SpectralSource src(random_field(g, 1, 7));
  const GlobalInterpolant I =
      GlobalInterpolant::uniform(uniform_cover(static_cast<int>(state.range(0)), 0.25), LocalInterpolant::lagrange(2));
  for (auto _ : state) {
    GlobalNorms n = global_norms(I, src, 1, 4);
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(GlobalNormsLadder)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

#include <benchmark/benchmark.h>

#include "mfda/assimilation.hpp"
#include "mfda/nse.hpp"

using namespace mfda;

static void SolverStep(benchmark::State& state) {
  const Grid g(static_cast<int>(state.range(0)));
  const double nu = 0.1;
  const NavierStokes ns(g, {nu, 0.0, 0.0}, forcing_for_grashof(g, nu, 50.0, 2));
  SolverState s(random_velocity(g, 4, 5.0, 1), 0.0);
  for (auto _ : state) ns.advance(s, 0.01);
  benchmark::DoNotOptimize(s.u);
}
BENCHMARK(SolverStep)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void CoupledStep(benchmark::State& state) {
  const Grid g(128);
  const double nu = 0.1;
  const NavierStokes ns(g, {nu, 0.0, 0.0}, forcing_for_grashof(g, nu, 50.0, 2));
  const GlobalInterpolant I =
      GlobalInterpolant::uniform(uniform_cover(static_cast<int>(state.range(0)), 0.25), LocalInterpolant::lagrange(1));
  AssimilationRun run(ns, I, 10.0, random_velocity(g, 4, 5.0, 1), VectorField(g));
  for (auto _ : state) run.coupled_step(0.01);
  benchmark::DoNotOptimize(run.observer().u);
}
BENCHMARK(CoupledStep)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

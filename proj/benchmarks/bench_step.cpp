#include <benchmark/benchmark.h>

#include "mcps/dynamics.hpp"
#include "mcps/geometry.hpp"
#include "mcps/potential.hpp"
#include "mcps/runner.hpp"

namespace {

void BM_Resolvent(benchmark::State& state) {
  const mcps::Entropy psi;
  double s = 0.01;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi.regularized_with_slope(s, 1e-3));
    s = s < 1.0 ? s + 0.013 : 0.01;
  }
}

void BM_Step(benchmark::State& state) {
  mcps::RunConfig config;
  config.lmax = static_cast<int>(state.range(0));
  config.u_amplitude = 0.05;
  mcps::Simulation sim(config);
  for (auto _ : state) sim.advance();
}

void BM_GeometryEvaluate(benchmark::State& state) {
  const mcps::ModelParams p = mcps::ModelParams::defaults();
  mcps::SphereTransform small(12, 1.0), big(24, 1.0);
  mcps::GeometryKernel kernel(big);
  const mcps::Deformation u = mcps::random_deformation(small.basis(), 4, 0.2, 1);
  const mcps::PhaseField phi = mcps::homogeneous_phase(p, small.basis());
  for (auto _ : state) benchmark::DoNotOptimize(kernel.evaluate(u.u, 0.01, phi, p));
}

}  // namespace

BENCHMARK(BM_Resolvent);
BENCHMARK(BM_Step)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GeometryEvaluate)->Unit(benchmark::kMillisecond);

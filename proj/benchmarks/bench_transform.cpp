#include <benchmark/benchmark.h>

#include "mcps/random.hpp"
#include "mcps/sphere_spectral.hpp"

namespace {

mcps::SpectralField random_field(int lmax) {
  mcps::CounterRng rng(1);
  mcps::SpectralField f = mcps::SpectralField::zero(lmax);
  for (Eigen::Index k = 0; k < f.coeffs.size(); ++k) f.coeffs(k) = rng.normal();
  return f;
}

void BM_Synthesis(benchmark::State& state) {
  const int lmax = static_cast<int>(state.range(0));
  mcps::SphereTransform tr(lmax, 1.0);
  const mcps::SpectralField f = random_field(lmax);
  for (auto _ : state) benchmark::DoNotOptimize(tr.synthesis(f));
}

void BM_Analysis(benchmark::State& state) {
  const int lmax = static_cast<int>(state.range(0));
  mcps::SphereTransform tr(lmax, 1.0);
  const Eigen::VectorXd v = tr.synthesis(random_field(lmax));
  for (auto _ : state) benchmark::DoNotOptimize(tr.analysis(std::span<const double>(v.data(), v.size())));
}

void BM_SynthesisWithDerivatives(benchmark::State& state) {
  const int lmax = static_cast<int>(state.range(0));
  mcps::SphereTransform tr(lmax, 1.0);
  const mcps::SpectralField f = random_field(lmax);
  for (auto _ : state) benchmark::DoNotOptimize(tr.synthesis_with_derivatives(f));
}

}  // namespace

BENCHMARK(BM_Synthesis)->Arg(12)->Arg(24)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Analysis)->Arg(12)->Arg(24)->Arg(32)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_SynthesisWithDerivatives)->Arg(24)->Unit(benchmark::kMicrosecond);

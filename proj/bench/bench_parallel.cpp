// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP kernels: sweep over grid points and certificate sampling.

#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "delaywave/discretization.hpp"
#include "delaywave/spectral.hpp"
#include "delaywave/sweep.hpp"

namespace
{

delaywave::SweepPlan bench_plan()
{
  delaywave::SweepPlan plan;
  plan.axes.push_back({"alpha", 0.2, 2.0, 8, false});
  plan.axes.push_back({"tau", 0.5, 2.0, 6, false});
  plan.base.alpha = 1.0;
  plan.base.mu1 = 0.0;
  plan.base.mu2 = 1.0;
  plan.base.tau = 1.0;
  plan.base.length = 1.0;
  plan.mesh.n_cells = 48;
  plan.mesh.n_rho = 24;
  plan.mesh.length = 1.0;
  plan.per_point = delaywave::PerPoint::Spectrum;
  plan.seed = 1;
  return plan;
}

delaywave::GeneratorPair bench_pair()
{
  delaywave::SystemParams p;
  p.alpha = 0.1;
  p.mu1 = 1.0;
  p.mu2 = 0.5;
  p.tau = 1.0;
  p.length = 1.0;
  p.xi = 1.0;
  delaywave::Mesh mesh;
  mesh.n_cells = 120;
  mesh.n_rho = 60;
  mesh.length = 1.0;
  return delaywave::assemble(p, mesh);
}

void set_threads(int threads)
{
#ifdef _OPENMP
  omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

void BM_sweep_serial(benchmark::State& state)
{
  const auto plan = bench_plan();
  for (auto _ : state)
  {
    auto records = delaywave::run_sweep_serial(plan);
    benchmark::DoNotOptimize(records);
  }
}

void BM_sweep_openmp(benchmark::State& state)
{
  const auto plan = bench_plan();
  set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state)
  {
    auto records = delaywave::run_sweep(plan);
    benchmark::DoNotOptimize(records);
  }
}

void BM_certificate_sampling(benchmark::State& state)
{
  const auto pair = bench_pair();
  set_threads(static_cast<int>(state.range(0)));
  for (auto _ : state)
  {
    auto report = delaywave::dissipativity_certificate(pair, 512, 9);
    benchmark::DoNotOptimize(report);
  }
}

}  // namespace

BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_openmp)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_certificate_sampling)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

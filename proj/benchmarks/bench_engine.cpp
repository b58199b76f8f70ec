// Microbenchmarks for the hot paths: closed-form evaluation, hierarchy
// propagation, swept-detuning distributions, Monte Carlo batches, and a full
// fixed-omega optimization. Run with --benchmark_filter=<regex> to pick one.

#include <benchmark/benchmark.h>

#include "photonctl/closed_form.hpp"
#include "photonctl/control_field.hpp"
#include "photonctl/gf_engine.hpp"
#include "photonctl/mc.hpp"
#include "photonctl/optimize.hpp"

namespace {

using namespace photonctl;

void BM_ClosedFormDistribution(benchmark::State& state) {
  const double omega = 0.5, big_t = 6.75;
  for (auto _ : state) {
    const auto ctx = SquarePulseContext::make(omega, big_t);
    benchmark::DoNotOptimize(cf_pn(ctx, 0));
    benchmark::DoNotOptimize(cf_pn(ctx, 1));
    benchmark::DoNotOptimize(cf_pn(ctx, 2));
    benchmark::DoNotOptimize(cf_q(ctx));
  }
}
BENCHMARK(BM_ClosedFormDistribution);

void BM_ClosedFormSeriesPath(benchmark::State& state) {
  // Straddles the omega = 1/4 removable singularity: exercises the series
  // evaluation instead of the generic complex-root path.
  const double omega = 0.25 + 1e-8, big_t = 5.0;
  for (auto _ : state) {
    const auto ctx = SquarePulseContext::make(omega, big_t);
    benchmark::DoNotOptimize(cf_pn(ctx, 1));
  }
}
BENCHMARK(BM_ClosedFormSeriesPath);

void BM_HierarchyDistribution(benchmark::State& state) {
  const ControlField field = SquarePulse{0.5, 6.75};
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(photon_distribution(field, n_max));
  }
}
BENCHMARK(BM_HierarchyDistribution)->Arg(4)->Arg(8)->Arg(16);

void BM_Moments(benchmark::State& state) {
  const ControlField field = SquarePulse{0.5, 6.75};
  for (auto _ : state) {
    benchmark::DoNotOptimize(moments(field));
  }
}
BENCHMARK(BM_Moments);

void BM_RafDistribution(benchmark::State& state) {
  RafParams p;
  p.omega = 3.2;
  p.delta_rf = 88.0;
  p.nu_rf = 0.15;
  for (auto _ : state) {
    benchmark::DoNotOptimize(raf_distribution(p, 6));
  }
}
BENCHMARK(BM_RafDistribution);

void BM_MonteCarloBatch(benchmark::State& state) {
  const ControlField field = SquarePulse{1.0, 3.0};
  const auto n_traj = static_cast<std::uint64_t>(state.range(0));
  McOptions opt;
  opt.threads = 1;  // per-core cost; scaling is measured elsewhere
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(field, {}, n_traj, seed++, 8, opt));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n_traj));
}
BENCHMARK(BM_MonteCarloBatch)->Arg(100)->Arg(1000);

void BM_MaximizeOverT(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        maximize_over_t(Objective::kP1, 0.5, {0.01, 50.0}));
  }
}
BENCHMARK(BM_MaximizeOverT);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}

#include <benchmark/benchmark.h>

#include <random>

#include "calderon/analytic.hpp"
#include "calderon/calculus.hpp"
#include "calderon/dn_solver.hpp"

using namespace calderon;

namespace {

CylinderGrid cube(int nt) { return CylinderGrid(nt, {nt - 1, nt - 1}); }

void BM_AssembleStiffness(benchmark::State& state) {
  const CylinderGrid grid = cube(static_cast<int>(state.range(0)));
  const MetricField g = sample_metric(random_smooth_metric(3, 1, 0.3), grid);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_stiffness(g));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_AssembleStiffness)->Arg(9)->Arg(17)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_DnMapPartial(benchmark::State& state) {
  const CylinderGrid grid = cube(static_cast<int>(state.range(0)));
  const StiffnessSystem system = assemble_stiffness(sample_metric(random_smooth_metric(3, 1, 0.3), grid));
  for (auto _ : state) benchmark::DoNotOptimize(dn_map_partial(system, Boundary::kGamma1));
}
BENCHMARK(BM_DnMapPartial)->Arg(9)->Arg(13)->Arg(17)->Unit(benchmark::kMillisecond);

void BM_Gradient(benchmark::State& state) {
  const CylinderGrid grid = cube(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(1);
  const ScalarField f = ScalarField::sample(random_trig_scalar(3, rng, 0.0, 1.0), grid).without_source();
  for (auto _ : state) benchmark::DoNotOptimize(gradient(f));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_Gradient)->Arg(17)->Arg(33)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();

// Serial reference path against the OpenMP path for the data-parallel kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "fabcr/fab_gaussian.hpp"
#include "fabcr/fab_nef.hpp"
#include "fabcr/parallel.hpp"
#include "fabcr/simulate.hpp"

namespace {

using namespace fabcr;

Exec exec_of(const benchmark::State& st) { return st.range(0) ? Exec::parallel : Exec::serial; }

void BM_PValueCurve(benchmark::State& st) {
  const PriorModel model = PriorModel::parse("horseshoe");
  std::vector<double> grid;
  for (int i = 0; i <= 200; ++i) grid.push_back(-2.0 + 0.05 * i);
  for (auto _ : st) benchmark::DoNotOptimize(p_value_curve(model, 3.0, grid, exec_of(st)));
  st.counters["threads"] = st.range(0) ? thread_count() : 1;
}
BENCHMARK(BM_PValueCurve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CoverageMc(benchmark::State& st) {
  const PriorModel model = PriorModel::parse("laplace:kappa=1");
  CoverageMcOptions opts;
  opts.samples = 1 << 20;
  opts.end_to_end = 0;
  for (auto _ : st) benchmark::DoNotOptimize(coverage_mc(model, 1.0, 0.1, opts, exec_of(st)));
}
BENCHMARK(BM_CoverageMc)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BinomialRegion(benchmark::State& st) {
  const NefModel model = NefModel::parse("binom:n=8,a=1,b=1");
  NefGridSpec spec;
  spec.exec = exec_of(st);
  for (auto _ : st) benchmark::DoNotOptimize(confidence_region_nef(model, {3}, 0.1, spec));
}
BENCHMARK(BM_BinomialRegion)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Experiment(benchmark::State& st) {
  ExperimentConfig cfg;
  cfg.reps = 8;
  cfg.log_sigma_beta_grid = {0.0, 3.0};
  for (auto _ : st) benchmark::DoNotOptimize(run_experiment(cfg, exec_of(st)));
}
BENCHMARK(BM_Experiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

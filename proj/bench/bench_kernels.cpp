// Serial reference kernels against their OpenMP versions.
//
//   bench_kernels --benchmark_filter=Dissimilarity

#include <benchmark/benchmark.h>

#include <vector>

#include "paramsens/kernels.hpp"
#include "paramsens/synthgen.hpp"

using namespace paramsens;

namespace {

std::vector<PreparedResult> results(int count, int fibers) {
  SynthConfig cfg;
  cfg.fiber_count = fibers;
  std::vector<PreparedResult> out;
  for (int i = 0; i < count; ++i) {
    const double p = static_cast<double>(i) / count;
    out.push_back(PreparedResult::from(generate(p, 1.0 - p, cfg, i).result));
  }
  return out;
}

void BM_DissimilaritySerial(benchmark::State& state) {
  const auto r = results(static_cast<int>(state.range(0)), 40);
  const TubeSampler sampler(200);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dissimilarity_matrix_serial(r, sampler));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_DissimilarityOmp(benchmark::State& state) {
  const auto r = results(static_cast<int>(state.range(0)), 40);
  const TubeSampler sampler(200);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::dissimilarity_matrix_omp(r, sampler));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_CoverageSerial(benchmark::State& state) {
  const auto r = results(16, 60);
  const auto geom = grid_covering(Box3{{0, 0, 0}, {400, 400, 300}}, {static_cast<int>(state.range(0)),
                                  static_cast<int>(state.range(0)), static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(kernels::coverage_counts_serial(r, geom));
}

void BM_CoverageOmp(benchmark::State& state) {
  const auto r = results(16, 60);
  const auto geom = grid_covering(Box3{{0, 0, 0}, {400, 400, 300}}, {static_cast<int>(state.range(0)),
                                  static_cast<int>(state.range(0)), static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(kernels::coverage_counts_omp(r, geom));
}

}  // namespace

BENCHMARK(BM_DissimilaritySerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DissimilarityOmp)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoverageOmp)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

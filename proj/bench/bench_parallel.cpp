#include <benchmark/benchmark.h>

#include <random>

#include "hetero_spectra/kernels.hpp"
#include "hetero_spectra/simlab.hpp"

using namespace hs;

namespace {

Matrix gaussian(std::size_t rows, std::size_t cols) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> nd;
  Matrix y(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) y(i, j) = nd(gen);
  return y;
}

void BM_GramSerial(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Matrix y = gaussian(p, 4 * p);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::gram_serial(y));
}

void BM_GramParallel(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const Matrix y = gaussian(p, 4 * p);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::gram_parallel(y));
  state.counters["threads"] = kernels::max_threads();
}

ExperimentConfig small_sweep() {
  ExperimentConfig cfg;
  cfg.baseline.n = 100;
  cfg.baseline.p = 30;
  cfg.baseline.r = 3;
  cfg.values = {3.0, 30.0};
  cfg.methods = {Method::svd, Method::hpca, Method::rmtfa};
  cfg.replicates = 4;
  return cfg;
}

void BM_ExperimentSerial(benchmark::State& state) {
  const auto cfg = small_sweep();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, Schedule::serial));
}

void BM_ExperimentParallel(benchmark::State& state) {
  const auto cfg = small_sweep();
  const int jobs = kernels::max_threads();
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(cfg, Schedule::parallel, jobs));
  state.counters["threads"] = jobs;
}

}  // namespace

BENCHMARK(BM_GramSerial)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_GramParallel)->Arg(50)->Arg(200)->Arg(500)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExperimentParallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();

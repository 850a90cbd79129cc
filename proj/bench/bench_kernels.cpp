// Serial reference kernels against their OpenMP counterparts.

#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "vri/distributions.hpp"
#include "vri/kernels.hpp"
#include "vri/memory.hpp"
#include "vri/persistence.hpp"
#include "vri/rng.hpp"
#include "vri/synth.hpp"

namespace {

using namespace vri;

const std::vector<double>& volatility() {
  static const auto v = [] {
    Pcg64 r(1, 0);
    std::vector<double> out(1 << 22);
    for (auto& x : out) x = std::abs(r.normal());
    return out;
  }();
  return v;
}

const std::vector<double>& walk() {
  static const auto v = generate(GeneratorSpec::parse("random_walk", 1 << 21, 1));
  return v;
}

void BM_Exceedances(benchmark::State& state) {
  const auto exec = static_cast<Exec>(state.range(0));
  const auto& v = volatility();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::exceedances(v, 2.0, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}

void BM_BinCounts(benchmark::State& state) {
  const auto exec = static_cast<Exec>(state.range(0));
  std::vector<double> edges;
  for (int k = -20; k <= 10; ++k) edges.push_back(std::pow(10.0, k / 10.0));
  const auto& v = volatility();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::bin_counts(v, edges, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}

void BM_RunHistogram(benchmark::State& state) {
  const auto exec = static_cast<Exec>(state.range(0));
  const auto& v = walk();
  for (auto _ : state) benchmark::DoNotOptimize(kernels::run_histogram(v, 100, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}

void BM_StretchedExpQuantiles(benchmark::State& state) {
  const auto exec = static_cast<Exec>(state.range(0));
  Pcg64 r(2, 0);
  std::vector<double> u(1 << 18);
  for (auto& x : u) x = r.uniform_open();
  std::vector<double> out(u.size());
  for (auto _ : state) {
    if (exec == Exec::serial) {
      kernels::stretched_exp_quantiles_serial(u, 0.7, 3.0, out);
    } else {
      kernels::stretched_exp_quantiles_parallel(u, 0.7, 3.0, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(u.size()));
}

void BM_ConditionalMean(benchmark::State& state) {
  const auto exec = static_cast<Exec>(state.range(0));
  Pcg64 r(3, 0);
  std::vector<std::int64_t> t(100000);
  for (auto& x : t) x = 1 + static_cast<std::int64_t>(r.bounded(40));
  const auto taus = IntervalSeries::from_taus(std::move(t));
  for (auto _ : state) benchmark::DoNotOptimize(mean_conditional_interval(taus, 8, 20, 1, exec));
}

void exec_args(benchmark::internal::Benchmark* b) {
  b->ArgName("parallel")->Arg(static_cast<int>(Exec::serial))->Arg(static_cast<int>(Exec::parallel));
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

BENCHMARK(BM_Exceedances)->Apply(exec_args);
BENCHMARK(BM_BinCounts)->Apply(exec_args);
BENCHMARK(BM_RunHistogram)->Apply(exec_args);
BENCHMARK(BM_StretchedExpQuantiles)->Apply(exec_args);
BENCHMARK(BM_ConditionalMean)->Apply(exec_args);

}  // namespace

BENCHMARK_MAIN();

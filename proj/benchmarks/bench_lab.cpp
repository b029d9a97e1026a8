#include <benchmark/benchmark.h>

#include "igr/lab/cnf.hpp"
#include "igr/lab/invariance.hpp"
#include "igr/lab/reduction.hpp"

namespace {

void BM_Enumerate(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto strategy = static_cast<igr::lab::Strategy>(state.range(1));
  const auto red = igr::lab::reduce_3sat(igr::lab::random_formula(k, 3 + k, 17));
  igr::lab::EnumerationOptions opts;
  opts.strategy = strategy;
  for (auto _ : state) benchmark::DoNotOptimize(igr::lab::enumerate_invariant_sets(red.instance.moments, opts));
  state.SetLabel(std::string(igr::lab::to_string(strategy)) + " d=" + std::to_string(red.instance.d()));
}
BENCHMARK(BM_Enumerate)
    ->Args({1, static_cast<int>(igr::lab::Strategy::brute_force)})
    ->Args({1, static_cast<int>(igr::lab::Strategy::schur_dfs)})
    ->Args({2, static_cast<int>(igr::lab::Strategy::schur_dfs)})
    ->Args({2, static_cast<int>(igr::lab::Strategy::pruned)})
    ->Args({3, static_cast<int>(igr::lab::Strategy::pruned)})
    ->Unit(benchmark::kMillisecond);

void BM_ProblemOne(benchmark::State& state) {
  const auto red = igr::lab::reduce_3sat(igr::lab::problem1_formula());
  for (auto _ : state) benchmark::DoNotOptimize(igr::lab::enumerate_invariant_sets(red.instance.moments));
}
BENCHMARK(BM_ProblemOne)->Unit(benchmark::kMillisecond);

}  // namespace

#include <benchmark/benchmark.h>

#include "igr/scm.hpp"
#include "igr/variation.hpp"

namespace {

igr::EnvMomentSet<double> random_moments(int d) {
  igr::RandomScmConfig cfg;
  cfg.d = d;
  cfg.seed = 3;
  const auto scm = igr::random_scm(cfg).convert<double>();
  return igr::moments_from_samples(igr::sample(scm, 2000, 4));
}

void BM_WeightTable(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0)), k = static_cast<int>(state.range(1));
  const auto m = random_moments(d);
  for (auto _ : state) benchmark::DoNotOptimize(igr::weight_table(m, k));
  state.counters["subsets"] = static_cast<double>(igr::subsets_up_to(d, k).size());
}
BENCHMARK(BM_WeightTable)->Args({10, 1})->Args({10, 2})->Args({20, 2})->Args({20, 3})->Unit(benchmark::kMillisecond);

void BM_WeightTableExact(benchmark::State& state) {
  const auto m = igr::population_moments(igr::make_example(igr::ExampleName::ex2_1)).moments;
  for (auto _ : state) benchmark::DoNotOptimize(igr::weight_table(m, 2));
}
BENCHMARK(BM_WeightTableExact)->Unit(benchmark::kMillisecond);

}  // namespace

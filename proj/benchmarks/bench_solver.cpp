#include <benchmark/benchmark.h>

#include <random>

#include "igr/pipeline.hpp"
#include "igr/solver.hpp"

namespace {

void BM_WeightedLasso(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n01;
  Eigen::MatrixXd g(2 * d, d);
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < d; ++j) g(i, j) = n01(rng);
  const Eigen::MatrixXd s = g.transpose() * g / (2.0 * d);
  Eigen::VectorXd u(d);
  for (int j = 0; j < d; ++j) u(j) = n01(rng);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(d, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(igr::solve_weighted_lasso(s, u, p));
}
BENCHMARK(BM_WeightedLasso)->Arg(10)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_GridFit(benchmark::State& state) {
  const auto scm = igr::make_example(igr::ExampleName::ex3_1).convert<double>();
  const auto train = igr::sample(scm, 400, 1);
  const auto valid = igr::sample(igr::make_example_3_1_shifted(), 400, 2).env(0);
  igr::GridConfig cfg;
  cfg.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(igr::igr_fit(train, valid, cfg));
}
BENCHMARK(BM_GridFit)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

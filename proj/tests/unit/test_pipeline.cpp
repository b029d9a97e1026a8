#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "igr/pipeline.hpp"

using namespace igr;

namespace {

Environment env_of(const std::string& id, Eigen::MatrixXd x, Eigen::VectorXd y) {
  return Environment{id, std::move(x), std::move(y)};
}

/// Pooled OLS from scratch: per-environment centered Gram matrices averaged with equal weight.
Eigen::VectorXd pooled_ols(const MultiEnvDataset& data) {
  const int d = data.d();
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(d, d);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
  for (int e = 0; e < data.num_envs(); ++e) {
    const auto& en = data.env(e);
    const Eigen::MatrixXd xc = en.x.rowwise() - en.x.colwise().mean();
    const Eigen::VectorXd yc = en.y.array() - en.y.mean();
    const double n = static_cast<double>(en.x.rows());
    s += xc.transpose() * xc / n;
    u += xc.transpose() * yc / n;
  }
  return s.ldlt().solve(u);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

MultiEnvDataset ex31_train(long n, std::uint64_t seed) {
  return sample(make_example(ExampleName::ex3_1).convert<double>(), n, seed);
}

Environment shifted_env(long n, std::uint64_t seed, const std::string& id) {
  auto e = sample(make_example_3_1_shifted(), n, seed).env(0);
  e.id = id;
  return e;
}

}  // namespace

TEST(Mse, Definitions) {
  Eigen::MatrixXd x(1, 1);
  x << 0.0;
  Eigen::MatrixXd y(1, 2);
  y << 1.0, 2.0;
  Eigen::MatrixXd b(1, 2);
  b << 5.0, 7.0;
  EXPECT_DOUBLE_EQ(mse(b, x, y), 5.0);
  EXPECT_DOUBLE_EQ(mse(b, x, Eigen::MatrixXd::Zero(1, 2)), 0.0);
  EXPECT_THROW(mse(Eigen::MatrixXd::Zero(2, 2), x, y), ValidationError);

  Eigen::MatrixXd x2(3, 2);
  x2 << 1, 0, 0, 1, 1, 1;
  const Eigen::VectorXd beta = Eigen::Vector2d(2, -1);
  const Eigen::VectorXd y2 = x2 * beta;
  EXPECT_DOUBLE_EQ(mse(beta, env_of("a", x2, y2), false), 0.0);
  EXPECT_DOUBLE_EQ(mse(beta, env_of("a", x2, y2 + Eigen::Vector3d(1, 2, 0)), false), 5.0);
  EXPECT_THROW(mse(Eigen::Vector3d(1, 1, 1), env_of("a", x2, y2)), ValidationError);
}

TEST(Mse, CenteringRemovesConstantOffset) {
  Eigen::MatrixXd x(4, 1);
  x << 1, 2, 3, 4;
  const Eigen::VectorXd y = 3.0 * x.col(0).array() + 10.0;
  EXPECT_NEAR(mse(Eigen::VectorXd::Constant(1, 3.0), env_of("a", x, y), true), 0.0, 1e-20);
  EXPECT_DOUBLE_EQ(mse(Eigen::VectorXd::Constant(1, 3.0), env_of("a", x, y), false), 400.0);
}

TEST(WorstCaseR2, Cases) {
  Eigen::MatrixXd x(4, 1);
  x << -1.5, -0.5, 0.5, 1.5;
  const Eigen::VectorXd y = x.col(0);
  const auto good = env_of("good", x, y), flipped = env_of("flipped", x, -y);
  const Eigen::VectorXd one = Eigen::VectorXd::Constant(1, 1.0);
  EXPECT_DOUBLE_EQ(worst_case_r2(one, {good}), 1.0);
  EXPECT_DOUBLE_EQ(worst_case_r2(Eigen::VectorXd::Zero(1), {good, flipped}), 0.0);
  // Residual -2y in the flipped environment: 1 - 4 = -3.
  EXPECT_DOUBLE_EQ(worst_case_r2(one, {good, flipped}), -3.0);
  EXPECT_THROW(worst_case_r2(one, {}), ValidationError);
  EXPECT_THROW(worst_case_r2(one, {env_of("zero", x, Eigen::VectorXd::Zero(4))}), ValidationError);
}

TEST(GridConfig, Validation) {
  GridConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.gammas.size(), 12u);
  EXPECT_EQ(cfg.lambdas.size(), 12u);
  EXPECT_EQ(cfg.gammas.front(), 0.0);
  EXPECT_EQ(cfg.gammas.back(), 32.0);
  EXPECT_EQ(cfg.lambdas.back(), 1.0);
  cfg.gammas = {};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.gammas = {-1.0};
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg.gammas = {0.0};
  cfg.lambdas = {NAN};
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(IgrFit, ZeroGridsGivePooledOls) {
  const auto train = ex31_train(400, 5);
  GridConfig cfg;
  cfg.gammas = {0.0};
  cfg.lambdas = {0.0};
  cfg.solver.tol = 1e-13;
  const auto rep = igr_fit(train, shifted_env(200, 6, "valid"), cfg);
  EXPECT_LT((rep.beta - pooled_ols(train)).norm(), 1e-8);
}

TEST(IgrFit, RejectsBadValidation) {
  const auto train = ex31_train(50, 5);
  EXPECT_THROW(igr_fit(train, std::vector<Environment>{}), ValidationError);
  EXPECT_THROW(igr_fit(train, env_of("v", Eigen::MatrixXd::Zero(3, 2), Eigen::VectorXd::Zero(3))), ValidationError);
  EXPECT_THROW(igr_fit(train, env_of("v", Eigen::MatrixXd::Zero(0, 3), Eigen::VectorXd::Zero(0))), ValidationError);
}

TEST(IgrFit, SelectedCellIsMinimalOnRecomputation) {
  const auto train = ex31_train(300, 11);
  const auto valid = shifted_env(300, 12, "valid");
  const auto rep = igr_fit(train, valid);
  ASSERT_EQ(rep.cells.size(), rep.config.gammas.size() * rep.config.lambdas.size());
  const double n = static_cast<double>(valid.x.rows());
  const double chosen = mse(rep.beta, valid, true) / n;
  EXPECT_NEAR(chosen, rep.validation_loss, 1e-12);
  for (const auto& c : rep.cells) {
    const double loss = mse(c.beta, valid, true) / n;
    EXPECT_NEAR(loss, c.validation_loss, 1e-12);
    EXPECT_GE(loss, chosen - 1e-12);
  }
}

TEST(IgrFit, TiesGoToSmallestGammaThenLambda) {
  const auto train = ex31_train(100, 3);
  // Zero covariates: every cell predicts the same, so all losses tie.
  const auto valid = env_of("flat", Eigen::MatrixXd::Zero(10, 3), Eigen::VectorXd::LinSpaced(10, 0, 1));
  GridConfig cfg;
  cfg.gammas = {1.0, 0.5, 2.0};
  cfg.lambdas = {0.25, 0.125};
  const auto rep = igr_fit(train, valid, cfg);
  EXPECT_EQ(rep.gamma, 0.5);
  EXPECT_EQ(rep.lambda, 0.125);
  EXPECT_EQ(rep.selected, 1u * 2u + 1u);  // gamma-major
}

TEST(IgrFit, DeterministicAndThreadIndependent) {
  const auto train = ex31_train(200, 21);
  const auto valid = shifted_env(200, 22, "valid");
  GridConfig cfg;
  const auto a = igr_fit(train, valid, cfg), b = igr_fit(train, valid, cfg);
  cfg.threads = 3;
  const auto c = igr_fit(train, valid, cfg);
  for (const auto* r : {&b, &c}) {
    EXPECT_EQ(r->selected, a.selected);
    EXPECT_TRUE(r->beta == a.beta);
    ASSERT_EQ(r->cells.size(), a.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i) EXPECT_EQ(r->cells[i].validation_loss, a.cells[i].validation_loss);
  }
}

TEST(IgrFit, BackMappingPreservesPredictions) {
  auto train = ex31_train(300, 31);
  // Put the covariates on very different scales.
  std::vector<Environment> envs;
  const Eigen::Vector3d scale(10.0, 0.01, 3.0);
  for (int e = 0; e < train.num_envs(); ++e) {
    auto en = train.env(e);
    en.x = en.x * scale.asDiagonal();
    envs.push_back(en);
  }
  const MultiEnvDataset scaled(envs);
  auto valid = shifted_env(100, 32, "valid");
  valid.x = valid.x * scale.asDiagonal();
  const auto rep = igr_fit(scaled, valid);
  MomentOptions mo;
  mo.normalize = true;
  const auto m = moments_from_samples(scaled, mo);
  const Eigen::VectorXd internal_pred = (valid.x * m.scale.cwiseInverse().asDiagonal()) * rep.beta_internal;
  EXPECT_LT((valid.x * rep.beta - internal_pred).lpNorm<Eigen::Infinity>(), 1e-10);
}

TEST(IgrFit, LargestGammaRecoversCausalSupport) {
  const auto train = ex31_train(100000, 41);
  GridConfig cfg;
  cfg.k = 1;
  cfg.lambdas = {0.0};
  const auto rep = igr_fit(train, shifted_env(1000, 42, "valid"), cfg);
  const auto& last = rep.cells[rep.cells.size() - 1];
  ASSERT_EQ(last.gamma, 32.0);
  EXPECT_NE(last.beta(0), 0.0);
  EXPECT_EQ(last.beta(1), 0.0);
  EXPECT_EQ(last.beta(2), 0.0);
  EXPECT_GT(last.beta(0), 0.5);  // shrunk by gamma * sqrt(w_1), which is O(n^-1/2)
}

TEST(IgrFit, BeatsPooledOlsUnderShift) {
  std::vector<double> igr_err, ols_err, gammas;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto train = ex31_train(400, 100 + s);
    const auto valid = shifted_env(400, 200 + s, "valid");
    const auto test = shifted_env(2000, 300 + s, "test");
    auto rep = igr_fit(train, valid);
    evaluate(rep, {test});
    igr_err.push_back(rep.test_mse[0]);
    gammas.push_back(rep.gamma);
    ols_err.push_back(mse(pooled_ols(train), test, true));
  }
  EXPECT_GT(median(gammas), 0.0);
  EXPECT_LE(median(igr_err), median(ols_err));
}

TEST(Evaluate, FillsTestMetrics) {
  const auto train = ex31_train(200, 51);
  auto rep = igr_fit(train, shifted_env(100, 52, "valid"));
  EXPECT_FALSE(rep.has_test);
  evaluate(rep, {shifted_env(100, 53, "t1"), shifted_env(100, 54, "t2")});
  EXPECT_TRUE(rep.has_test);
  ASSERT_EQ(rep.test_ids, (std::vector<std::string>{"t1", "t2"}));
  EXPECT_LE(rep.worst_case_r2, 1.0);
}

TEST(Rate, MonotoneWithRootNSlope) {
  const auto scm = make_example(ExampleName::ex3_1).convert<double>();
  RateConfig cfg;
  const auto t = rate_experiment(scm, cfg);
  ASSERT_EQ(t.medians.size(), 3u);
  EXPECT_TRUE(t.monotone);
  EXPECT_GE(t.slope, -0.7);
  EXPECT_LE(t.slope, -0.3);
}

TEST(Rate, ZeroGammaTargetsPooledOls) {
  const auto scm = make_example(ExampleName::ex3_1).convert<double>();
  RateConfig cfg;
  cfg.gamma = 0.0;
  const auto t = rate_experiment(scm, cfg);
  const auto pop = population_moments(scm).moments;
  EXPECT_LT((t.target - pop.pooled_sigma.ldlt().solve(pop.pooled_u)).norm(), 1e-10);
  EXPECT_TRUE(t.monotone);
  EXPECT_GE(t.slope, -0.7);
  EXPECT_LE(t.slope, -0.3);
}

TEST(Rate, Validation) {
  const auto scm = make_example(ExampleName::ex3_1).convert<double>();
  RateConfig cfg;
  cfg.n_grid = {1000, 250};
  EXPECT_THROW(rate_experiment(scm, cfg), ValidationError);
  EXPECT_NEAR(log_log_slope({1, 4, 16}, {1, 0.5, 0.25}), -0.5, 1e-12);
}

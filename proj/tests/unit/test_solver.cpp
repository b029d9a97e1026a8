#include <gtest/gtest.h>

#include <random>

#include "igr/scm.hpp"
#include "igr/solver.hpp"
#include "support/oracles.hpp"

using namespace igr;

namespace {

EnvMomentSet<double> three_var_double() {
  const auto h = oracle::three_variable_example();
  auto m = convert_moments<double>(make_moment_set<Rational>(h.sigma, h.u));
  m.mean_sq_y = {2.0, 2.0};
  return m;
}

WeightTable table_from(const std::vector<double>& v) {
  WeightTable w;
  w.k = 1;
  w.v = v;
  w.w = v;
  w.defined.assign(v.size(), true);
  w.argmin_sets.resize(v.size());
  w.singular_skips.assign(v.size(), 0);
  w.v_exact.assign(v.size(), "");
  return w;
}

}  // namespace

TEST(Objective, ZeroVectorGivesHalfMeanSquare) {
  const auto m = three_var_double();
  const auto w = weight_table(m, 1);
  EXPECT_DOUBLE_EQ(objective(Eigen::VectorXd::Zero(3), m, w, 2.0, 0.5, 2.0), 1.0);
}

TEST(Objective, CausalVectorPaysNoPenalty) {
  const auto m = three_var_double();
  const auto w = weight_table(m, 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
  b(0) = 1;
  const double quad = 0.5 * b.dot(m.pooled_sigma * b) - b.dot(m.pooled_u) + 1.0;
  for (double g : {0.0, 1.0, 10.0}) EXPECT_DOUBLE_EQ(objective(b, m, w, g, 0.0, 2.0), quad);
}

TEST(Solve, UnpenalizedMatchesLinearSolve) {
  const auto m = three_var_double();
  const auto w = weight_table(m, 1);
  const auto fit = solve(m, w, 0.0, 0.0);
  const Eigen::VectorXd ols = m.pooled_sigma.ldlt().solve(m.pooled_u);
  EXPECT_LE((fit.beta - ols).lpNorm<Eigen::Infinity>(), 1e-8);
  EXPECT_TRUE(fit.converged);
  // Unpenalized optimum minimizes the quadratic part.
  EXPECT_LE(fit.objective, objective(Eigen::VectorXd::Zero(3), m, w, 0, 0, 2.0));
}

TEST(Solve, ThreeVariableExampleIdentifiesCausalVector) {
  const auto m = three_var_double();
  const auto w = weight_table(m, 1);
  const auto fit = solve(m, w, 3.6, 0.0);
  EXPECT_NEAR(fit.beta(0), 1.0, 1e-6);
  EXPECT_NEAR(fit.beta(1), 0.0, 1e-6);
  EXPECT_NEAR(fit.beta(2), 0.0, 1e-6);
  EXPECT_EQ(fit.support, IndexSet{0});
}

TEST(Kkt, ExactMinimizerAndPerturbation) {
  const auto m = three_var_double();
  const auto w = weight_table(m, 1);
  const auto fit = solve(m, w, 0.4, 0.0);
  EXPECT_LE(kkt_residual(fit.beta, m, w, 0.4, 0.0), 1e-8);
  int active = -1;
  for (int j = 0; j < 3; ++j)
    if (fit.beta(j) != 0.0 && active < 0) active = j;
  ASSERT_GE(active, 0);
  Eigen::VectorXd b = fit.beta;
  b(active) += 1e-3;
  // First order: the gradient of coordinate `active` moves by Sigma_jj * 1e-3;
  // other coordinates move by Sigma_ij * 1e-3, at most as much on a unit diagonal.
  EXPECT_NEAR(kkt_residual(b, m, w, 0.4, 0.0), m.pooled_sigma(active, active) * 1e-3, 1e-9);
}

TEST(Solve, AgreesWithProximalGradientOnRandomProblems) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> n01;
  for (int rep = 0; rep < 25; ++rep) {
    const int d = 2 + rep % 12;
    const Eigen::MatrixXd s = oracle::random_spd(d, rng);
    Eigen::VectorXd u(d), p(d);
    for (int j = 0; j < d; ++j) {
      u(j) = n01(rng);
      p(j) = unif(rng) < 0.3 ? 0.0 : unif(rng);
    }
    const auto fit = solve_weighted_lasso(s, u, p);
    const Eigen::VectorXd ref = oracle::fista(s, u, p);
    EXPECT_LE(fit.kkt, 1e-6);
    const double f1 = quadratic_objective(fit.beta, s, u, p, 0), f2 = quadratic_objective(ref, s, u, p, 0);
    EXPECT_LE(f1, f2 + 1e-8);
  }
}

TEST(Solve, CycleOrdersAgree) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd s = oracle::random_spd(6, rng);
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(6, -1, 1), p = Eigen::VectorXd::Constant(6, 0.1);
  SolveOptions a, b, c;
  b.order = CycleOrder::reverse;
  c.order = CycleOrder::random;
  c.seed = 3;
  const auto fa = solve_weighted_lasso(s, u, p, a), fb = solve_weighted_lasso(s, u, p, b),
             fc = solve_weighted_lasso(s, u, p, c);
  EXPECT_LE((fa.beta - fb.beta).norm(), 1e-8);
  EXPECT_LE((fa.beta - fc.beta).norm(), 1e-8);
}

TEST(Solve, RejectsIllPosedInputs) {
  Eigen::MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  EXPECT_THROW(solve_weighted_lasso(indef, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2)), NumericalError);
  Eigen::MatrixXd sing(2, 2);
  sing << 1, 1, 1, 1;
  EXPECT_THROW(solve_weighted_lasso(sing, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Zero(2)), ValidationError);
  // High-dimensional mode: a positive L1 level makes the singular problem well posed.
  const auto fit = solve_weighted_lasso(sing, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Constant(2, 0.5));
  EXPECT_LE(fit.kkt, 1e-6);
  EXPECT_THROW(solve_weighted_lasso(Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2),
                                    Eigen::VectorXd::Constant(2, -1.0)),
               ValidationError);
}

TEST(Solve, SweepCapFlagsNonConvergence) {
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd s = oracle::random_spd(8, rng, 0.01, 5.0);
  SolveOptions o;
  o.max_sweeps = 1;
  o.refine = false;
  const auto fit = solve_weighted_lasso(s, Eigen::VectorXd::Ones(8), Eigen::VectorXd::Zero(8), o);
  EXPECT_FALSE(fit.converged);
  EXPECT_EQ(fit.sweeps, 1);
}

TEST(Penalty, UndefinedWeightPinsCoordinate) {
  auto w = table_from({0.25, 0.0});
  w.defined[1] = false;
  const auto p = penalty_vector(w, 2.0, 0.1);
  EXPECT_DOUBLE_EQ(p(0), 2.0 * 0.5 + 0.1);
  EXPECT_TRUE(std::isinf(p(1)));
  EXPECT_DOUBLE_EQ(penalty_vector(w, 0.0, 0.1)(1), 0.1);
}

TEST(Path, EndpointsAndDropOrder) {
  const auto m = three_var_double();
  const auto w = weight_table(m, 1);
  const auto path = solution_path(m, w, {0.0, 0.4, 2.0, 3.6}, 0.0);
  const Eigen::VectorXd ols = m.pooled_sigma.ldlt().solve(m.pooled_u);
  EXPECT_LE((path.betas.front() - ols).norm(), 1e-8);
  EXPECT_NEAR(path.betas.back()(0), 1.0, 1e-6);
  EXPECT_LE(path.betas.back().tail(2).norm(), 1e-6);
  EXPECT_LE(path.zero_from_gamma[2], path.zero_from_gamma[1]);
  EXPECT_THROW(solution_path(m, w, {1.0, 0.5}, 0.0), ValidationError);
}

TEST(Path, ZeroWeightsGiveConstantPath) {
  const auto m = three_var_double();
  const auto w = table_from({0, 0, 0});
  const auto path = solution_path(m, w, {0.0, 1.0, 5.0}, 0.0);
  for (const auto& b : path.betas) EXPECT_LE((b - path.betas[0]).norm(), 1e-10);
  const auto one = solution_path(m, w, {2.0}, 0.0);
  EXPECT_EQ(one.fits.size(), 1u);
}

TEST(Path, ContinuityUnderRefinement) {
  const auto m = three_var_double();
  const auto w = weight_table(m, 1);
  auto max_jump = [&](int n) {
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(4.0 * i / n);
    const auto path = solution_path(m, w, g, 0.0);
    double jump = 0;
    for (int i = 0; i < n; ++i) jump = std::max(jump, (path.betas[i + 1] - path.betas[i]).lpNorm<Eigen::Infinity>());
    return jump;
  };
  EXPECT_LT(max_jump(400), 0.5 * max_jump(20));
}

TEST(Uncertainty, SolutionLiesInThetaGamma) {
  const auto m = three_var_double();
  const auto w = weight_table(m, 1);
  for (double g : {0.1, 0.4, 2.0, 5.0}) {
    const auto fit = solve(m, w, g, 0.0);
    for (double s : uncertainty_membership(fit.beta, m, w, g)) EXPECT_GE(s, -1e-8);
  }
  // beta = 0 is outside Theta_gamma for small gamma: |u_j| exceeds the radius.
  const auto slack = uncertainty_membership(Eigen::VectorXd::Zero(3), m, w, 0.1);
  EXPECT_LT(slack[0], 0.0);
}

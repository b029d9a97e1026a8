#pragma once

#include <cstdint>
#include <vector>

#include "igr/dataset.hpp"
#include "igr/scm.hpp"
#include "igr/solver.hpp"
#include "igr/variation.hpp"

namespace igr {

std::vector<double> default_gamma_grid();   // {0} u {2^i : i = -5..5}
std::vector<double> default_lambda_grid();  // {0} u {2^i : i = -10..0}

struct GridConfig {
  int k = 2;
  std::vector<double> gammas = default_gamma_grid();
  std::vector<double> lambdas = default_lambda_grid();
  bool normalize = true;
  bool center = true;
  WeightConvention convention = WeightConvention::squared;
  SolveOptions solver;
  int threads = 1;

  void validate() const;  // throws ValidationError
};

struct GridCell {
  double gamma = 0.0;
  double lambda = 0.0;
  double validation_loss = 0.0;  // mean squared error on the validation set
  double kkt = 0.0;
  bool converged = false;
  Eigen::VectorXd beta;  // original data scale
};

struct FitReport {
  GridConfig config;
  double gamma = 0.0;
  double lambda = 0.0;
  std::size_t selected = 0;  // index into cells
  Eigen::VectorXd beta;      // original data scale
  Eigen::VectorXd beta_internal;  // scale used by the solver
  WeightTable weights;
  std::vector<GridCell> cells;  // gamma-major, both grids in the given order
  double validation_loss = 0.0;
  // Filled by evaluate().
  std::vector<std::string> test_ids;
  std::vector<double> test_mse;
  double worst_case_r2 = 0.0;
  bool has_test = false;
  double weights_ms = 0.0, grid_ms = 0.0, total_ms = 0.0;
};

/// Weights once on the training data, every (gamma, lambda) cell solved, the
/// cell with the smallest validation loss selected (ties: smaller gamma, then
/// smaller lambda).
FitReport igr_fit(const MultiEnvDataset& train, const Environment& valid, const GridConfig& cfg = {});

/// Several validation environments: losses are averaged across them.
FitReport igr_fit(const MultiEnvDataset& train, const std::vector<Environment>& valid, const GridConfig& cfg = {});

void evaluate(FitReport& report, const std::vector<Environment>& tests);

/// Sum of squared residuals. With `center`, X and Y are centered by their own means.
double mse(const Eigen::VectorXd& beta, const Environment& env, bool center = true);

/// Multi-target form: sum_i ||Y_i - B' x_i||^2 for B of size d x q.
double mse(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// min_e 1 - sum (Y - Yhat)^2 / sum Y^2.
double worst_case_r2(const Eigen::VectorXd& beta, const std::vector<Environment>& tests, bool center = true);

struct RateConfig {
  int k = 1;
  double gamma = 1.0;
  double lambda = 0.0;
  std::vector<long> n_grid{250, 1000, 4000};
  int seeds = 20;
  std::uint64_t base_seed = 1;
  bool center = false;
  WeightConvention convention = WeightConvention::squared;
};

struct RateTable {
  Eigen::VectorXd target;  // population beta^{k,gamma}
  std::vector<long> n_grid;
  std::vector<std::vector<double>> errors;  // [n][seed]
  std::vector<double> medians;
  double slope = 0.0;  // least-squares slope of log median against log n
  bool monotone = false;
};

RateTable rate_experiment(const LinearScm<double>& scm, const RateConfig& cfg);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace igr

#pragma once

#include <vector>

#include "igr/env_moments.hpp"
#include "igr/variation.hpp"

namespace igr {

enum class CycleOrder { cyclic, reverse, random };

struct SolveOptions {
  double tol = 1e-10;       // stop when the largest coordinate change falls below this
  double kkt_tol = 1e-6;    // certificate threshold for `converged`
  long max_sweeps = 100000;
  CycleOrder order = CycleOrder::cyclic;
  unsigned seed = 0;        // used by CycleOrder::random
  double support_threshold = 1e-10;
  bool refine = true;       // active-set polish after coordinate descent
};

struct IgrFit {
  Eigen::VectorXd beta;
  IndexSet support;
  int k = 0;
  double gamma = 0.0;
  double lambda = 0.0;
  double objective = 0.0;
  double kkt = 0.0;
  long sweeps = 0;
  bool converged = false;
  WeightConvention convention = WeightConvention::squared;
  double wall_ms = 0.0;
};

/// p_j = gamma * sqrt(v_j) + lambda. Coordinates with undefined weight get +inf
/// when gamma > 0, which pins them at zero.
Eigen::VectorXd penalty_vector(const WeightTable& w, double gamma, double lambda);

/// 1/2 b'Sb - b'u + 1/2 mean_sq_y + sum_j p_j |b_j|.
double quadratic_objective(const Eigen::VectorXd& beta, const Mat<double>& sigma, const Vec<double>& u,
                           const Eigen::VectorXd& p, double mean_sq_y);

/// Largest violation of the subgradient optimality conditions.
double kkt_residual(const Eigen::VectorXd& beta, const Mat<double>& sigma, const Vec<double>& u,
                    const Eigen::VectorXd& p);

/// Cyclic coordinate descent with soft-thresholding for the weighted lasso
///   min 1/2 b'Sb - b'u + sum_j p_j |b_j|.
IgrFit solve_weighted_lasso(const Mat<double>& sigma, const Vec<double>& u, const Eigen::VectorXd& p,
                            const SolveOptions& opts = {}, const Eigen::VectorXd* warm_start = nullptr,
                            double mean_sq_y = 0.0);

double objective(const Eigen::VectorXd& beta, const EnvMomentSet<double>& m, const WeightTable& w, double gamma,
                 double lambda, double mean_sq_y);

IgrFit solve(const EnvMomentSet<double>& m, const WeightTable& w, double gamma, double lambda,
             const SolveOptions& opts = {}, const Eigen::VectorXd* warm_start = nullptr);

double kkt_residual(const Eigen::VectorXd& beta, const EnvMomentSet<double>& m, const WeightTable& w, double gamma,
                    double lambda);

struct SolutionPath {
  std::vector<double> gammas;  // ascending
  std::vector<Eigen::VectorXd> betas;
  std::vector<IgrFit> fits;
  /// Smallest grid gamma from which the support equals the support at the largest gamma.
  double identification_gamma = 0.0;
  /// Per coordinate, smallest grid gamma from which beta_j stays zero; +inf if
  /// nonzero at the largest gamma.
  std::vector<double> zero_from_gamma;
};

/// Warm-started solves, descending from the largest gamma.
SolutionPath solution_path(const EnvMomentSet<double>& m, const WeightTable& w, const std::vector<double>& gamma_grid,
                           double lambda, const SolveOptions& opts = {});

/// gamma * sqrt(v_j) - |(Sigma b - u)_j|; all nonnegative iff b lies in Theta_gamma.
std::vector<double> uncertainty_membership(const Eigen::VectorXd& beta, const EnvMomentSet<double>& m,
                                           const WeightTable& w, double gamma);

}  // namespace igr

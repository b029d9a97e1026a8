#include "igr/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace igr {

namespace {

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

double mean_sq_y_or_zero(const EnvMomentSet<double>& m) { return m.has_mean_sq_y() ? m.pooled_mean_sq_y() : 0.0; }

void check_dims(const Eigen::VectorXd& beta, int d) {
  if (beta.size() != d) throw ValidationError("beta has dimension " + std::to_string(beta.size()) + ", expected " +
                                              std::to_string(d));
}

/// Solves the active-set system with fixed signs and keeps the result if it
/// is sign-consistent and at least as optimal as the coordinate-descent iterate.
void refine_active_set(Eigen::VectorXd& beta, const Mat<double>& sigma, const Vec<double>& u,
                       const Eigen::VectorXd& p) {
  IndexSet active;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) active.push_back(static_cast<int>(j));
  if (active.empty()) return;
  Vec<double> rhs = subvector<double>(u, active);
  for (std::size_t a = 0; a < active.size(); ++a)
    rhs(static_cast<Eigen::Index>(a)) -= p(active[a]) * (beta(active[a]) > 0 ? 1.0 : -1.0);
  auto sol = solve_linear<double>(principal_submatrix<double>(sigma, active), rhs);
  if (!sol) return;
  Eigen::VectorXd cand = Eigen::VectorXd::Zero(beta.size());
  for (std::size_t a = 0; a < active.size(); ++a) {
    const double v = (*sol)(static_cast<Eigen::Index>(a));
    if (v == 0.0 || (v > 0) != (beta(active[a]) > 0)) return;
    cand(active[a]) = v;
  }
  if (kkt_residual(cand, sigma, u, p) <= kkt_residual(beta, sigma, u, p)) beta = cand;
}

}  // namespace

Eigen::VectorXd penalty_vector(const WeightTable& w, double gamma, double lambda) {
  if (gamma < 0 || lambda < 0) throw ValidationError("gamma and lambda must be nonnegative");
  Eigen::VectorXd p(w.d());
  for (int j = 0; j < w.d(); ++j) {
    if (gamma == 0.0) {
      p(j) = lambda;
    } else if (!w.defined[static_cast<std::size_t>(j)]) {
      p(j) = std::numeric_limits<double>::infinity();
    } else {
      p(j) = gamma * w.penalty_weight(j) + lambda;
    }
  }
  return p;
}

double quadratic_objective(const Eigen::VectorXd& beta, const Mat<double>& sigma, const Vec<double>& u,
                           const Eigen::VectorXd& p, double mean_sq_y) {
  double pen = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j)
    if (beta(j) != 0.0) pen += p(j) * std::abs(beta(j));
  return 0.5 * beta.dot(sigma * beta) - beta.dot(u) + 0.5 * mean_sq_y + pen;
}

double kkt_residual(const Eigen::VectorXd& beta, const Mat<double>& sigma, const Vec<double>& u,
                    const Eigen::VectorXd& p) {
  const Eigen::VectorXd g = sigma * beta - u;
  double r = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) {
      r = std::max(r, std::abs(g(j) + p(j) * (beta(j) > 0 ? 1.0 : -1.0)));
    } else {
      r = std::max(r, std::max(0.0, std::abs(g(j)) - p(j)));
    }
  }
  return r;
}

IgrFit solve_weighted_lasso(const Mat<double>& sigma, const Vec<double>& u, const Eigen::VectorXd& p,
                            const SolveOptions& opts, const Eigen::VectorXd* warm_start, double mean_sq_y) {
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index d = u.size();
  if (sigma.rows() != d || sigma.cols() != d || p.size() != d) throw ValidationError("solver inputs have mismatched dimensions");
  if ((p.array() < 0).any()) throw ValidationError("penalty levels must be nonnegative");
  const auto cls = classify_symmetric(sigma);
  if (cls == Definiteness::indefinite) throw NumericalError("pooled Sigma is indefinite");
  if (cls != Definiteness::positive_definite && (p.array() <= 0).any())
    throw ValidationError("pooled Sigma is singular; a positive lambda is required");

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  if (warm_start) {
    check_dims(*warm_start, static_cast<int>(d));
    beta = *warm_start;
    for (Eigen::Index j = 0; j < d; ++j)
      if (std::isinf(p(j))) beta(j) = 0.0;
  }
  Eigen::VectorXd g = sigma * beta - u;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (opts.order == CycleOrder::reverse) std::reverse(order.begin(), order.end());
  std::mt19937_64 rng(opts.seed);

  IgrFit fit;
  long sweep = 0;
  bool converged = false;
  while (sweep < opts.max_sweeps) {
    if (opts.order == CycleOrder::random) std::shuffle(order.begin(), order.end(), rng);
    ++sweep;
    double max_delta = 0.0;
    for (Eigen::Index j : order) {
      const double sjj = sigma(j, j);
      double next = 0.0;
      if (sjj > 0.0 && !std::isinf(p(j))) next = soft_threshold(sjj * beta(j) - g(j), p(j)) / sjj;
      const double delta = next - beta(j);
      if (delta != 0.0) {
        g.noalias() += sigma.col(j) * delta;
        beta(j) = next;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    if (!beta.allFinite()) throw NumericalError("coordinate descent diverged");
    if (max_delta < opts.tol) {
      converged = true;
      break;
    }
  }
  if (opts.refine) refine_active_set(beta, sigma, u, p);

  fit.beta = beta;
  fit.sweeps = sweep;
  fit.kkt = kkt_residual(beta, sigma, u, p);
  fit.converged = converged && fit.kkt <= opts.kkt_tol;
  fit.objective = quadratic_objective(beta, sigma, u, p, mean_sq_y);
  for (Eigen::Index j = 0; j < d; ++j)
    if (std::abs(beta(j)) > opts.support_threshold) fit.support.push_back(static_cast<int>(j));
  fit.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return fit;
}

double objective(const Eigen::VectorXd& beta, const EnvMomentSet<double>& m, const WeightTable& w, double gamma,
                 double lambda, double mean_sq_y) {
  check_dims(beta, m.d());
  return quadratic_objective(beta, m.pooled_sigma, m.pooled_u, penalty_vector(w, gamma, lambda), mean_sq_y);
}

IgrFit solve(const EnvMomentSet<double>& m, const WeightTable& w, double gamma, double lambda,
             const SolveOptions& opts, const Eigen::VectorXd* warm_start) {
  if (w.d() != m.d()) throw ValidationError("weight table dimension does not match the moments");
  auto fit = solve_weighted_lasso(m.pooled_sigma, m.pooled_u, penalty_vector(w, gamma, lambda), opts, warm_start,
                                  mean_sq_y_or_zero(m));
  fit.k = w.k;
  fit.gamma = gamma;
  fit.lambda = lambda;
  fit.convention = w.convention;
  return fit;
}

double kkt_residual(const Eigen::VectorXd& beta, const EnvMomentSet<double>& m, const WeightTable& w, double gamma,
                    double lambda) {
  check_dims(beta, m.d());
  return kkt_residual(beta, m.pooled_sigma, m.pooled_u, penalty_vector(w, gamma, lambda));
}

SolutionPath solution_path(const EnvMomentSet<double>& m, const WeightTable& w, const std::vector<double>& gamma_grid,
                           double lambda, const SolveOptions& opts) {
  if (gamma_grid.empty()) throw ValidationError("gamma grid is empty");
  if (!std::is_sorted(gamma_grid.begin(), gamma_grid.end())) throw ValidationError("gamma grid must be ascending");
  SolutionPath path;
  path.gammas = gamma_grid;
  const std::size_t n = gamma_grid.size();
  path.fits.resize(n);
  path.betas.resize(n);
  Eigen::VectorXd warm = Eigen::VectorXd::Zero(m.d());
  for (std::size_t i = n; i-- > 0;) {
    path.fits[i] = solve(m, w, gamma_grid[i], lambda, opts, &warm);
    path.betas[i] = path.fits[i].beta;
    warm = path.betas[i];
  }

  const IndexSet limit = path.fits.back().support;
  path.identification_gamma = gamma_grid.back();
  for (std::size_t i = n; i-- > 0;) {
    if (path.fits[i].support != limit) break;
    path.identification_gamma = gamma_grid[i];
  }
  path.zero_from_gamma.assign(static_cast<std::size_t>(m.d()), std::numeric_limits<double>::infinity());
  for (int j = 0; j < m.d(); ++j) {
    for (std::size_t i = n; i-- > 0;) {
      if (std::abs(path.betas[i](j)) > opts.support_threshold) break;
      path.zero_from_gamma[static_cast<std::size_t>(j)] = gamma_grid[i];
    }
  }
  return path;
}

std::vector<double> uncertainty_membership(const Eigen::VectorXd& beta, const EnvMomentSet<double>& m,
                                           const WeightTable& w, double gamma) {
  check_dims(beta, m.d());
  const Eigen::VectorXd g = m.pooled_sigma * beta - m.pooled_u;
  std::vector<double> slack(static_cast<std::size_t>(m.d()));
  for (int j = 0; j < m.d(); ++j) {
    const double radius = w.defined[static_cast<std::size_t>(j)] ? gamma * w.penalty_weight(j)
                                                                 : std::numeric_limits<double>::infinity();
    slack[static_cast<std::size_t>(j)] = radius - std::abs(g(j));
  }
  return slack;
}

}  // namespace igr

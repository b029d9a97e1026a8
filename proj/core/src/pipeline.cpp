#include "igr/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

namespace igr {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void check_grid(const std::vector<double>& g, const char* name) {
  if (g.empty()) throw ValidationError(std::string(name) + " grid is empty");
  for (double v : g)
    if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " grid values must be finite and >= 0");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return std::numeric_limits<double>::quiet_NaN();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<double> default_gamma_grid() {
  std::vector<double> g{0.0};
  for (int i = -5; i <= 5; ++i) g.push_back(std::ldexp(1.0, i));
  return g;
}

std::vector<double> default_lambda_grid() {
  std::vector<double> g{0.0};
  for (int i = -10; i <= 0; ++i) g.push_back(std::ldexp(1.0, i));
  return g;
}

void GridConfig::validate() const {
  if (k < 1) throw ValidationError("k must be >= 1");
  check_grid(gammas, "gamma");
  check_grid(lambdas, "lambda");
  if (threads < 1) throw ValidationError("threads must be >= 1");
}

double mse(const Eigen::VectorXd& beta, const Environment& env, bool center) {
  if (beta.size() != env.x.cols())
    throw ValidationError("coefficient dimension " + std::to_string(beta.size()) + " does not match data dimension " +
                          std::to_string(env.x.cols()));
  Eigen::VectorXd r = env.y - env.x * beta;
  if (center && env.x.rows() > 0) r.array() -= r.mean();  // same as centering X and Y separately
  return r.squaredNorm();
}

double mse(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (beta.rows() != x.cols() || beta.cols() != y.cols() || x.rows() != y.rows())
    throw ValidationError("multi-target dimensions do not match");
  return (y - x * beta).squaredNorm();
}

double worst_case_r2(const Eigen::VectorXd& beta, const std::vector<Environment>& tests, bool center) {
  if (tests.empty()) throw ValidationError("at least one test environment is required");
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& env : tests) {
    Eigen::VectorXd y = env.y;
    if (center && y.size() > 0) y.array() -= y.mean();
    const double denom = y.squaredNorm();
    if (denom == 0.0) throw ValidationError("environment '" + env.id + "' has an all-zero response");
    worst = std::min(worst, 1.0 - mse(beta, env, center) / denom);
  }
  return worst;
}

FitReport igr_fit(const MultiEnvDataset& train, const Environment& valid, const GridConfig& cfg) {
  return igr_fit(train, std::vector<Environment>{valid}, cfg);
}

FitReport igr_fit(const MultiEnvDataset& train, const std::vector<Environment>& valid, const GridConfig& cfg) {
  const auto t0 = Clock::now();
  cfg.validate();
  if (valid.empty()) throw ValidationError("validation set is empty");
  for (const auto& v : valid) {
    if (v.x.rows() == 0) throw ValidationError("validation environment '" + v.id + "' has no rows");
    if (v.x.cols() != train.d()) throw ValidationError("validation data dimension does not match training data");
  }

  FitReport rep;
  rep.config = cfg;
  MomentOptions mo;
  mo.center = cfg.center;
  mo.normalize = cfg.normalize;
  const auto m = moments_from_samples(train, mo);
  rep.weights = weight_table(m, std::min(cfg.k, m.d()), cfg.convention, cfg.threads);
  rep.weights_ms = ms_since(t0);

  const auto t1 = Clock::now();
  const std::size_t ng = cfg.gammas.size(), nl = cfg.lambdas.size();
  rep.cells.resize(ng * nl);
  std::vector<Eigen::VectorXd> internal(ng * nl);

  // One lambda column per task; within a column gamma descends with warm starts.
  std::vector<std::size_t> order(ng);
  for (std::size_t i = 0; i < ng; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return cfg.gammas[a] > cfg.gammas[b]; });
  auto column = [&](std::size_t l) {
    Eigen::VectorXd warm;
    for (std::size_t gi : order) {
      auto& cell = rep.cells[gi * nl + l];
      cell.gamma = cfg.gammas[gi];
      cell.lambda = cfg.lambdas[l];
      try {
        const IgrFit fit = solve(m, rep.weights, cell.gamma, cell.lambda, cfg.solver, warm.size() ? &warm : nullptr);
        warm = fit.beta;
        internal[gi * nl + l] = fit.beta;
        cell.kkt = fit.kkt;
        cell.converged = fit.converged;
        cell.beta = fit.beta.cwiseQuotient(m.scale);
        double loss = 0.0;
        for (const auto& v : valid) loss += mse(cell.beta, v, cfg.center) / static_cast<double>(v.x.rows());
        cell.validation_loss = loss / static_cast<double>(valid.size());
      } catch (const ValidationError&) {
        // Ill-posed cell (singular Sigma without penalty): never selected.
        cell.validation_loss = std::numeric_limits<double>::infinity();
        cell.beta = Eigen::VectorXd::Zero(m.d());
        internal[gi * nl + l] = cell.beta;
      }
    }
  };
  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), nl);
  if (nthreads <= 1) {
    for (std::size_t l = 0; l < nl; ++l) column(l);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t l = t; l < nl; l += nthreads) column(l);
      });
    for (auto& th : pool) th.join();
  }
  rep.grid_ms = ms_since(t1);

  std::size_t best = rep.cells.size();
  for (std::size_t i = 0; i < rep.cells.size(); ++i) {
    const auto& c = rep.cells[i];
    if (!std::isfinite(c.validation_loss)) continue;
    if (best == rep.cells.size()) {
      best = i;
      continue;
    }
    const auto& b = rep.cells[best];
    if (c.validation_loss < b.validation_loss ||
        (c.validation_loss == b.validation_loss &&
         (c.gamma < b.gamma || (c.gamma == b.gamma && c.lambda < b.lambda))))
      best = i;
  }
  if (best == rep.cells.size()) throw NumericalError("no grid cell produced a finite validation loss");
  rep.selected = best;
  rep.gamma = rep.cells[best].gamma;
  rep.lambda = rep.cells[best].lambda;
  rep.beta = rep.cells[best].beta;
  rep.beta_internal = internal[best];
  rep.validation_loss = rep.cells[best].validation_loss;
  rep.total_ms = ms_since(t0);
  return rep;
}

void evaluate(FitReport& report, const std::vector<Environment>& tests) {
  report.test_ids.clear();
  report.test_mse.clear();
  for (const auto& t : tests) {
    report.test_ids.push_back(t.id);
    report.test_mse.push_back(mse(report.beta, t, report.config.center));
  }
  report.worst_case_r2 = worst_case_r2(report.beta, tests, report.config.center);
  report.has_test = true;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope needs at least two points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RateTable rate_experiment(const LinearScm<double>& scm, const RateConfig& cfg) {
  if (cfg.n_grid.empty() || !std::is_sorted(cfg.n_grid.begin(), cfg.n_grid.end()))
    throw ValidationError("n_grid must be nonempty and ascending");
  if (cfg.seeds < 1) throw ValidationError("seeds must be >= 1");
  const auto oracle = population_moments(scm);
  const auto wpop = weight_table(oracle.moments, cfg.k, cfg.convention);
  RateTable out;
  out.target = solve(oracle.moments, wpop, cfg.gamma, cfg.lambda).beta;
  out.n_grid = cfg.n_grid;
  MomentOptions mo;
  mo.center = cfg.center;
  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const long n = cfg.n_grid[ni];
    std::vector<double> errs;
    for (int s = 0; s < cfg.seeds; ++s) {
      // Independent draws per sample size: a fixed stride keeps seeds distinct across n.
      const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(s) + 0x9E3779B97F4A7C15ULL * ni;
      const auto data = sample(scm, n, seed);
      const auto m = moments_from_samples(data, mo);
      const auto w = weight_table(m, cfg.k, cfg.convention);
      errs.push_back((solve(m, w, cfg.gamma, cfg.lambda).beta - out.target).norm());
    }
    out.medians.push_back(median(errs));
    out.errors.push_back(std::move(errs));
  }
  out.monotone = true;
  for (std::size_t i = 1; i < out.medians.size(); ++i)
    if (!(out.medians[i] < out.medians[i - 1])) out.monotone = false;
  if (out.n_grid.size() >= 2) {
    std::vector<double> xs(out.n_grid.begin(), out.n_grid.end());
    out.slope = log_log_slope(xs, out.medians);
  }
  return out;
}

}  // namespace igr

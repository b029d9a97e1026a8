#pragma once

#include <optional>
#include <string>
#include <vector>

#include "igr/dataset.hpp"
#include "igr/error.hpp"
#include "igr/index_set.hpp"
#include "igr/linalg.hpp"

namespace igr {

/// Per-environment second moments Sigma^(e) = E[X X^T], u^(e) = E[X Y] and
/// their equal-weight pooled averages.
template <class T>
struct EnvMomentSet {
  std::vector<Mat<T>> sigma;
  std::vector<Vec<T>> u;
  Mat<T> pooled_sigma;
  Vec<T> pooled_u;
  std::vector<long> sample_sizes;  // 0 for population moments
  std::vector<bool> positive_definite;
  bool pooled_positive_definite = false;
  std::vector<T> mean_sq_y;  // per-environment E[Y^2]; empty when unknown

  // Preprocessing record, only meaningful for sample moments.
  Eigen::VectorXd scale;  // covariate j was divided by scale(j)
  std::vector<Eigen::VectorXd> x_means;
  std::vector<double> y_means;

  int d() const { return static_cast<int>(pooled_u.size()); }
  int num_envs() const { return static_cast<int>(sigma.size()); }
  bool has_mean_sq_y() const { return !mean_sq_y.empty(); }
  T pooled_mean_sq_y() const {
    T acc(0);
    for (const auto& v : mean_sq_y) acc += v;
    return acc / T(num_envs());
  }
};

/// Builds a moment set from per-environment matrices, computing pooled
/// moments and positive-definiteness flags.
template <class T>
EnvMomentSet<T> make_moment_set(std::vector<Mat<T>> sigma, std::vector<Vec<T>> u, std::vector<T> mean_sq_y = {}) {
  if (sigma.empty()) throw ValidationError("at least one environment is required");
  if (sigma.size() != u.size()) throw ValidationError("sigma and u have different environment counts");
  if (!mean_sq_y.empty() && mean_sq_y.size() != sigma.size())
    throw ValidationError("mean_sq_y must have one entry per environment");
  const Eigen::Index d = u[0].size();
  if (d < 1) throw ValidationError("dimension must be positive");
  EnvMomentSet<T> m;
  m.pooled_sigma = Mat<T>::Constant(d, d, T(0));
  m.pooled_u = Vec<T>::Constant(d, T(0));
  for (std::size_t e = 0; e < sigma.size(); ++e) {
    if (sigma[e].rows() != d || sigma[e].cols() != d || u[e].size() != d)
      throw ValidationError("environment " + std::to_string(e + 1) + " has inconsistent dimensions");
    if (!is_symmetric(sigma[e], 1e-9))
      throw ValidationError("Sigma of environment " + std::to_string(e + 1) + " is not symmetric");
    m.pooled_sigma += sigma[e];
    m.pooled_u += u[e];
    m.positive_definite.push_back(classify_symmetric(sigma[e]) == Definiteness::positive_definite);
  }
  const T n_env(static_cast<int>(sigma.size()));
  for (Eigen::Index i = 0; i < d; ++i) {
    m.pooled_u(i) /= n_env;
    for (Eigen::Index j = 0; j < d; ++j) m.pooled_sigma(i, j) /= n_env;
  }
  m.pooled_positive_definite = classify_symmetric(m.pooled_sigma) == Definiteness::positive_definite;
  m.sample_sizes.assign(sigma.size(), 0);
  m.sigma = std::move(sigma);
  m.u = std::move(u);
  m.mean_sq_y = std::move(mean_sq_y);
  m.scale = Eigen::VectorXd::Ones(d);
  return m;
}

template <class U, class T>
EnvMomentSet<U> convert_moments(const EnvMomentSet<T>& m) {
  std::vector<Mat<U>> s;
  std::vector<Vec<U>> u;
  std::vector<U> y2;
  for (int e = 0; e < m.num_envs(); ++e) {
    s.push_back(cast_matrix<U>(m.sigma[e]));
    u.push_back(cast_vector<U>(m.u[e]));
  }
  for (const auto& v : m.mean_sq_y) {
    if constexpr (std::is_same_v<U, double>) y2.push_back(to_double(v));
    else y2.push_back(U(v));
  }
  auto out = make_moment_set<U>(std::move(s), std::move(u), std::move(y2));
  out.sample_sizes = m.sample_sizes;
  out.scale = m.scale;
  out.x_means = m.x_means;
  out.y_means = m.y_means;
  return out;
}

struct MomentOptions {
  bool center = true;     // subtract per-environment means first
  bool normalize = false; // rescale so the pooled Sigma has unit diagonal
};

/// Sample moments with equal 1/|E| pooling regardless of n_e.
EnvMomentSet<double> moments_from_samples(const MultiEnvDataset& data, const MomentOptions& opts = {});

/// Least-squares coefficients restricted to S, per environment and pooled.
/// Vectors are full length d with zeros outside S.
template <class T>
struct RestrictedCoef {
  IndexSet set;
  std::vector<Vec<T>> env_beta;
  Vec<T> pooled_beta;
};

/// Solves Sigma_S beta_S = u_S. Throws SingularMatrixError naming the environment.
template <class T>
Vec<T> restricted_solve(const Mat<T>& sigma, const Vec<T>& u, const IndexSet& s, int env_index) {
  const Eigen::Index d = u.size();
  if (s.empty()) return Vec<T>::Constant(d, T(0));
  auto sol = solve_linear<T>(principal_submatrix(sigma, s), subvector(u, s));
  if (!sol) {
    const std::string where = env_index < 0 ? "pooled" : "environment " + std::to_string(env_index + 1);
    throw SingularMatrixError(env_index, "Sigma_S is singular for S=" + format_set(s) + " (" + where + ")");
  }
  return scatter(*sol, s, d);
}

template <class T>
RestrictedCoef<T> restricted_ls(const EnvMomentSet<T>& m, const IndexSet& s_in) {
  RestrictedCoef<T> out;
  out.set = normalize_set(s_in);
  for (int j : out.set)
    if (j < 0 || j >= m.d()) throw ValidationError("index " + std::to_string(j + 1) + " out of range");
  for (int e = 0; e < m.num_envs(); ++e) out.env_beta.push_back(restricted_solve(m.sigma[e], m.u[e], out.set, e));
  out.pooled_beta = restricted_solve(m.pooled_sigma, m.pooled_u, out.set, -1);
  return out;
}

/// 1/2 b' Sigma b - b' u + 1/2 mean_sq_y with pooled moments.
template <class T>
T pooled_risk(const Vec<T>& beta, const EnvMomentSet<T>& m, const T& mean_sq_y) {
  if (beta.size() != m.d()) throw ValidationError("beta has wrong dimension");
  const Vec<T> sb = m.pooled_sigma * beta;
  T quad(0), lin(0);
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    quad += beta(i) * sb(i);
    lin += beta(i) * m.pooled_u(i);
  }
  const T half = T(1) / T(2);
  return half * quad - lin + half * mean_sq_y;
}

}  // namespace igr

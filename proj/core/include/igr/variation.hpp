#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "igr/env_moments.hpp"

namespace igr {

/// v(S) = (1/|E|) sum_e || beta^(e,S) - beta^(S) ||^2_{Sigma^(e)}, on the squared scale.
template <class T>
T prediction_variation(const EnvMomentSet<T>& m, const IndexSet& s) {
  const auto coef = restricted_ls(m, s);
  T acc(0);
  for (int e = 0; e < m.num_envs(); ++e) {
    const Vec<T> diff = coef.env_beta[e] - coef.pooled_beta;
    const Vec<T> sd = m.sigma[e] * diff;
    for (Eigen::Index i = 0; i < diff.size(); ++i) acc += diff(i) * sd(i);
  }
  return acc / T(m.num_envs());
}

/// Same quantity through the residual moments r_e = u_S^(e) - Sigma_S^(e) beta^(S):
/// v(S) = (1/|E|) sum_e r_e' (Sigma_S^(e))^{-1} r_e.
template <class T>
T prediction_variation_residual(const EnvMomentSet<T>& m, const IndexSet& s_in) {
  const IndexSet s = normalize_set(s_in);
  if (s.empty()) return T(0);
  const Vec<T> pooled = subvector(restricted_solve(m.pooled_sigma, m.pooled_u, s, -1), s);
  T acc(0);
  for (int e = 0; e < m.num_envs(); ++e) {
    const Mat<T> ss = principal_submatrix(m.sigma[e], s);
    const Vec<T> r = subvector(m.u[e], s) - ss * pooled;
    auto x = solve_linear<T>(ss, r);
    if (!x) throw SingularMatrixError(e, "Sigma_S is singular for S=" + format_set(s));
    for (Eigen::Index i = 0; i < r.size(); ++i) acc += r(i) * (*x)(i);
  }
  return acc / T(m.num_envs());
}

enum class WeightConvention { sqrt, squared };

inline const char* to_string(WeightConvention c) { return c == WeightConvention::sqrt ? "sqrt" : "squared"; }
WeightConvention parse_convention(const std::string& s);

struct SubsetVariation {
  IndexSet set;
  double v = 0.0;  // squared scale; +inf when singular
  bool singular = false;
  std::string exact;  // exact rendering for exact backends
};

/// w_k(j) = min over S containing j with |S| <= k of v(S).
struct WeightTable {
  int k = 1;
  WeightConvention convention = WeightConvention::squared;
  std::vector<double> v;  // minimum v(S), squared scale; +inf when undefined
  std::vector<double> w;  // v or sqrt(v) according to `convention`
  std::vector<std::string> v_exact;  // exact minimum per j for exact backends
  std::vector<IndexSet> argmin_sets;
  std::vector<bool> defined;
  std::vector<int> singular_skips;
  std::vector<SubsetVariation> cache;  // every S with |S| <= k, lexicographic order

  int d() const { return static_cast<int>(v.size()); }
  /// Weight multiplying |beta_j| in the penalty: always sqrt(v_j).
  double penalty_weight(int j) const { return std::sqrt(v[static_cast<std::size_t>(j)]); }
  Eigen::VectorXd penalty_weights() const {
    Eigen::VectorXd p(d());
    for (int j = 0; j < d(); ++j) p(j) = penalty_weight(j);
    return p;
  }
};

/// All S with 1 <= |S| <= k in lexicographic order ({1},{1,2},{1,2,3},{1,3},{2},...).
std::vector<IndexSet> subsets_up_to(int d, int k);

template <class T>
WeightTable weight_table(const EnvMomentSet<T>& m, int k, WeightConvention convention = WeightConvention::squared,
                         int threads = 1) {
  const int d = m.d();
  if (k < 1 || k > d) throw ValidationError("budget k must satisfy 1 <= k <= d (k=" + std::to_string(k) + ")");
  const auto sets = subsets_up_to(d, k);
  std::vector<SubsetVariation> cache(sets.size());
  std::vector<T> exact_vals(ScalarTraits<T>::is_exact ? sets.size() : 0);

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      cache[i].set = sets[i];
      try {
        const T v = prediction_variation(m, sets[i]);
        cache[i].v = std::max(0.0, to_double(v));
        if constexpr (ScalarTraits<T>::is_exact) {
          exact_vals[i] = v;
          cache[i].exact = v.str();
          if (is_zero(v)) cache[i].v = 0.0;
        }
      } catch (const SingularMatrixError&) {
        cache[i].singular = true;
        cache[i].v = std::numeric_limits<double>::infinity();
      }
    }
  };
  const std::size_t nthreads = static_cast<std::size_t>(std::max(1, threads));
  if (nthreads == 1 || sets.size() < 64) {
    work(0, sets.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (sets.size() + nthreads - 1) / nthreads;
    for (std::size_t t = 0; t < nthreads; ++t) {
      const std::size_t b = t * chunk, e = std::min(sets.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }

  WeightTable table;
  table.k = k;
  table.convention = convention;
  table.v.assign(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
  table.v_exact.assign(static_cast<std::size_t>(d), "");
  table.argmin_sets.assign(static_cast<std::size_t>(d), {});
  table.defined.assign(static_cast<std::size_t>(d), false);
  table.singular_skips.assign(static_cast<std::size_t>(d), 0);

  // Ordered exact backends compare exact values so ties resolve exactly.
  std::vector<std::size_t> best_index(static_cast<std::size_t>(d), 0);
  for (std::size_t i = 0; i < cache.size(); ++i) {
    const auto& c = cache[i];
    for (int j : c.set) {
      const auto ju = static_cast<std::size_t>(j);
      if (c.singular) {
        ++table.singular_skips[ju];
        continue;
      }
      bool better = !table.defined[ju] || c.v < table.v[ju];
      if constexpr (ScalarTraits<T>::is_exact && ScalarTraits<T>::is_ordered) {
        if (table.defined[ju]) better = exact_vals[i] < exact_vals[best_index[ju]];
      }
      if (better) {
        best_index[ju] = i;
        table.defined[ju] = true;
        table.v[ju] = c.v;
        table.v_exact[ju] = c.exact;
        table.argmin_sets[ju] = c.set;
      }
    }
  }
  table.w.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    table.w[ju] = convention == WeightConvention::sqrt ? std::sqrt(table.v[ju]) : table.v[ju];
  }
  table.cache = std::move(cache);
  return table;
}

/// kappa = min_e lambda_min(Sigma^(e)); a diagnostic, not used by the solver.
double min_env_eigenvalue(const EnvMomentSet<double>& m);

}  // namespace igr

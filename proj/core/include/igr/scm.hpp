#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "igr/dataset.hpp"
#include "igr/env_moments.hpp"
#include "igr/variation.hpp"

namespace igr {

/// Converts between scalar backends. Narrowing Q(sqrt P, sqrt Q) -> Rational
/// throws when the value is irrational.
template <class U, class T>
U scalar_cast(const T& x) {
  if constexpr (std::is_same_v<U, T>) {
    return x;
  } else if constexpr (std::is_same_v<U, double>) {
    return to_double(x);
  } else if constexpr (std::is_same_v<U, Rational> && !std::is_same_v<T, double>) {
    if (!x.is_rational()) throw ValidationError("value " + x.str() + " is not rational");
    return x.coeff(0);
  } else {
    static_assert(!std::is_same_v<T, double>, "cannot convert floating point to an exact backend");
    return U(x);
  }
}

/// Linear acyclic SCM over p = d+1 variables, one of which is the response.
/// Noise is Gaussian with per-environment variances; the response equation
/// (its coefficients and noise variance) is shared by all environments.
template <class T>
struct LinearScm {
  int p = 0;
  int response = 0;
  std::vector<Mat<T>> coef;              // per env, coef[e](child, parent)
  std::vector<std::vector<T>> noise_var; // per env, per variable
  std::vector<int> topo_order;           // filled by validate()
  IndexSet intervened;                   // covariate indices whose assignment varies
  std::string name;

  int d() const { return p - 1; }
  int num_envs() const { return static_cast<int>(coef.size()); }
  /// Variable index of covariate j (variables skip the response).
  int variable_of(int j) const { return j < response ? j : j + 1; }
  /// Covariate index of a non-response variable.
  int covariate_of(int var) const { return var < response ? var : var - 1; }

  /// Checks shapes, acyclicity and invariance of the response equation, and
  /// computes the topological order.
  void validate();

  template <class U>
  LinearScm<U> convert() const {
    LinearScm<U> out;
    out.p = p;
    out.response = response;
    out.topo_order = topo_order;
    out.intervened = intervened;
    out.name = name;
    for (std::size_t e = 0; e < coef.size(); ++e) {
      Mat<U> c(p, p);
      std::vector<U> nv;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) c(i, j) = scalar_cast<U>(coef[e](i, j));
      for (const auto& v : noise_var[e]) nv.push_back(scalar_cast<U>(v));
      out.coef.push_back(std::move(c));
      out.noise_var.push_back(std::move(nv));
    }
    return out;
  }
};

template <class T>
void LinearScm<T>::validate() {
  if (p < 2) throw ValidationError("an SCM needs at least one covariate and a response");
  if (response < 0 || response >= p) throw ValidationError("response index out of range");
  if (coef.empty() || coef.size() != noise_var.size()) throw ValidationError("SCM needs one coefficient matrix and noise vector per environment");
  std::vector<std::vector<bool>> edge(static_cast<std::size_t>(p), std::vector<bool>(static_cast<std::size_t>(p), false));
  for (std::size_t e = 0; e < coef.size(); ++e) {
    if (coef[e].rows() != p || coef[e].cols() != p || static_cast<int>(noise_var[e].size()) != p)
      throw ValidationError("SCM environment " + std::to_string(e + 1) + " has wrong dimensions");
    for (int c = 0; c < p; ++c)
      for (int q = 0; q < p; ++q)
        if (!is_zero(coef[e](c, q))) {
          if (c == q) throw ValidationError("SCM has a self loop on variable " + std::to_string(c + 1));
          edge[static_cast<std::size_t>(c)][static_cast<std::size_t>(q)] = true;
        }
    for (int q = 0; q < p; ++q)
      if (!(coef[e](response, q) == coef[0](response, q)))
        throw ValidationError("response equation differs in environment " + std::to_string(e + 1));
    if (!(noise_var[e][static_cast<std::size_t>(response)] == noise_var[0][static_cast<std::size_t>(response)]))
      throw ValidationError("response noise differs in environment " + std::to_string(e + 1));
  }
  // Kahn's algorithm, smallest ready index first for a deterministic order.
  std::vector<int> indeg(static_cast<std::size_t>(p), 0);
  for (int c = 0; c < p; ++c)
    for (int q = 0; q < p; ++q)
      if (edge[static_cast<std::size_t>(c)][static_cast<std::size_t>(q)]) ++indeg[static_cast<std::size_t>(c)];
  topo_order.clear();
  std::vector<bool> done(static_cast<std::size_t>(p), false);
  for (int step = 0; step < p; ++step) {
    int next = -1;
    for (int c = 0; c < p && next < 0; ++c)
      if (!done[static_cast<std::size_t>(c)] && indeg[static_cast<std::size_t>(c)] == 0) next = c;
    if (next < 0) throw ValidationError("SCM graph is cyclic");
    done[static_cast<std::size_t>(next)] = true;
    topo_order.push_back(next);
    for (int c = 0; c < p; ++c)
      if (edge[static_cast<std::size_t>(c)][static_cast<std::size_t>(next)]) --indeg[static_cast<std::size_t>(c)];
  }
}

/// Exact population quantities implied by an SCM.
template <class T>
struct ScmOracle {
  EnvMomentSet<T> moments;       // Sigma^(e), u^(e), E[Y^2] per environment
  std::vector<Mat<T>> full_cov;  // covariance of all p variables per environment
  Vec<T> beta_star;
  IndexSet s_star;
  std::vector<Vec<T>> x_eps;     // E[X_j eps^(e)] per environment
  Vec<T> pooled_x_eps;
  IndexSet endogenous;           // G: j outside S* with nonzero pooled E[X_j eps]
};

/// Propagates covariances through the topological order:
/// Z = A n with A = (I - B)^{-1}, Cov(Z) = A diag(noise) A'.
template <class T>
ScmOracle<T> population_moments(LinearScm<T> scm) {
  scm.validate();
  const int p = scm.p, d = scm.d(), r = scm.response;
  ScmOracle<T> o;
  std::vector<Mat<T>> sig;
  std::vector<Vec<T>> u;
  std::vector<T> y2;
  for (int e = 0; e < scm.num_envs(); ++e) {
    const auto& b = scm.coef[static_cast<std::size_t>(e)];
    Mat<T> a = Mat<T>::Constant(p, p, T(0));
    for (int c : scm.topo_order) {
      a(c, c) = T(1);
      for (int q = 0; q < p; ++q)
        if (!is_zero(b(c, q))) a.row(c) += b(c, q) * a.row(q);
    }
    Mat<T> an = a;
    for (int q = 0; q < p; ++q) an.col(q) *= scm.noise_var[static_cast<std::size_t>(e)][static_cast<std::size_t>(q)];
    const Mat<T> k = an * a.transpose();
    Mat<T> s(d, d);
    Vec<T> ue(d), xe(d);
    for (int i = 0; i < d; ++i) {
      const int vi = scm.variable_of(i);
      for (int j = 0; j < d; ++j) s(i, j) = k(vi, scm.variable_of(j));
      ue(i) = k(vi, r);
      xe(i) = an(vi, r);  // Cov(Z_vi, n_r) = A(vi, r) * noise_r
    }
    sig.push_back(s);
    u.push_back(ue);
    y2.push_back(k(r, r));
    o.full_cov.push_back(k);
    o.x_eps.push_back(xe);
  }
  o.moments = make_moment_set<T>(std::move(sig), std::move(u), std::move(y2));
  o.beta_star = Vec<T>::Constant(d, T(0));
  for (int j = 0; j < d; ++j) {
    const T c = scm.coef[0](r, scm.variable_of(j));
    if (!is_zero(c)) {
      o.beta_star(j) = c;
      o.s_star.push_back(j);
    }
  }
  o.pooled_x_eps = Vec<T>::Constant(d, T(0));
  for (const auto& xe : o.x_eps) o.pooled_x_eps += xe;
  for (int j = 0; j < d; ++j) o.pooled_x_eps(j) /= T(scm.num_envs());
  for (int j = 0; j < d; ++j)
    if (!contains(o.s_star, j) && !is_zero(o.pooled_x_eps(j), 1e-12)) o.endogenous.push_back(j);
  return o;
}

/// gamma*_k = max_{j in G} |mean_e E[X_j eps]| / sqrt(w_k(j)); 0 when G is
/// empty, +inf when some j in G has zero or undefined weight.
template <class T>
double gamma_star(const ScmOracle<T>& oracle, const WeightTable& w,
                  std::optional<WeightConvention> solver_convention = std::nullopt) {
  if (solver_convention && *solver_convention != w.convention)
    throw ValidationError(std::string("weight table uses the ") + to_string(w.convention) +
                          " convention but the solver expects " + to_string(*solver_convention));
  if (w.d() != oracle.moments.d()) throw ValidationError("weight table dimension does not match the oracle");
  double g = 0.0;
  for (int j : oracle.endogenous) {
    const double num = std::abs(to_double(oracle.pooled_x_eps(j)));
    const double den = w.defined[static_cast<std::size_t>(j)] ? w.penalty_weight(j) : 0.0;
    if (den == 0.0) return std::numeric_limits<double>::infinity();
    g = std::max(g, num / den);
  }
  return g;
}

/// Ancestral sampling with Gaussian noise; deterministic for a given seed.
MultiEnvDataset sample(const LinearScm<double>& scm, long n, std::uint64_t seed);

enum class ExampleName { ex2_1, ex2_2, ex3_1 };
ExampleName parse_example_name(const std::string& s);

/// The worked examples, exactly, over Q(sqrt 3, sqrt 5).
LinearScm<SurdQ35> make_example(ExampleName name);

/// One extra environment for the three-variable example in which the reverse
/// causal effects shrink: X2 <- Y/2 + eps/sqrt 2, X3 <- Y/(3 sqrt 2) + sqrt(8/9) eps.
LinearScm<double> make_example_3_1_shifted();

enum class Regime { general, block_orthogonal, no_ancestor_intervention };
Regime parse_regime(const std::string& s);
const char* to_string(Regime r);

struct RandomScmConfig {
  int d = 5;
  Regime regime = Regime::general;
  int block_size = 2;  // block_orthogonal only
  int num_envs = 2;
  std::uint64_t seed = 0;
};

/// Random SCM with rational coefficients of magnitude k/20 in [0.2, 1] and
/// random sign. Intervened covariates are rescaled to unit variance.
LinearScm<Rational> random_scm(const RandomScmConfig& cfg);

}  // namespace igr

#include "igr/scm.hpp"

#include <cmath>
#include <random>

namespace igr {

namespace {

template <class T>
LinearScm<T> empty_scm(int p, int response, int envs, const std::string& name) {
  LinearScm<T> s;
  s.p = p;
  s.response = response;
  s.name = name;
  for (int e = 0; e < envs; ++e) {
    s.coef.push_back(Mat<T>::Constant(p, p, T(0)));
    s.noise_var.emplace_back(static_cast<std::size_t>(p), T(1));
  }
  return s;
}

}  // namespace

MultiEnvDataset sample(const LinearScm<double>& scm_in, long n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("sample size must be at least 1");
  LinearScm<double> scm = scm_in;
  scm.validate();
  MultiEnvDataset data;
  for (int e = 0; e < scm.num_envs(); ++e) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(e)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd z(n, scm.p);
    for (long i = 0; i < n; ++i)
      for (int q = 0; q < scm.p; ++q) z(i, q) = normal(rng);
    const auto& b = scm.coef[static_cast<std::size_t>(e)];
    for (int c : scm.topo_order) {
      const double sd = std::sqrt(scm.noise_var[static_cast<std::size_t>(e)][static_cast<std::size_t>(c)]);
      z.col(c) *= sd;
      for (int q = 0; q < scm.p; ++q)
        if (b(c, q) != 0.0) z.col(c) += b(c, q) * z.col(q);
    }
    Environment env;
    env.id = "env" + std::to_string(e + 1);
    env.x.resize(n, scm.d());
    for (int j = 0; j < scm.d(); ++j) env.x.col(j) = z.col(scm.variable_of(j));
    env.y = z.col(scm.response);
    data.add(std::move(env));
  }
  return data;
}

ExampleName parse_example_name(const std::string& s) {
  if (s == "ex2_1") return ExampleName::ex2_1;
  if (s == "ex2_2") return ExampleName::ex2_2;
  if (s == "ex3_1") return ExampleName::ex3_1;
  throw ValidationError("unknown example '" + s + "' (expected ex2_1, ex2_2 or ex3_1)");
}

LinearScm<SurdQ35> make_example(ExampleName name) {
  using S = SurdQ35;
  LinearScm<S> scm;
  switch (name) {
    case ExampleName::ex2_1: {
      // Variables X1..X4, Y. X3 is a child of Y whose loading shrinks by sqrt 3 in environment 1.
      scm = empty_scm<S>(5, 4, 2, "ex2_1");
      const S loading[2] = {S::sqrt_of(Rational(1, 15)), S::sqrt_of(Rational(1, 5))};
      for (int e = 0; e < 2; ++e) {
        scm.coef[e](4, 0) = S(2);
        scm.coef[e](4, 1) = S(1);
        scm.coef[e](2, 4) = loading[e];
        scm.noise_var[e][2] = S(Rational(1, 5));
      }
      scm.intervened = {2};
      break;
    }
    case ExampleName::ex2_2: {
      // Variables X1, X2, Y with X2 <- 2^(2e-3) Y + eps.
      scm = empty_scm<S>(3, 2, 2, "ex2_2");
      const S loading[2] = {S(Rational(1, 2)), S(2)};
      for (int e = 0; e < 2; ++e) {
        scm.coef[e](2, 0) = S(1);
        scm.coef[e](1, 2) = loading[e];
        scm.noise_var[e][0] = S(Rational(1, 2));
        scm.noise_var[e][2] = S(Rational(1, 2));
      }
      scm.intervened = {1};
      break;
    }
    case ExampleName::ex3_1: {
      // Variables X1, X2, X3, Y; X2 and X3 are unit-variance children of Y.
      scm = empty_scm<S>(4, 3, 2, "ex3_1");
      for (int e = 0; e < 2; ++e) scm.coef[e](3, 0) = S(1);
      scm.coef[0](1, 3) = S(Rational(2, 3));
      scm.coef[0](2, 3) = S(Rational(2, 3));
      scm.noise_var[0][1] = S(Rational(1, 9));
      scm.noise_var[0][2] = S(Rational(1, 9));
      scm.coef[1](1, 3) = S(Rational(1, 2));
      scm.coef[1](2, 3) = S(Rational(1, 4));
      scm.noise_var[1][1] = S(Rational(1, 2));
      scm.noise_var[1][2] = S(Rational(7, 8));
      scm.intervened = {1, 2};
      break;
    }
  }
  scm.validate();
  return scm;
}

LinearScm<double> make_example_3_1_shifted() {
  auto scm = empty_scm<double>(4, 3, 1, "ex3_1_shifted");
  scm.coef[0](3, 0) = 1.0;
  scm.coef[0](1, 3) = 0.5;
  scm.noise_var[0][1] = 0.5;
  scm.coef[0](2, 3) = 1.0 / (3.0 * std::sqrt(2.0));
  scm.noise_var[0][2] = 8.0 / 9.0;
  scm.intervened = {1, 2};
  scm.validate();
  return scm;
}

Regime parse_regime(const std::string& s) {
  if (s == "general") return Regime::general;
  if (s == "block-orthogonal" || s == "block_orthogonal") return Regime::block_orthogonal;
  if (s == "no-ancestor-intervention" || s == "no_ancestor_intervention") return Regime::no_ancestor_intervention;
  throw ValidationError("unknown regime '" + s + "'");
}

const char* to_string(Regime r) {
  switch (r) {
    case Regime::general: return "general";
    case Regime::block_orthogonal: return "block-orthogonal";
    case Regime::no_ancestor_intervention: return "no-ancestor-intervention";
  }
  return "?";
}

namespace {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return uniform(0, 1) == 1; }
  Rational coefficient() {
    const Rational mag(uniform(4, 20), 20);
    return coin() ? mag : -mag;
  }

 private:
  std::mt19937_64 rng_;
};

/// Structural skeleton shared by all environments: parent lists per variable
/// in a fixed topological order.
struct Skeleton {
  std::vector<int> order;                // variables in topological order
  std::vector<std::vector<int>> parents; // per variable
  std::vector<bool> intervened;          // per variable
};

/// Fills coefficients per environment. Non-intervened variables share one
/// draw; intervened ones are redrawn per environment and given unit variance.
LinearScm<Rational> realize(const Skeleton& sk, int p, int response, int envs, Draw& draw, const std::string& name) {
  auto scm = empty_scm<Rational>(p, response, envs, name);
  std::vector<std::vector<Rational>> shared(static_cast<std::size_t>(p));
  for (int c : sk.order)
    for (std::size_t i = 0; i < sk.parents[static_cast<std::size_t>(c)].size(); ++i)
      shared[static_cast<std::size_t>(c)].push_back(draw.coefficient());

  for (int e = 0; e < envs; ++e) {
    Mat<Rational> k = Mat<Rational>::Constant(p, p, Rational(0));
    for (int c : sk.order) {
      const auto& pa = sk.parents[static_cast<std::size_t>(c)];
      const bool iv = sk.intervened[static_cast<std::size_t>(c)];
      std::vector<Rational> b = shared[static_cast<std::size_t>(c)];
      if (iv)
        for (auto& x : b) x = draw.coefficient();
      Rational var(0);
      for (std::size_t a = 0; a < pa.size(); ++a)
        for (std::size_t bb = 0; bb < pa.size(); ++bb) var += b[a] * b[bb] * k(pa[a], pa[bb]);
      Rational noise(1);
      if (iv) {
        while (var >= Rational(9, 10)) {
          for (auto& x : b) x /= Rational(2);
          var /= Rational(4);
        }
        noise = Rational(1) - var;
      }
      for (std::size_t a = 0; a < pa.size(); ++a) scm.coef[e](c, pa[a]) = b[a];
      scm.noise_var[e][static_cast<std::size_t>(c)] = noise;
      for (int q = 0; q < p; ++q) {
        Rational acc(0);
        for (std::size_t a = 0; a < pa.size(); ++a) acc += b[a] * k(pa[a], q);
        k(c, q) = acc;
        k(q, c) = acc;
      }
      k(c, c) = var + noise;
    }
  }
  for (int v = 0; v < p; ++v)
    if (v != response && sk.intervened[static_cast<std::size_t>(v)]) scm.intervened.push_back(scm.covariate_of(v));
  scm.intervened = normalize_set(scm.intervened);
  scm.validate();
  return scm;
}

}  // namespace

LinearScm<Rational> random_scm(const RandomScmConfig& cfg) {
  if (cfg.d < 2) throw ValidationError("random_scm requires d >= 2");
  if (cfg.num_envs < 1) throw ValidationError("random_scm requires at least one environment");
  const int p = cfg.d + 1;
  Draw draw(cfg.seed);
  Skeleton sk;
  sk.parents.assign(static_cast<std::size_t>(p), {});
  sk.intervened.assign(static_cast<std::size_t>(p), false);
  int response = 0;

  if (cfg.regime == Regime::block_orthogonal) {
    if (cfg.block_size < 1) throw ValidationError("block size must be positive");
    // Variables 0..s-1 form S*, split into consecutive blocks with no edges
    // between blocks; Y = variable s; the rest are descendants of Y.
    const int s = std::min(cfg.d - 1, std::max(cfg.block_size, draw.uniform(1, cfg.d - 1)));
    response = s;
    int start = 0;
    while (start < s) {
      const int len = std::min(s - start, draw.uniform(1, cfg.block_size));
      for (int c = start; c < start + len; ++c) {
        for (int q = start; q < c; ++q)
          if (draw.coin()) sk.parents[static_cast<std::size_t>(c)].push_back(q);
        sk.intervened[static_cast<std::size_t>(c)] = draw.coin();
      }
      start += len;
    }
    for (int q = 0; q < s; ++q) sk.parents[static_cast<std::size_t>(response)].push_back(q);
    for (int c = s + 1; c < p; ++c) {
      sk.parents[static_cast<std::size_t>(c)].push_back(response);
      for (int q = 0; q < c; ++q)
        if (q != response && draw.coin()) sk.parents[static_cast<std::size_t>(c)].push_back(q);
      sk.intervened[static_cast<std::size_t>(c)] = true;
    }
    for (int c = 0; c < p; ++c) sk.order.push_back(c);
  } else {
    // Variables are already in topological order; Y sits strictly inside.
    response = draw.uniform(1, cfg.d - 1);
    for (int c = 1; c < p; ++c)
      for (int q = 0; q < c; ++q)
        if (draw.coin()) sk.parents[static_cast<std::size_t>(c)].push_back(q);
    if (sk.parents[static_cast<std::size_t>(response)].empty())
      sk.parents[static_cast<std::size_t>(response)].push_back(response - 1);
    for (int c = 0; c < p; ++c) sk.order.push_back(c);

    std::vector<bool> ancestor(static_cast<std::size_t>(p), false);
    for (int c = response; c >= 0; --c)
      if (c == response || ancestor[static_cast<std::size_t>(c)])
        for (int q : sk.parents[static_cast<std::size_t>(c)]) ancestor[static_cast<std::size_t>(q)] = true;
    bool any = false;
    for (int c = 0; c < p; ++c) {
      if (c == response) continue;
      if (cfg.regime == Regime::no_ancestor_intervention && ancestor[static_cast<std::size_t>(c)]) continue;
      sk.intervened[static_cast<std::size_t>(c)] = draw.coin();
      any = any || sk.intervened[static_cast<std::size_t>(c)];
    }
    if (!any) {
      // Force heterogeneity on the last eligible covariate.
      for (int c = p - 1; c >= 0; --c) {
        if (c == response) continue;
        if (cfg.regime == Regime::no_ancestor_intervention && ancestor[static_cast<std::size_t>(c)]) continue;
        sk.intervened[static_cast<std::size_t>(c)] = true;
        break;
      }
    }
  }
  return realize(sk, p, response, cfg.num_envs, draw,
                 std::string("random-") + to_string(cfg.regime) + "-" + std::to_string(cfg.seed));
}

}  // namespace igr

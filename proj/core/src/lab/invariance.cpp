#include "igr/lab/invariance.hpp"

#include "schur_dfs.hpp"

namespace igr::lab {

Strategy parse_strategy(const std::string& s) {
  if (s == "auto" || s == "automatic") return Strategy::automatic;
  if (s == "brute-force" || s == "brute_force") return Strategy::brute_force;
  if (s == "schur-dfs" || s == "schur_dfs") return Strategy::schur_dfs;
  if (s == "pruned") return Strategy::pruned;
  throw ValidationError("unknown enumeration strategy '" + s + "'");
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::automatic: return "auto";
    case Strategy::brute_force: return "brute-force";
    case Strategy::schur_dfs: return "schur-dfs";
    case Strategy::pruned: return "pruned";
  }
  return "?";
}

int diagonal_environment(const EnvMomentSet<Rational>& m) {
  for (int e = 0; e < m.num_envs(); ++e) {
    const auto& s = m.sigma[static_cast<std::size_t>(e)];
    bool diag = true;
    for (int i = 0; i < m.d() && diag; ++i)
      for (int j = 0; j < m.d() && diag; ++j)
        if (i != j && !s(i, j).is_zero()) diag = false;
    if (diag) return e;
  }
  return -1;
}

namespace {

InvariantSets enumerate_schur(const EnvMomentSet<Rational>& m, const EnumerationOptions& opts) {
  check_cap(m.d(), opts.cap);
  const int n_env = m.num_envs();
  std::vector<detail::SchurDfs::Input> inputs;
  for (int e = 0; e < n_env; ++e) inputs.push_back({m.sigma[static_cast<std::size_t>(e)], m.u[static_cast<std::size_t>(e)], {}});
  // Pooled matrix as a sum, so its q value is |E| times the mean-pooled one.
  Mat<Rational> ssum = m.pooled_sigma * Rational(n_env);
  Vec<Rational> usum = m.pooled_u * Rational(n_env);
  inputs.push_back({ssum, usum, {}});

  std::uint64_t nonzero_u = 0;
  for (int j = 0; j < m.d(); ++j)
    if (!usum(j).is_zero()) nonzero_u |= std::uint64_t{1} << j;

  InvariantSets out;
  out.strategy = Strategy::schur_dfs;
  detail::SchurDfs walk(inputs);
  std::vector<mpz_class> den(inputs.size());
  mpz_class acc, term;
  walk.run([&](std::uint64_t mask, const std::vector<detail::SchurDfs::View>& v) {
    ++out.subsets_examined;
    // sum_e q_e - q_sum == 0, with q = -N / (D L); cleared of denominators.
    for (std::size_t i = 0; i < v.size(); ++i) den[i] = *v[i].det * *v[i].scale;
    acc = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      term = *v[i].n_uu;
      for (std::size_t k = 0; k < v.size(); ++k)
        if (k != i) term *= den[k];
      if (i + 1 == v.size()) acc += term;  // -(-N_sum)
      else acc -= term;
    }
    if (sgn(acc) != 0) return;
    const IndexSet s = set_from_mask(mask);
    ((mask & nonzero_u) ? out.sets : out.zero_beta_sets).push_back(s);
  });
  std::sort(out.sets.begin(), out.sets.end());
  std::sort(out.zero_beta_sets.begin(), out.zero_beta_sets.end());
  return out;
}

/// With a diagonal environment e0 the restricted coefficients there are
/// b_j = u_j / Sigma_jj whatever S is, so S is invariant iff
/// Sigma^(e)_S b_S = u^(e)_S in every other environment. Decide indices in
/// order and prune with suffix bounds on the rows already included.
InvariantSets enumerate_pruned(const EnvMomentSet<Rational>& m) {
  const int e0 = diagonal_environment(m);
  if (e0 < 0) throw ValidationError("the pruned strategy needs an environment with diagonal Sigma");
  const int d = m.d();
  std::vector<Rational> b(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) b[static_cast<std::size_t>(j)] = m.u[e0](j) / m.sigma[e0](j, j);

  struct Env {
    std::vector<std::vector<Rational>> a;    // a[i][l] = Sigma_il b_l
    std::vector<std::vector<Rational>> pos;  // pos[i][l] = sum_{l' >= l} max(0, a[i][l'])
    std::vector<std::vector<Rational>> neg;
    std::vector<Rational> target;
    std::vector<Rational> partial;
  };
  std::vector<Env> envs;
  for (int e = 0; e < m.num_envs(); ++e) {
    if (e == e0) continue;
    Env env;
    env.a.assign(static_cast<std::size_t>(d), std::vector<Rational>(static_cast<std::size_t>(d)));
    env.pos.assign(static_cast<std::size_t>(d), std::vector<Rational>(static_cast<std::size_t>(d) + 1, Rational(0)));
    env.neg = env.pos;
    for (int i = 0; i < d; ++i) {
      auto iu = static_cast<std::size_t>(i);
      for (int l = 0; l < d; ++l) env.a[iu][static_cast<std::size_t>(l)] = m.sigma[e](i, l) * b[static_cast<std::size_t>(l)];
      for (int l = d - 1; l >= 0; --l) {
        const auto lu = static_cast<std::size_t>(l);
        const Rational& v = env.a[iu][lu];
        env.pos[iu][lu] = env.pos[iu][lu + 1] + (v.sign() > 0 ? v : Rational(0));
        env.neg[iu][lu] = env.neg[iu][lu + 1] + (v.sign() < 0 ? v : Rational(0));
      }
      env.target.push_back(m.u[e](i));
    }
    env.partial.assign(static_cast<std::size_t>(d), Rational(0));
    envs.push_back(std::move(env));
  }

  InvariantSets out;
  out.strategy = Strategy::pruned;
  IndexSet chosen;
  // Every included row must still be able to reach its target using indices >= next.
  auto feasible = [&](int next) {
    for (auto& env : envs)
      for (int i : chosen) {
        const auto iu = static_cast<std::size_t>(i);
        const Rational gap = env.target[iu] - env.partial[iu];
        if (next >= d) {
          if (!gap.is_zero()) return false;
        } else if (gap < env.neg[iu][static_cast<std::size_t>(next)] || gap > env.pos[iu][static_cast<std::size_t>(next)]) {
          return false;
        }
      }
    return true;
  };
  auto rec = [&](auto&& self, int l) -> void {
    ++out.subsets_examined;
    if (l == d) {
      if (chosen.empty()) return;
      bool zero = true;
      for (int j : chosen) zero = zero && b[static_cast<std::size_t>(j)].is_zero();
      (zero ? out.zero_beta_sets : out.sets).push_back(chosen);
      return;
    }
    const auto lu = static_cast<std::size_t>(l);
    // Include l.
    for (auto& env : envs)
      for (int i = 0; i < d; ++i) env.partial[static_cast<std::size_t>(i)] += env.a[static_cast<std::size_t>(i)][lu];
    chosen.push_back(l);
    if (feasible(l + 1)) self(self, l + 1);
    chosen.pop_back();
    for (auto& env : envs)
      for (int i = 0; i < d; ++i) env.partial[static_cast<std::size_t>(i)] -= env.a[static_cast<std::size_t>(i)][lu];
    // Exclude l.
    if (feasible(l + 1)) self(self, l + 1);
  };
  rec(rec, 0);
  std::sort(out.sets.begin(), out.sets.end());
  std::sort(out.zero_beta_sets.begin(), out.zero_beta_sets.end());
  return out;
}

}  // namespace

InvariantSets enumerate_invariant_sets_exact(const EnvMomentSet<Rational>& m, const EnumerationOptions& opts) {
  for (int e = 0; e < m.num_envs(); ++e)
    if (!m.positive_definite[static_cast<std::size_t>(e)])
      throw ValidationError("Sigma of environment " + std::to_string(e + 1) + " is not positive definite");
  switch (opts.strategy) {
    case Strategy::brute_force: return enumerate_brute_force(m, opts);
    case Strategy::schur_dfs: return enumerate_schur(m, opts);
    case Strategy::pruned: return enumerate_pruned(m);
    case Strategy::automatic:
      if (diagonal_environment(m) >= 0) return enumerate_pruned(m);
      return enumerate_schur(m, opts);
  }
  return {};
}

}  // namespace igr::lab

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "igr/env_moments.hpp"

namespace igr::lab {

/// brute_force: solve every subset directly (any backend).
/// schur_dfs:   exact Bareiss walk over all subsets (Rational only, d <= cap).
/// pruned:      branch and bound when some environment has diagonal Sigma
///              (Rational only, no dimension cap).
enum class Strategy { automatic, brute_force, schur_dfs, pruned };

Strategy parse_strategy(const std::string& s);
const char* to_string(Strategy s);

struct EnumerationOptions {
  Strategy strategy = Strategy::automatic;
  int cap = 24;       // exhaustive strategies refuse larger d
  double tol = 1e-9;  // float backend: max coefficient difference
};

struct InvariantSets {
  std::vector<IndexSet> sets;            // nonempty, pooled beta != 0, lexicographic order
  std::vector<IndexSet> zero_beta_sets;  // nonempty invariant sets whose pooled beta is 0
  bool empty_set_invariant = true;       // the empty set is always invariant; reported apart
  std::uint64_t subsets_examined = 0;
  Strategy strategy = Strategy::brute_force;
};

/// beta^(e,S) equal to beta^(S) for every e: exactly for exact backends,
/// within `tol` (max abs difference) for double.
template <class T>
bool is_invariant(const EnvMomentSet<T>& m, const IndexSet& s, double tol = 1e-9) {
  const auto c = restricted_ls(m, s);
  for (const auto& b : c.env_beta)
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if constexpr (ScalarTraits<T>::is_exact) {
        if (!(b(i) == c.pooled_beta(i))) return false;
      } else {
        if (std::abs(b(i) - c.pooled_beta(i)) > tol) return false;
      }
    }
  return true;
}

template <class T>
bool beta_is_zero(const Vec<T>& b, double tol) {
  for (Eigen::Index i = 0; i < b.size(); ++i)
    if (!is_zero(b(i), tol)) return false;
  return true;
}

inline void check_cap(int d, int cap) {
  if (d > cap)
    throw ValidationError("d=" + std::to_string(d) + " exceeds the enumeration cap of " + std::to_string(cap));
}

InvariantSets enumerate_invariant_sets_exact(const EnvMomentSet<Rational>& m, const EnumerationOptions& opts);

/// Index of an environment whose Sigma is diagonal, or -1.
int diagonal_environment(const EnvMomentSet<Rational>& m);

template <class T>
InvariantSets enumerate_brute_force(const EnvMomentSet<T>& m, const EnumerationOptions& opts) {
  const int d = m.d();
  check_cap(d, opts.cap);
  InvariantSets out;
  out.strategy = Strategy::brute_force;
  const std::uint64_t total = std::uint64_t{1} << d;
  for (std::uint64_t mask = 1; mask < total; ++mask) {
    const IndexSet s = set_from_mask(mask);
    ++out.subsets_examined;
    const auto c = restricted_ls(m, s);
    bool inv = true;
    for (const auto& b : c.env_beta) {
      for (Eigen::Index i = 0; i < b.size() && inv; ++i) {
        if constexpr (ScalarTraits<T>::is_exact) inv = b(i) == c.pooled_beta(i);
        else inv = std::abs(b(i) - c.pooled_beta(i)) <= opts.tol;
      }
      if (!inv) break;
    }
    if (!inv) continue;
    (beta_is_zero(c.pooled_beta, opts.tol) ? out.zero_beta_sets : out.sets).push_back(s);
  }
  std::sort(out.sets.begin(), out.sets.end());
  std::sort(out.zero_beta_sets.begin(), out.zero_beta_sets.end());
  return out;
}

template <class T>
InvariantSets enumerate_invariant_sets(const EnvMomentSet<T>& m, const EnumerationOptions& opts = {}) {
  if constexpr (std::is_same_v<T, Rational>) {
    return enumerate_invariant_sets_exact(m, opts);
  } else {
    if (opts.strategy == Strategy::schur_dfs || opts.strategy == Strategy::pruned)
      throw ValidationError(std::string("strategy ") + to_string(opts.strategy) + " requires the exact-rational backend");
    return enumerate_brute_force(m, opts);
  }
}

/// Checks that S-bar is invariant and that beta^(S u S-bar) = beta^(S-bar)
/// for every invariant S (the empty set included).
template <class T>
bool is_maximum_invariant_set(const EnvMomentSet<T>& m, const IndexSet& sbar_in, const InvariantSets& all,
                              double tol = 1e-9) {
  const IndexSet sbar = normalize_set(sbar_in);
  if (!is_invariant(m, sbar, tol)) return false;
  const Vec<T> base = restricted_ls(m, sbar).pooled_beta;
  auto same = [&](const IndexSet& s) {
    const Vec<T> b = restricted_ls(m, set_union(s, sbar)).pooled_beta;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      if constexpr (ScalarTraits<T>::is_exact) {
        if (!(b(i) == base(i))) return false;
      } else {
        if (std::abs(b(i) - base(i)) > tol) return false;
      }
    }
    return true;
  };
  for (const auto& s : all.sets)
    if (!same(s)) return false;
  for (const auto& s : all.zero_beta_sets)
    if (!same(s)) return false;
  return true;
}

template <class T>
bool is_maximum_invariant_set(const EnvMomentSet<T>& m, const IndexSet& sbar, const EnumerationOptions& opts = {}) {
  return is_maximum_invariant_set(m, sbar, enumerate_invariant_sets(m, opts), opts.tol);
}

/// Every maximum invariant set, the empty set included when it qualifies.
template <class T>
std::vector<IndexSet> maximum_invariant_sets(const EnvMomentSet<T>& m, const EnumerationOptions& opts = {}) {
  const auto all = enumerate_invariant_sets(m, opts);
  std::vector<IndexSet> out;
  if (is_maximum_invariant_set(m, IndexSet{}, all, opts.tol)) out.push_back({});
  for (const auto* group : {&all.sets, &all.zero_beta_sets})
    for (const auto& s : *group)
      if (is_maximum_invariant_set(m, s, all, opts.tol)) out.push_back(s);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace igr::lab

#include "igr/lab/reduction.hpp"

#include <cstdlib>
#include <map>

namespace igr::lab {

LisInstance make_instance(std::vector<Mat<Rational>> sigma, std::vector<Vec<Rational>> u, std::string provenance) {
  LisInstance inst;
  inst.moments = make_moment_set<Rational>(std::move(sigma), std::move(u));
  for (int e = 0; e < inst.moments.num_envs(); ++e)
    if (!inst.moments.positive_definite[static_cast<std::size_t>(e)])
      throw ValidationError("Sigma of environment " + std::to_string(e + 1) + " is not positive definite");
  inst.provenance = std::move(provenance);
  return inst;
}

bool contradicts(const Clause& c, int t, const Clause& c2, int t2) {
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      if (std::abs(c[a]) != std::abs(c2[b])) continue;
      const bool va = action_literal(t, a) == (c[a] > 0);
      const bool vb = action_literal(t2, b) == (c2[b] > 0);
      if (va != vb) return true;
    }
  return false;
}

Reduction reduce_3sat(const CnfFormula& f) {
  f.validate();
  const int k = f.k();
  if (k < 1) throw ValidationError("formula has no clauses");
  const int n = 7 * k, d = n + 1;
  Reduction r;
  r.contradiction = Eigen::MatrixXi::Zero(n, n);
  for (int i = 0; i < k; ++i)
    for (int t = 1; t <= 7; ++t)
      for (int i2 = 0; i2 < k; ++i2)
        for (int t2 = 1; t2 <= 7; ++t2) {
          int v = 0;
          if (i == i2) v = (t == t2) ? contradicts(f.clauses[i], t, f.clauses[i], t) : 1;
          else v = contradicts(f.clauses[i], t, f.clauses[i2], t2);
          r.contradiction(7 * i + t - 1, 7 * i2 + t2 - 1) = v;
        }

  const Rational five_d(5 * d), half(1, 2);
  Mat<Rational> s1 = Mat<Rational>::Constant(d, d, Rational(0));
  for (int j = 0; j < d; ++j) s1(j, j) = Rational(1);
  Vec<Rational> u1 = Vec<Rational>::Constant(d, Rational(1));

  Mat<Rational> s2(d, d);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) s2(a, b) = Rational(r.contradiction(a, b)) + (a == b ? five_d : Rational(0));
  for (int a = 0; a < n; ++a) {
    s2(a, n) = half;
    s2(n, a) = half;
  }
  s2(n, n) = five_d;
  Vec<Rational> u2(d);
  for (int a = 0; a < n; ++a) u2(a) = five_d + half;
  u2(n) = five_d + Rational(k, 2);

  r.instance = make_instance({s1, s2}, {u1, u2}, "reduced-from-CNF(" + std::to_string(k) + ")");
  r.instance.clauses = k;
  return r;
}

DecodeResult decode_solution(const IndexSet& s_in, const CnfFormula& f) {
  const IndexSet s = normalize_set(s_in);
  const int k = f.k(), d = 7 * k + 1;
  DecodeResult out;
  for (int j : s)
    if (j < 0 || j >= d) {
      out.reason = "index " + std::to_string(j + 1) + " outside 1.." + std::to_string(d);
      return out;
    }
  if (!contains(s, d - 1)) {
    out.reason = "last coordinate absent";
    return out;
  }
  if (static_cast<int>(s.size()) != k + 1) {
    out.reason = "expected " + std::to_string(k + 1) + " indices, got " + std::to_string(s.size());
    return out;
  }
  std::vector<int> action(static_cast<std::size_t>(k), 0);
  for (int j : s) {
    if (j == d - 1) continue;
    const int i = j / 7;
    if (action[static_cast<std::size_t>(i)] != 0) {
      out.reason = "clause " + std::to_string(i + 1) + " has more than one action";
      return out;
    }
    action[static_cast<std::size_t>(i)] = j % 7 + 1;
  }
  std::map<int, bool> value;
  for (int i = 0; i < k; ++i) {
    const int t = action[static_cast<std::size_t>(i)];
    if (t == 0) {
      out.reason = "clause " + std::to_string(i + 1) + " has no action";
      return out;
    }
    const auto& c = f.clauses[static_cast<std::size_t>(i)];
    for (int u = 0; u < 3; ++u) {
      const int v = std::abs(c[u]);
      const bool val = action_literal(t, u) == (c[u] > 0);
      auto [it, inserted] = value.emplace(v, val);
      if (!inserted && it->second != val) {
        out.reason = "action " + std::to_string(t) + " in clause " + std::to_string(i + 1) +
                     " contradicts an earlier assignment of variable " + std::to_string(v);
        return out;
      }
    }
  }
  out.assignment.assign(static_cast<std::size_t>(f.n_vars), false);
  for (int v = 1; v <= f.n_vars; ++v) {
    auto it = value.find(v);
    if (it == value.end()) {
      out.reason = "variable " + std::to_string(v) + " is not assigned by any action";
      return out;
    }
    out.assignment[static_cast<std::size_t>(v - 1)] = it->second;
  }
  if (!evaluate(f, out.assignment)) {
    out.reason = "decoded assignment does not satisfy the formula";
    return out;
  }
  out.ok = true;
  return out;
}

int action_id(const Clause& c, const Assignment& a) {
  int t = 0;
  for (int u = 0; u < 3; ++u) {
    const bool lit = a[static_cast<std::size_t>(std::abs(c[u]) - 1)] == (c[u] > 0);
    t = (t << 1) | (lit ? 1 : 0);
  }
  return t;
}

IndexSet encode_action_profile(const Assignment& a, const CnfFormula& f) {
  if (!evaluate(f, a)) throw ValidationError("assignment " + format_assignment(a) + " does not satisfy the formula");
  IndexSet s;
  for (int i = 0; i < f.k(); ++i) s.push_back(7 * i + action_id(f.clauses[static_cast<std::size_t>(i)], a) - 1);
  s.push_back(7 * f.k());
  return s;
}

}  // namespace igr::lab

#include "igr/lab/cnf.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <random>
#include <sstream>

#include "igr/error.hpp"

namespace igr::lab {

void CnfFormula::validate() const {
  if (n_vars < 1) throw ValidationError("formula must have at least one variable");
  std::vector<bool> seen(static_cast<std::size_t>(n_vars), false);
  for (std::size_t i = 0; i < clauses.size(); ++i)
    for (int lit : clauses[i]) {
      const int v = std::abs(lit);
      if (lit == 0 || v > n_vars)
        throw ValidationError("clause " + std::to_string(i + 1) + " has literal " + std::to_string(lit) +
                              " outside 1.." + std::to_string(n_vars));
      seen[static_cast<std::size_t>(v - 1)] = true;
    }
  for (int v = 0; v < n_vars; ++v)
    if (!seen[static_cast<std::size_t>(v)])
      throw ValidationError("variable " + std::to_string(v + 1) + " does not occur in any clause");
}

CnfFormula parse_dimacs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  CnfFormula f;
  long declared = -1;
  std::vector<int> pending;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == 'c') continue;
    if (line[first] == '%') break;  // SATLIB trailer
    std::istringstream ls(line.substr(first));
    if (line[first] == 'p') {
      std::string p, fmt;
      long n = -1, m = -1;
      if (declared >= 0) throw ValidationError("line " + std::to_string(lineno) + ": duplicate header");
      if (!(ls >> p >> fmt >> n >> m) || fmt != "cnf" || n < 1 || m < 0)
        throw ValidationError("line " + std::to_string(lineno) + ": malformed header, expected 'p cnf <vars> <clauses>'");
      std::string extra;
      if (ls >> extra) throw ValidationError("line " + std::to_string(lineno) + ": trailing tokens in header");
      f.n_vars = static_cast<int>(n);
      declared = m;
      continue;
    }
    if (declared < 0) throw ValidationError("line " + std::to_string(lineno) + ": clause before 'p cnf' header");
    std::string tok;
    while (ls >> tok) {
      char* end = nullptr;
      const long lit = std::strtol(tok.c_str(), &end, 10);
      if (*end != '\0') throw ValidationError("line " + std::to_string(lineno) + ": bad literal '" + tok + "'");
      if (lit == 0) {
        if (pending.size() != 3)
          throw ValidationError("line " + std::to_string(lineno) + ": clause has " + std::to_string(pending.size()) +
                                " literals, expected exactly 3");
        f.clauses.push_back({pending[0], pending[1], pending[2]});
        pending.clear();
        continue;
      }
      if (std::labs(lit) > f.n_vars)
        throw ValidationError("line " + std::to_string(lineno) + ": variable " + std::to_string(std::labs(lit)) +
                              " exceeds declared count " + std::to_string(f.n_vars));
      pending.push_back(static_cast<int>(lit));
    }
  }
  if (declared < 0) throw ValidationError("missing 'p cnf' header");
  if (!pending.empty()) throw ValidationError("last clause is not terminated by 0");
  if (static_cast<long>(f.clauses.size()) != declared)
    throw ValidationError("header declares " + std::to_string(declared) + " clauses, found " +
                          std::to_string(f.clauses.size()));
  f.validate();
  return f;
}

std::string to_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  out << "p cnf " << f.n_vars << " " << f.clauses.size() << "\n";
  for (const auto& c : f.clauses) out << c[0] << " " << c[1] << " " << c[2] << " 0\n";
  return out.str();
}

bool evaluate(const CnfFormula& f, const Assignment& a) {
  if (static_cast<int>(a.size()) != f.n_vars) throw ValidationError("assignment has the wrong number of variables");
  for (const auto& c : f.clauses) {
    bool sat = false;
    for (int lit : c) sat = sat || (a[static_cast<std::size_t>(std::abs(lit) - 1)] == (lit > 0));
    if (!sat) return false;
  }
  return true;
}

SatCount sat_brute_force(const CnfFormula& f, bool keep_solutions) {
  if (f.n_vars > 24) throw ValidationError("brute force is limited to 24 variables");
  const int n = f.n_vars;
  // Clause i is falsified by assignment bits b iff (b & mask) == value.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> falsify;
  for (const auto& c : f.clauses) {
    std::uint32_t mask = 0, value = 0;
    bool tautology = false;
    for (int lit : c) {
      const std::uint32_t bit = 1u << (n - std::abs(lit));
      const std::uint32_t want = lit > 0 ? 0u : bit;  // the literal is false
      if ((mask & bit) && (value & bit) != want) tautology = true;
      mask |= bit;
      value |= want;
    }
    if (!tautology) falsify.emplace_back(mask, value);
  }
  SatCount out;
  const std::uint32_t total = 1u << n;
  for (std::uint32_t b = 0; b < total; ++b) {
    bool ok = true;
    for (const auto& [mask, value] : falsify)
      if ((b & mask) == value) {
        ok = false;
        break;
      }
    if (!ok) continue;
    ++out.count;
    if (keep_solutions) {
      Assignment a(static_cast<std::size_t>(n));
      for (int v = 0; v < n; ++v) a[static_cast<std::size_t>(v)] = (b >> (n - 1 - v)) & 1u;
      out.solutions.push_back(std::move(a));
    }
  }
  return out;
}

CnfFormula problem1_formula() {
  CnfFormula f;
  f.n_vars = 4;
  f.clauses = {{1, 2, 3},   {1, 2, -3},  {1, -2, 3}, {1, -2, -3}, {-1, -2, 3},
               {-1, 2, -3}, {-1, -2, -3}, {-4, 4, 2}, {-1, 2, 4}};
  f.validate();
  return f;
}

CnfFormula random_formula(int k, int n_vars, std::uint64_t seed) {
  if (k < 1 || n_vars < 1) throw ValidationError("random_formula needs k >= 1 and n_vars >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> var(1, n_vars), sign(0, 1);
  CnfFormula f;
  std::map<int, int> renumber;
  for (int i = 0; i < k; ++i) {
    Clause c{};
    for (int& lit : c) {
      const int v = var(rng);
      lit = sign(rng) ? v : -v;
    }
    f.clauses.push_back(c);
  }
  for (const auto& c : f.clauses)
    for (int lit : c) renumber.emplace(std::abs(lit), 0);
  int next = 0;
  for (auto& [v, nv] : renumber) nv = ++next;
  for (auto& c : f.clauses)
    for (int& lit : c) lit = lit > 0 ? renumber[lit] : -renumber[-lit];
  f.n_vars = next;
  f.validate();
  return f;
}

std::string format_assignment(const Assignment& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ",";
    s += a[i] ? "T" : "F";
  }
  return s + ")";
}

}  // namespace igr::lab

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace igr::lab {

/// Literal: +v for variable v, -v for its negation (v is one-based).
using Clause = std::array<int, 3>;

struct CnfFormula {
  int n_vars = 0;
  std::vector<Clause> clauses;

  int k() const { return static_cast<int>(clauses.size()); }
  /// Throws ValidationError unless every literal is in range and every
  /// variable occurs in some clause.
  void validate() const;
};

/// Truth assignment; element i is variable i+1.
using Assignment = std::vector<bool>;

/// Parses DIMACS CNF with clauses of exactly three literals.
CnfFormula parse_dimacs(std::string_view text);
std::string to_dimacs(const CnfFormula& f);

bool evaluate(const CnfFormula& f, const Assignment& a);

struct SatCount {
  std::uint64_t count = 0;
  std::vector<Assignment> solutions;  // in increasing binary order, variable 1 most significant
};

/// Truth-table scan; n_vars must not exceed 24.
SatCount sat_brute_force(const CnfFormula& f, bool keep_solutions = true);

/// Formula used throughout the lab: 9 clauses on 4 variables with the unique
/// solution (T, F, F, T).
CnfFormula problem1_formula();

/// Random 3-CNF with k clauses over at most n_vars variables. Variables that
/// end up unused are dropped and the rest renumbered, so the result validates.
CnfFormula random_formula(int k, int n_vars, std::uint64_t seed);

std::string format_assignment(const Assignment& a);

}  // namespace igr::lab

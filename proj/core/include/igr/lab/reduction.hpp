#pragma once

#include <string>

#include "igr/env_moments.hpp"
#include "igr/lab/cnf.hpp"

namespace igr::lab {

/// Two-or-more environment moment data for the invariant-set existence problem.
struct LisInstance {
  EnvMomentSet<Rational> moments;
  std::string provenance = "hand-built";  // or "reduced-from-CNF(k)"
  int clauses = 0;                        // k for reduced instances

  int d() const { return moments.d(); }
};

/// Builds an instance from per-environment moments and checks positive definiteness.
LisInstance make_instance(std::vector<Mat<Rational>> sigma, std::vector<Vec<Rational>> u,
                          std::string provenance = "hand-built");

/// Truth value that action `t` (1..7) gives to literal position `u` (0..2).
/// The first literal is the most significant bit, so 6 = 110 sets the first
/// two literals true and the third false.
inline bool action_literal(int t, int u) { return ((t >> (2 - u)) & 1) != 0; }

/// True when action t in clause c and action t2 in clause c2 assign some
/// shared variable opposite values. With c == c2 and t == t2 this is the
/// self-contradiction test for clauses that repeat a variable.
bool contradicts(const Clause& c, int t, const Clause& c2, int t2);

struct Reduction {
  LisInstance instance;
  Eigen::MatrixXi contradiction;  // the 7k x 7k matrix A
};

/// d = 7k+1; environment 1 is (I, 1); environment 2 is
/// [[5d I + A, 1/2], [1/2, 5d]] with u = ((5d + 1/2) 1, 5d + k/2).
Reduction reduce_3sat(const CnfFormula& f);

struct DecodeResult {
  bool ok = false;
  Assignment assignment;
  std::string reason;  // set when !ok
};

/// Maps an index set (zero-based) of a reduced instance back to a satisfying assignment.
DecodeResult decode_solution(const IndexSet& s, const CnfFormula& f);

/// Action ID (0..7) that assignment `a` induces on a clause.
int action_id(const Clause& c, const Assignment& a);

/// {7(i-1) + a_i} plus the last coordinate, zero-based. Throws when `a` does not satisfy f.
IndexSet encode_action_profile(const Assignment& a, const CnfFormula& f);

}  // namespace igr::lab

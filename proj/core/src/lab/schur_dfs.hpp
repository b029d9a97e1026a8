#pragma once

// Fraction-free (Bareiss) Schur-complement walk over all nonempty subsets of
// [d] in lexicographic order. Each input matrix Sigma is bordered by its
// vector u (index d) and optional extra columns c_t; after pivoting on S the
// bordered entries give
//   u_S' Sigma_S^{-1} u_S = -N_uu / (D * L),   u_S' Sigma_S^{-1} c_S = -N_ut / (D * L)
// where D = det(L * Sigma_S) and L is the common denominator used to make the
// input integral. Each node costs O(m^2) integer operations, m = d - max(S).

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <vector>

#include "igr/linalg.hpp"

namespace igr::lab::detail {

class SchurDfs {
 public:
  struct Input {
    Mat<Rational> sigma;
    Vec<Rational> u;
    std::vector<Vec<Rational>> extra;  // virtual columns c_t
  };

  /// Per-matrix values at the current node.
  struct View {
    const mpz_class* n_uu;
    const mpz_class* det;
    const mpz_class* scale;          // L
    const mpz_class* n_ut;  // `extras` entries, one per extra column
    std::size_t extras;
  };

  /// visit(mask, views); mask bit j set iff j in S.
  using Visitor = std::function<void(std::uint64_t, const std::vector<View>&)>;

  explicit SchurDfs(const std::vector<Input>& inputs);

  void run(const Visitor& visit);

 private:
  struct Level {
    std::vector<mpz_class> sym;   // (d+1) x (d+1), upper triangle used
    std::vector<mpz_class> ext;   // (d+1) x T
    mpz_class det;
  };
  struct Matrix {
    mpz_class scale;
    std::size_t extras = 0;
    std::vector<Level> levels;  // depth 0..d
  };

  mpz_class& s(Level& l, int a, int b) {
    return a <= b ? l.sym[static_cast<std::size_t>(a) * n_ + static_cast<std::size_t>(b)]
                  : l.sym[static_cast<std::size_t>(b) * n_ + static_cast<std::size_t>(a)];
  }
  mpz_class& x(Level& l, std::size_t t, int a, std::size_t extras) {
    return l.ext[static_cast<std::size_t>(a) * extras + t];
  }
  void descend(int depth, int start, std::uint64_t mask, const Visitor& visit);

  int d_ = 0;
  std::size_t n_ = 0;  // d + 1
  std::vector<Matrix> mats_;
  std::vector<View> views_;
  mpz_class tmp_;
};

}  // namespace igr::lab::detail

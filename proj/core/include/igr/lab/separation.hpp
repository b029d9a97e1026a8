#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "igr/lab/reduction.hpp"

namespace igr::lab {

/// Exact gap diagnostics for an instance under the noiseless response
/// Y^(e) = (beta^(e,[d]))' X^(e), so E[Y^(e)^2] = u' Sigma^{-1} u.
///   heterogeneity(S) = sum_e ||beta^(S) - beta^(e,S)||^2_{Sigma^(e)} / sum_e E[Y^(e)^2]
///   distance(S, S+) = ||beta^(S) - beta^(S+)||^2_{Sigma} / sum_e E[Y^(e)^2]
/// with Sigma the pooled matrix and S+ ranging over invariant sets (the empty set included).
struct SeparationReport {
  int d = 0;
  std::uint64_t subsets = 0;
  std::size_t invariant_targets = 0;  // number of S+ compared against

  Rational total_mean_sq_y;                 // sum_e E[Y^(e)^2]
  std::vector<Rational> env_mean_sq_y;      // E[Y^(e)^2]
  Rational lambda_lower, lambda_upper;      // 4d, 6d
  bool eigen_bounds_hold = false;           // lower <= spectrum of Sigma^(2) <= upper, checked exactly
  Rational min_positive_heterogeneity;      // 0 if every S is invariant
  Rational max_heterogeneity;
  Rational min_distance;                    // over S != S+
  Rational max_distance;
  Rational heterogeneity_floor;             // (10d)^-4
  Rational distance_floor;                  // (40d)^-1
  std::uint64_t heterogeneity_violations = 0;
  std::uint64_t distance_violations = 0;
  std::vector<std::string> examples;        // first few violations

  bool variance_bound_holds() const;  // total <= 10 d^2
  bool ok() const;
};

struct SeparationOptions {
  int cap = 22;
  int second_environment = 1;  // environment whose spectrum is bounded
};

SeparationReport separation_diagnostics(const LisInstance& inst, const SeparationOptions& opts = {});

/// Exact check of lo*I <= Sigma <= hi*I via definiteness of the shifted matrices.
bool spectrum_within(const Mat<Rational>& sigma, const Rational& lo, const Rational& hi);

}  // namespace igr::lab

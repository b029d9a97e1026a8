#include "igr/lab/separation.hpp"

#include "igr/lab/invariance.hpp"
#include "schur_dfs.hpp"

namespace igr::lab {

namespace {

/// Unreduced nonnegative-denominator fraction for cheap comparisons.
struct Frac {
  mpz_class num = 0, den = 1;
};

bool less(const Frac& a, const Frac& b, mpz_class& l, mpz_class& r) {
  l = a.num * b.den;
  r = b.num * a.den;
  return l < r;
}

Rational to_rational(const Frac& f) { return Rational(mpq_class(f.num, f.den)); }

}  // namespace

bool spectrum_within(const Mat<Rational>& sigma, const Rational& lo, const Rational& hi) {
  const Eigen::Index n = sigma.rows();
  Mat<Rational> below = sigma, above = -sigma;
  for (Eigen::Index i = 0; i < n; ++i) {
    below(i, i) -= lo;
    above(i, i) += hi;
  }
  return classify_symmetric(below) != Definiteness::indefinite && classify_symmetric(above) != Definiteness::indefinite;
}

bool SeparationReport::variance_bound_holds() const { return total_mean_sq_y <= Rational(10L * d * d); }

bool SeparationReport::ok() const {
  return heterogeneity_violations == 0 && distance_violations == 0 && eigen_bounds_hold && variance_bound_holds();
}

SeparationReport separation_diagnostics(const LisInstance& inst, const SeparationOptions& opts) {
  const auto& m = inst.moments;
  const int d = m.d(), n_env = m.num_envs();
  check_cap(d, opts.cap);
  if (opts.second_environment < 0 || opts.second_environment >= n_env)
    throw ValidationError("second_environment out of range");

  SeparationReport rep;
  rep.d = d;
  rep.lambda_lower = Rational(4 * d);
  rep.lambda_upper = Rational(6 * d);
  rep.eigen_bounds_hold = spectrum_within(m.sigma[static_cast<std::size_t>(opts.second_environment)], rep.lambda_lower,
                                          rep.lambda_upper);
  IndexSet all(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) all[static_cast<std::size_t>(j)] = j;
  const auto full = restricted_ls(m, all);
  rep.total_mean_sq_y = Rational(0);
  for (int e = 0; e < n_env; ++e) {
    const Rational y2 = m.u[static_cast<std::size_t>(e)].dot(full.env_beta[static_cast<std::size_t>(e)]);
    rep.env_mean_sq_y.push_back(y2);
    rep.total_mean_sq_y += y2;
  }
  rep.heterogeneity_floor = Rational(1) / Rational(10L * d * 10L * d * 10L * d * 10L * d);
  rep.distance_floor = Rational(1) / Rational(40L * d);

  // Targets S+: the empty set and every invariant set.
  EnumerationOptions eo;
  eo.cap = std::max(opts.cap, d);
  const auto inv = enumerate_invariant_sets(m, eo);
  std::vector<IndexSet> targets{IndexSet{}};
  targets.insert(targets.end(), inv.sets.begin(), inv.sets.end());
  targets.insert(targets.end(), inv.zero_beta_sets.begin(), inv.zero_beta_sets.end());
  rep.invariant_targets = targets.size();

  const Rational E(n_env);
  const Mat<Rational> ssum = m.pooled_sigma * E;
  const Vec<Rational> usum = m.pooled_u * E;
  std::vector<Vec<Rational>> extra;
  std::vector<Rational> q_target;
  std::vector<std::uint64_t> target_mask;
  for (const auto& t : targets) {
    const Vec<Rational> bt = restricted_ls(m, t).pooled_beta;
    extra.push_back(ssum * bt);
    q_target.push_back(usum.dot(bt));
    target_mask.push_back(mask_from_set(t));
  }

  // Bounds rewritten for the walk: with w = -N_uu + 2 N_ut and DL = D * L,
  //   ||b_S - b_t||^2_{Sigma_sum} = w / DL + q_t, normalized by |E| * total.
  const Rational scale = E * rep.total_mean_sq_y;
  std::vector<mpq_class> lo_rhs, hi_rhs;
  for (const auto& q : q_target) {
    lo_rhs.push_back((scale * rep.distance_floor - q).value());
    hi_rhs.push_back((scale - q).value());
  }
  const mpq_class het_lo = (rep.total_mean_sq_y * rep.heterogeneity_floor).value();
  const mpq_class het_hi = rep.total_mean_sq_y.value();

  std::vector<detail::SchurDfs::Input> inputs;
  for (int e = 0; e < n_env; ++e) inputs.push_back({m.sigma[static_cast<std::size_t>(e)], m.u[static_cast<std::size_t>(e)], {}});
  inputs.push_back({ssum, usum, extra});

  Frac het_min_pos, het_max, dist_min, dist_max;
  bool have_het = false, have_dist = false;
  mpz_class l, r, term, w;
  std::vector<mpz_class> den(inputs.size());
  Frac het;  // sum_e q_e - q_sum
  auto note = [&](const std::string& s) {
    if (rep.examples.size() < 8) rep.examples.push_back(s);
  };

  // Distance of a fraction value (w/DL + q_t) tracked as Frac after adding q_t.
  auto track_distance = [&](const Frac& val, std::uint64_t mask, std::size_t t) {
    const bool same = mask == target_mask[t];
    if (!same) {
      if (!have_dist || less(val, dist_min, l, r)) dist_min = val;
      have_dist = true;
    }
    if (!have_dist || less(dist_max, val, l, r)) dist_max = val;
  };

  // The empty set itself: heterogeneity 0, distances q_t.
  for (std::size_t t = 0; t < targets.size(); ++t) {
    Frac v{q_target[t].value().get_num(), q_target[t].value().get_den()};
    const Rational norm = q_target[t] / scale;
    if ((t != 0 && norm < rep.distance_floor) || norm > Rational(1)) {
      ++rep.distance_violations;
      note("distance({}, " + format_set(targets[t]) + ") = " + norm.str());
    }
    track_distance(v, 0, t);
  }

  detail::SchurDfs walk(inputs);
  walk.run([&](std::uint64_t mask, const std::vector<detail::SchurDfs::View>& v) {
    ++rep.subsets;
    const std::size_t ns = v.size() - 1;
    for (std::size_t i = 0; i < v.size(); ++i) den[i] = *v[i].det * *v[i].scale;
    het.num = 0;
    het.den = 1;
    for (std::size_t i = 0; i < v.size(); ++i) {
      het.den *= den[i];
      term = *v[i].n_uu;
      for (std::size_t k = 0; k < v.size(); ++k)
        if (k != i) term *= den[k];
      if (i == ns) het.num += term;
      else het.num -= term;
    }
    // Interval {0} u [floor, 1] after normalization by the total.
    if (sgn(het.num) != 0) {
      l = het.num * het_lo.get_den();
      r = het_lo.get_num() * het.den;
      const bool below = l < r;
      l = het.num * het_hi.get_den();
      r = het_hi.get_num() * het.den;
      const bool above = l > r;
      if (below || above || sgn(het.num) < 0) {
        ++rep.heterogeneity_violations;
        note("heterogeneity" + format_set(set_from_mask(mask)) + " = " +
             (to_rational(het) / rep.total_mean_sq_y).str());
      }
      if (!have_het || less(het, het_min_pos, l, r)) het_min_pos = het;
      have_het = true;
      if (less(het_max, het, l, r)) het_max = het;
    }

    const mpz_class& dl = den[ns];
    for (std::size_t t = 0; t < targets.size(); ++t) {
      w = 2 * v[ns].n_ut[t] - *v[ns].n_uu;
      const bool same = mask == target_mask[t];
      // w/DL >= lo_rhs  <=>  w * lo.den >= lo.num * DL
      if (!same) {
        l = w * lo_rhs[t].get_den();
        r = lo_rhs[t].get_num() * dl;
        if (l < r) {
          ++rep.distance_violations;
          note("distance(" + format_set(set_from_mask(mask)) + ", " + format_set(targets[t]) + ") below floor");
        }
      }
      l = w * hi_rhs[t].get_den();
      r = hi_rhs[t].get_num() * dl;
      if (l > r) {
        ++rep.distance_violations;
        note("distance(" + format_set(set_from_mask(mask)) + ", " + format_set(targets[t]) + ") above 1");
      }
      // Value w/DL + q_t as a fraction.
      const mpq_class& q = q_target[t].value();
      Frac val{w * q.get_den() + q.get_num() * dl, dl * q.get_den()};
      track_distance(val, mask, t);
    }
  });

  rep.min_positive_heterogeneity = have_het ? to_rational(het_min_pos) / rep.total_mean_sq_y : Rational(0);
  rep.max_heterogeneity = to_rational(het_max) / rep.total_mean_sq_y;
  rep.min_distance = have_dist ? to_rational(dist_min) / scale : Rational(0);
  rep.max_distance = to_rational(dist_max) / scale;
  return rep;
}

}  // namespace igr::lab

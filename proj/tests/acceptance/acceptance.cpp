// Acceptance suite: one [PASS]/[FAIL] line per criterion. Run everything, or
// a single criterion with --criterion NAME (as ctest does).

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "igr/lab/cnf.hpp"
#include "igr/lab/gadget.hpp"
#include "igr/lab/invariance.hpp"
#include "igr/lab/reduction.hpp"
#include "igr/lab/separation.hpp"
#include "igr/pipeline.hpp"
#include "igr/scm.hpp"
#include "igr/solver.hpp"
#include "support/oracles.hpp"

using namespace igr;
using namespace igr::lab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

/// Random 3-CNF corpus: k in {1,2,3}, 3 to 6 variables.
std::vector<CnfFormula> corpus(int count, std::uint64_t seed0) {
  std::vector<CnfFormula> out;
  for (int i = 0; i < count; ++i) out.push_back(random_formula(1 + i % 3, 3 + (i / 3) % 4, seed0 + static_cast<std::uint64_t>(i)));
  return out;
}

// Independent truth table: variable 1 most significant.
std::vector<Assignment> truth_table(const CnfFormula& f) {
  std::vector<Assignment> out;
  for (std::uint64_t bits = 0; bits < (1ULL << f.n_vars); ++bits) {
    Assignment a(static_cast<std::size_t>(f.n_vars));
    for (int v = 0; v < f.n_vars; ++v) a[static_cast<std::size_t>(v)] = (bits >> (f.n_vars - 1 - v)) & 1;
    bool sat = true;
    for (const auto& c : f.clauses) {
      bool any = false;
      for (int lit : c) {
        const bool val = a[static_cast<std::size_t>(std::abs(lit) - 1)];
        any = any || (lit > 0 ? val : !val);
      }
      sat = sat && any;
    }
    if (sat) out.push_back(a);
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return 0.5 * (v[(v.size() - 1) / 2] + v[v.size() / 2]);
}

EnvMomentSet<double> ex31_population() {
  return convert_moments<double>(population_moments(make_example(ExampleName::ex3_1)).moments);
}

/// Population moments of a few random SCMs, plus the three-variable example.
std::vector<EnvMomentSet<double>> instance_pool() {
  std::vector<EnvMomentSet<double>> out{ex31_population()};
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    RandomScmConfig cfg;
    cfg.d = 4 + static_cast<int>(seed % 3);
    cfg.seed = 500 + seed;
    auto m = convert_moments<double>(population_moments(random_scm(cfg)).moments);
    out.push_back(m);
  }
  return out;
}

// --- criteria ----------------------------------------------------------------

Outcome parsimony() {
  const auto t0 = Clock::now();
  auto formulas = corpus(60, 1);
  formulas.push_back(problem1_formula());
  int bad = 0;
  std::string first;
  for (const auto& f : formulas) {
    const auto red = reduce_3sat(f);
    const auto inv = enumerate_invariant_sets(red.instance.moments);
    const auto found = inv.sets.size() + inv.zero_beta_sets.size();
    const auto want = sat_brute_force(f, false).count;
    if (found != want) {
      ++bad;
      if (first.empty()) first = " first mismatch: " + std::to_string(found) + " sets vs " + std::to_string(want) + " solutions";
    }
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs <= 300.0, std::to_string(formulas.size()) + " formulas, " + std::to_string(bad) +
                                         " mismatches, " + fmt(secs) + " s" + first};
}

Outcome ex2_1_sets() {
  const auto t0 = Clock::now();
  const auto m = population_moments(make_example(ExampleName::ex2_1)).moments;
  const auto inv = enumerate_invariant_sets(m);
  std::set<IndexSet> all(inv.sets.begin(), inv.sets.end());
  all.insert(inv.zero_beta_sets.begin(), inv.zero_beta_sets.end());
  const std::set<IndexSet> want{{0}, {1}, {3}, {0, 1}, {0, 3}, {1, 3}, {0, 1, 3}};
  const auto maxi = maximum_invariant_sets(m);
  const std::vector<IndexSet> want_max{{0, 1}, {0, 1, 3}};
  const double secs = seconds_since(t0);
  return {all == want && maxi == want_max && secs < 1.0,
          std::to_string(all.size()) + " invariant sets, " + std::to_string(maxi.size()) + " maximum, " + fmt(secs) + " s"};
}

Outcome ex2_2_sets() {
  const auto t0 = Clock::now();
  const auto m = population_moments(make_example(ExampleName::ex2_2)).moments;
  const bool ok = is_invariant(m, {0}) && is_invariant(m, {1}) && !is_invariant(m, {0, 1});
  const auto inv = enumerate_invariant_sets(m);
  const auto maxi = maximum_invariant_sets(m);
  const double secs = seconds_since(t0);
  return {ok && inv.sets == std::vector<IndexSet>{{0}, {1}} && maxi.empty() && secs < 1.0,
          std::to_string(inv.sets.size()) + " invariant sets, " + std::to_string(maxi.size()) + " maximum, " + fmt(secs) + " s"};
}

Outcome eigen_variance_bounds() {
  auto formulas = corpus(60, 1);
  formulas.push_back(problem1_formula());
  int bad = 0;
  for (const auto& f : formulas) {
    const auto red = reduce_3sat(f);
    const auto& m = red.instance.moments;
    const int d = m.d();
    const bool window = spectrum_within(m.sigma[1], Rational(4 * d), Rational(6 * d));
    Rational total(0), first(0);
    for (int e = 0; e < m.num_envs(); ++e) {
      const auto x = solve_linear(m.sigma[e], m.u[e]);
      if (!x) {
        ++bad;
        continue;
      }
      const Rational y2 = m.u[e].dot(*x);
      total += y2;
      if (e == 0) first = y2;
    }
    if (!window || !(total <= Rational(10L * d * d)) || !(first == Rational(d))) ++bad;
  }
  return {bad == 0, std::to_string(formulas.size()) + " reduced instances, " + std::to_string(bad) + " violations"};
}

Outcome separation() {
  std::vector<CnfFormula> fs;
  for (std::uint64_t s = 0; s < 4; ++s) fs.push_back(random_formula(1, 3 + static_cast<int>(s % 3), 40 + s));
  for (std::uint64_t s = 0; s < 2; ++s) fs.push_back(random_formula(2, 4, 50 + s));
  fs.push_back(random_formula(3, 5, 60));
  int bad = 0;
  std::string first;
  const auto t0 = Clock::now();
  for (const auto& f : fs) {
    const auto rep = separation_diagnostics(reduce_3sat(f).instance);
    if (!rep.ok()) {
      ++bad;
      if (first.empty() && !rep.examples.empty()) first = "; " + rep.examples.front();
    }
  }
  return {bad == 0, std::to_string(fs.size()) + " instances (d = 8, 15, 22), " + std::to_string(bad) + " failing, " +
                        fmt(seconds_since(t0)) + " s" + first};
}

Outcome weight_values() {
  const auto w = weight_table(population_moments(make_example(ExampleName::ex3_1)).moments, 1);
  const double want[3] = {0.0, 1.0 / 6.0, 0.25};
  bool ok = true;
  for (int j = 0; j < 3; ++j) ok = ok && std::abs(w.w[static_cast<std::size_t>(j)] - want[j]) <= 1e-12;
  return {ok, "computed squared-scale w1 = (" + w.v_exact[0] + ", " + w.v_exact[1] + ", " + w.v_exact[2] +
                  "), expected (0, 1/6, 1/4)"};
}

Outcome causal_identification() {
  const auto oracle = population_moments(make_example(ExampleName::ex3_1));
  const auto m = convert_moments<double>(oracle.moments);
  const auto w = weight_table(m, 1);
  const double gs = gamma_star(oracle, weight_table(oracle.moments, 1));
  SolveOptions opts;
  opts.tol = 1e-14;
  const auto fit = solve(m, w, 1.01 * gs, 0.0, opts);
  const double id_err = (fit.beta - Eigen::Vector3d(1, 0, 0)).lpNorm<Eigen::Infinity>();
  const auto ols = solve(m, w, 0.0, 0.0, opts);
  const double ols_err = (ols.beta - m.pooled_sigma.ldlt().solve(m.pooled_u)).lpNorm<Eigen::Infinity>();
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.01 * i);
  const auto path = solution_path(m, w, grid, 0.0, opts);
  const bool order = path.zero_from_gamma[2] <= path.zero_from_gamma[1];
  return {id_err <= 1e-6 && ols_err <= 1e-8 && order,
          "gamma* = " + fmt(gs) + ", error at 1.01 gamma* = " + fmt(id_err) + ", OLS error = " + fmt(ols_err) +
              ", X3 zero from " + fmt(path.zero_from_gamma[2]) + ", X2 zero from " + fmt(path.zero_from_gamma[1])};
}

Outcome solver_optimality() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> n01;
  double worst_kkt = 0, worst_gap = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int d = 1 + rep % 30;
    const Eigen::MatrixXd s = oracle::random_spd(d, rng);
    Eigen::VectorXd u(d), p(d);
    for (int j = 0; j < d; ++j) {
      u(j) = n01(rng);
      p(j) = unif(rng) < 0.2 ? 0.0 : unif(rng);
    }
    const auto fit = solve_weighted_lasso(s, u, p);
    const Eigen::VectorXd ref = oracle::fista(s, u, p);
    worst_kkt = std::max(worst_kkt, kkt_residual(fit.beta, s, u, p));
    worst_gap = std::max(worst_gap, std::abs(quadratic_objective(fit.beta, s, u, p, 0) - quadratic_objective(ref, s, u, p, 0)));
  }
  return {worst_kkt <= 1e-6 && worst_gap <= 1e-8,
          "100 problems, max KKT " + fmt(worst_kkt) + ", max objective gap " + fmt(worst_gap)};
}

Outcome strong_convexity_shrinkage() {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n01;
  double worst_gap = INFINITY, worst_shrink = -INFINITY;
  int count = 0;
  for (const auto& m : instance_pool()) {
    const int d = m.d();
    const auto w = weight_table(m, std::min(2, d));
    const Eigen::VectorXd ols = m.pooled_sigma.ldlt().solve(m.pooled_u);
    const double ols_norm = ols.dot(m.pooled_sigma * ols);
    for (double g : {0.0, 0.1, 0.5, 1.0, 2.0, 4.0}) {
      SolveOptions opts;
      opts.tol = 1e-14;
      const auto fit = solve(m, w, g, 0.0, opts);
      const double f0 = objective(fit.beta, m, w, g, 0.0, 0.0);
      for (int t = 0; t < 1000; ++t) {
        Eigen::VectorXd delta(d);
        const double scale = std::pow(10.0, -3.0 + 3.0 * (t % 4) / 3.0);
        for (int j = 0; j < d; ++j) delta(j) = scale * n01(rng);
        const double gap = objective(fit.beta + delta, m, w, g, 0.0, 0.0) - f0;
        const double quad = 0.5 * delta.dot(m.pooled_sigma * delta);
        worst_gap = std::min(worst_gap, gap - quad + 1e-12 * (1 + std::abs(f0)));
        ++count;
      }
      worst_shrink = std::max(worst_shrink, fit.beta.dot(m.pooled_sigma * fit.beta) - ols_norm * (1 + 1e-12));
    }
  }
  return {worst_gap >= 0.0 && worst_shrink <= 0.0,
          std::to_string(count) + " perturbations, min(gap - quadratic) " + fmt(worst_gap) +
              ", max shrinkage excess " + fmt(worst_shrink)};
}

Outcome uncertainty_set() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  double worst_slack = INFINITY, worst_min = -INFINITY;
  for (const auto& m : instance_pool()) {
    const int d = m.d();
    const auto w = weight_table(m, std::min(2, d));
    const auto ldlt = m.pooled_sigma.ldlt();
    for (double g : {0.1, 0.5, 1.0, 3.0}) {
      SolveOptions opts;
      opts.tol = 1e-14;
      const auto fit = solve(m, w, g, 0.0, opts);
      for (double s : uncertainty_membership(fit.beta, m, w, g)) worst_slack = std::min(worst_slack, s);
      const double own = fit.beta.dot(m.pooled_sigma * fit.beta);
      for (int t = 0; t < 1000; ++t) {
        // b = Sigma^{-1}(u + r) with |r_j| <= gamma sqrt(v_j) lies in Theta_gamma.
        Eigen::VectorXd r(d);
        for (int j = 0; j < d; ++j) r(j) = unif(rng) * g * w.penalty_weight(j);
        const Eigen::VectorXd b = ldlt.solve(m.pooled_u + r);
        worst_min = std::max(worst_min, own - b.dot(m.pooled_sigma * b) - 1e-10);
      }
    }
  }
  return {worst_slack >= -1e-8 && worst_min <= 0.0,
          "min membership slack " + fmt(worst_slack) + ", max excess over sampled members " + fmt(worst_min)};
}

Outcome restricted_invariance() {
  int checked = 0, bad = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (auto regime : {Regime::block_orthogonal, Regime::no_ancestor_intervention}) {
      RandomScmConfig cfg;
      cfg.d = 6;
      cfg.regime = regime;
      cfg.block_size = 2;
      cfg.seed = seed;
      const auto o = population_moments(random_scm(cfg));
      const int k = regime == Regime::block_orthogonal ? cfg.block_size : 1;
      const auto w = weight_table(o.moments, k);
      for (int j : o.s_star) {
        ++checked;
        if (!(w.v[static_cast<std::size_t>(j)] <= 1e-10)) ++bad;
      }
    }
  }
  return {bad == 0 && checked > 0, "20 SCMs, " + std::to_string(checked) + " causal weights, " + std::to_string(bad) + " nonzero"};
}

Outcome rate() {
  const auto t0 = Clock::now();
  const auto t = rate_experiment(make_example(ExampleName::ex3_1).convert<double>(), RateConfig{});
  const double secs = seconds_since(t0);
  std::string med;
  for (double x : t.medians) med += (med.empty() ? "" : ", ") + fmt(x);
  return {t.monotone && t.slope >= -0.7 && t.slope <= -0.3 && secs <= 180.0,
          "medians (" + med + "), slope " + fmt(t.slope) + ", " + fmt(secs) + " s"};
}

Outcome xor_gadget() {
  int formulas = 0, masks = 0, bad = 0;
  for (int i = 0; i < 24; ++i) {
    const auto f = random_formula(1 + i % 3, 3 + i % 4, 900 + static_cast<std::uint64_t>(i));
    const int n = f.n_vars;
    const auto sols = truth_table(f);
    ++formulas;
    for (std::uint64_t bits = 1; bits < (1ULL << n); ++bits) {
      std::vector<bool> mask(static_cast<std::size_t>(n));
      for (int v = 0; v < n; ++v) mask[static_cast<std::size_t>(v)] = (bits >> v) & 1;
      std::set<Assignment> want;
      for (const auto& a : sols) {
        bool parity = false;
        for (int v = 0; v < n; ++v) parity ^= a[static_cast<std::size_t>(v)] && mask[static_cast<std::size_t>(v)];
        if (!parity) want.insert(a);
      }
      const auto got_all = sat_brute_force(with_parity_constraint(f, mask)).solutions;
      std::set<Assignment> got;
      for (const auto& a : got_all) got.insert(Assignment(a.begin(), a.begin() + n));
      ++masks;
      // Auxiliary variables are determined, so counts must match too.
      if (got != want || got_all.size() != want.size()) ++bad;
    }
  }
  return {bad == 0, std::to_string(formulas) + " formulas, " + std::to_string(masks) + " masks, " + std::to_string(bad) + " mismatches"};
}

Outcome distribution_shift() {
  const auto scm = make_example(ExampleName::ex3_1).convert<double>();
  const auto shifted = make_example_3_1_shifted();
  std::vector<double> igr_err, ols_err, gammas;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto train = sample(scm, 400, 1000 + s);
    auto valid = sample(shifted, 400, 2000 + s).env(0);
    auto test = sample(shifted, 2000, 3000 + s).env(0);
    auto rep = igr_fit(train, valid);
    evaluate(rep, {test});
    GridConfig ols_cfg;
    ols_cfg.gammas = {0.0};
    ols_cfg.lambdas = {0.0};
    const auto ols = igr_fit(train, valid, ols_cfg);
    igr_err.push_back(rep.test_mse[0]);
    ols_err.push_back(mse(ols.beta, test, true));
    gammas.push_back(rep.gamma);
  }
  const double mi = median(igr_err), mo = median(ols_err), mg = median(gammas);
  return {mg > 0.0 && mi <= mo,
          "median selected gamma " + fmt(mg) + ", median test MSE " + fmt(mi) + " vs pooled OLS " + fmt(mo)};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> r{
      {"parsimony", parsimony},
      {"ex2_1_sets", ex2_1_sets},
      {"ex2_2_sets", ex2_2_sets},
      {"eigen_variance_bounds", eigen_variance_bounds},
      {"separation", separation},
      {"weight_values", weight_values},
      {"causal_identification", causal_identification},
      {"solver_optimality", solver_optimality},
      {"strong_convexity_shrinkage", strong_convexity_shrinkage},
      {"uncertainty_set", uncertainty_set},
      {"restricted_invariance", restricted_invariance},
      {"rate", rate},
      {"xor_gadget", xor_gadget},
      {"distribution_shift", distribution_shift},
  };
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::vector<std::string> only;
  bool list = false;
  app.add_option("--criterion", only, "Run only these criteria");
  app.add_flag("--list", list, "Print criterion names");
  CLI11_PARSE(app, argc, argv);

  if (list) {
    for (const auto& [name, fn] : registry()) std::cout << name << '\n';
    return 0;
  }
  for (const auto& name : only) {
    const auto& r = registry();
    if (std::none_of(r.begin(), r.end(), [&](const auto& e) { return e.first == name; })) {
      std::cerr << "unknown criterion " << name << '\n';
      return 2;
    }
  }
  int failed = 0;
  for (const auto& [name, fn] : registry()) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}

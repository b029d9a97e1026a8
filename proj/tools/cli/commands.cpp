#include "cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <random>
#include <sstream>

#include "cli/json_config.hpp"
#include "igr/json_io.hpp"
#include "igr/lab/cnf.hpp"
#include "igr/lab/invariance.hpp"
#include "igr/lab/reduction.hpp"
#include "igr/lab/separation.hpp"
#include "igr/pipeline.hpp"
#include "igr/scm.hpp"

namespace igr::cli {

namespace fs = std::filesystem;

namespace {

/// Where moments come from: sample CSVs, an instance file, or a named example.
struct Source {
  std::string train;
  std::string instance;
  std::string example;
  bool center = true;
  bool normalize = false;

  void add_to(CLI::App* app) {
    app->add_option("--train", train, "Directory with one CSV per environment");
    app->add_option("--instance", instance, "Instance JSON with exact moments");
    app->add_option("--example", example, "Named example: ex2_1, ex2_2, ex3_1");
    app->add_flag("--center,!--no-center", center, "Center each environment (sample data)");
    app->add_flag("--normalize,!--no-normalize", normalize, "Rescale to unit pooled variance (sample data)");
  }

  int count() const { return !train.empty() + !instance.empty() + !example.empty(); }
  void check() const {
    if (count() != 1) throw ValidationError("give exactly one of --train, --instance, --example");
  }
  std::string describe() const {
    if (!train.empty()) return "train:" + train;
    if (!instance.empty()) return "instance:" + instance;
    return "example:" + example;
  }

  EnvMomentSet<double> moments() const {
    check();
    if (!train.empty()) {
      MomentOptions mo;
      mo.center = center;
      mo.normalize = normalize;
      return moments_from_samples(read_dataset_dir(train), mo);
    }
    if (!instance.empty()) return convert_moments<double>(instance_from_json(read_json_file(instance)).moments);
    return convert_moments<double>(population_moments(make_example(parse_example_name(example))).moments);
  }
};

void emit(const Json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_json_file(out_path, j);
  }
}

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Environment> read_envs(const std::vector<std::string>& paths) {
  std::vector<Environment> out;
  for (const auto& p : paths) out.push_back(read_environment_csv(p));
  return out;
}

// --- fit -----------------------------------------------------------------

struct FitArgs {
  std::string train, out;
  std::vector<std::string> valid, test;
  GridConfig grid;
  std::string convention = "squared";
};

int do_fit(const FitArgs& a, std::ostream& out) {
  GridConfig cfg = a.grid;
  cfg.convention = parse_convention(a.convention);
  const auto train = read_dataset_dir(a.train);
  FitReport rep = igr_fit(train, read_envs(a.valid), cfg);
  if (!a.test.empty()) evaluate(rep, read_envs(a.test));
  emit(report_to_json(rep), a.out, out);
  return kOk;
}

// --- weights / path ------------------------------------------------------

struct WeightArgs {
  Source src;
  int k = 1;
  std::string convention = "squared";
  int threads = 1;
  std::string out;
};

int do_weights(const WeightArgs& a, std::ostream& out) {
  a.src.check();
  const auto conv = parse_convention(a.convention);
  WeightTable w;
  // Exact backends for exact inputs, so v(S) = 0 is decided without tolerance.
  if (!a.src.instance.empty()) {
    w = weight_table(instance_from_json(read_json_file(a.src.instance)).moments, a.k, conv, a.threads);
  } else if (!a.src.example.empty()) {
    w = weight_table(population_moments(make_example(parse_example_name(a.src.example))).moments, a.k, conv,
                     a.threads);
  } else {
    w = weight_table(a.src.moments(), a.k, conv, a.threads);
  }
  Json j = weights_to_json(w);
  j["source"] = a.src.describe();
  emit(j, a.out, out);
  return kOk;
}

struct PathArgs {
  Source src;
  int k = 1;
  std::vector<double> gammas = default_gamma_grid();
  double lambda = 0.0;
  std::string convention = "squared";
  std::string out;
};

int do_path(const PathArgs& a, std::ostream& out) {
  const auto m = a.src.moments();
  const auto w = weight_table(m, a.k, parse_convention(a.convention));
  auto grid = a.gammas;
  std::sort(grid.begin(), grid.end());
  const auto path = solution_path(m, w, grid, a.lambda);
  Json j = path_to_json(path);
  j["weights"] = weights_to_json(w);
  j["source"] = a.src.describe();
  emit(j, a.out, out);
  return kOk;
}

// --- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string example;
  std::string regime;
  int d = 5;
  int block_size = 2;
  int envs = 2;
  long n = 1000;
  std::uint64_t seed = 1;
  bool shifted = false;
  std::string out;
};

int do_synth(const SynthArgs& a, std::ostream& out) {
  if (a.example.empty() == a.regime.empty()) throw ValidationError("give exactly one of --example, --regime");
  if (a.n < 1) throw ValidationError("--n must be >= 1");
  LinearScm<double> scm;
  if (!a.example.empty()) {
    scm = make_example(parse_example_name(a.example)).convert<double>();
  } else {
    RandomScmConfig rc;
    rc.d = a.d;
    rc.regime = parse_regime(a.regime);
    rc.block_size = a.block_size;
    rc.num_envs = a.envs;
    rc.seed = a.seed;
    scm = random_scm(rc).convert<double>();
  }
  fs::create_directories(a.out);
  const auto data = sample(scm, a.n, a.seed);
  for (const auto& env : data.envs()) write_environment_csv(fs::path(a.out) / (env.id + ".csv"), env);
  Json oracle = oracle_to_json(population_moments(scm));
  oracle["name"] = scm.name;
  oracle["n"] = a.n;
  oracle["seed"] = a.seed;
  if (a.shifted) {
    if (a.example != "ex3_1") throw ValidationError("--shifted-test is only defined for ex3_1");
    const auto shifted = make_example_3_1_shifted();
    auto test = sample(shifted, a.n, a.seed + 0x9e3779b97f4a7c15ULL).env(0);
    test.id = "test";
    write_environment_csv(fs::path(a.out) / "test.csv", test);
  }
  write_json_file(fs::path(a.out) / "oracle.json", oracle);
  out << "wrote " << data.num_envs() << " environments of n=" << a.n << " to " << a.out << '\n';
  return kOk;
}

// --- reduce-sat / enumerate-invariant -------------------------------------

int do_reduce(const std::string& input, const std::string& out_path, std::ostream& out) {
  const auto f = lab::parse_dimacs(read_text(input));
  const auto red = lab::reduce_3sat(f);
  emit(instance_to_json(red.instance), out_path, out);
  return kOk;
}

struct EnumArgs {
  std::string instance, example, cnf;
  std::string strategy = "auto";
  int cap = 24;
  bool maximum = false;
  bool separation = false;
  std::string out;
};

int do_enumerate(const EnumArgs& a, std::ostream& out) {
  if (!a.instance.empty() + !a.example.empty() + !a.cnf.empty() != 1)
    throw ValidationError("give exactly one of --instance, --example, --cnf");
  lab::EnumerationOptions eo;
  eo.strategy = lab::parse_strategy(a.strategy);
  eo.cap = a.cap;
  Json j;
  if (!a.example.empty()) {
    if (a.separation) throw ValidationError("--separation needs a reduced instance");
    const auto m = population_moments(make_example(parse_example_name(a.example))).moments;
    if (eo.strategy == lab::Strategy::automatic) eo.strategy = lab::Strategy::brute_force;
    j = invariant_sets_to_json(lab::enumerate_invariant_sets(m, eo));
    if (a.maximum) {
      Json mx = Json::array();
      for (const auto& s : lab::maximum_invariant_sets(m, eo)) mx.push_back(set_to_json(s));
      j["maximum_invariant_sets"] = std::move(mx);
    }
  } else {
    const auto inst = !a.cnf.empty() ? lab::reduce_3sat(lab::parse_dimacs(read_text(a.cnf))).instance
                                     : instance_from_json(read_json_file(a.instance));
    j = invariant_sets_to_json(lab::enumerate_invariant_sets(inst.moments, eo));
    if (a.maximum) {
      Json mx = Json::array();
      for (const auto& s : lab::maximum_invariant_sets(inst.moments, eo)) mx.push_back(set_to_json(s));
      j["maximum_invariant_sets"] = std::move(mx);
    }
    if (a.separation) {
      lab::SeparationOptions so;
      so.cap = std::min(a.cap, 22);
      j["separation"] = separation_to_json(lab::separation_diagnostics(inst, so));
    }
  }
  emit(j, a.out, out);
  return kOk;
}

// --- verify-parsimony ------------------------------------------------------

struct ParsimonyArgs {
  std::vector<std::string> inputs;
  int random = 0;
  int max_clauses = 3;
  std::uint64_t seed = 1;
  bool problem1 = false;
  bool separation = false;
  std::string strategy = "auto";
  std::string out;
};

int do_parsimony(const ParsimonyArgs& a, std::ostream& out) {
  if (a.max_clauses < 1) throw ValidationError("--max-clauses must be >= 1");
  std::vector<std::pair<std::string, lab::CnfFormula>> corpus;
  for (const auto& p : a.inputs) corpus.emplace_back(p, lab::parse_dimacs(read_text(p)));
  if (a.problem1) corpus.emplace_back("problem1", lab::problem1_formula());
  std::mt19937_64 rng(a.seed);
  for (int i = 0; i < a.random; ++i) {
    const int k = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(a.max_clauses));
    const int n = 3 + static_cast<int>(rng() % static_cast<std::uint64_t>(3 * k - 2));
    corpus.emplace_back("random-" + std::to_string(i), lab::random_formula(k, n, rng()));
  }
  if (corpus.empty()) throw ValidationError("no formulas: give files, --random N or --problem1");

  lab::EnumerationOptions eo;
  eo.strategy = lab::parse_strategy(a.strategy);
  Json rows = Json::array();
  int failures = 0;
  for (const auto& [name, f] : corpus) {
    const auto sat = lab::sat_brute_force(f, false);
    const auto red = lab::reduce_3sat(f);
    const auto inv = lab::enumerate_invariant_sets(red.instance.moments, eo);
    bool ok = inv.sets.size() == sat.count && inv.zero_beta_sets.empty();
    Json row{{"formula", name}, {"clauses", f.k()}, {"variables", f.n_vars}, {"d", red.instance.d()},
             {"sat_count", sat.count}, {"invariant_sets", inv.sets.size()}};
    if (a.separation && red.instance.d() <= 22) {
      const auto rep = lab::separation_diagnostics(red.instance);
      row["separation_ok"] = rep.ok();
      ok = ok && rep.ok();
    }
    row["pass"] = ok;
    failures += !ok;
    out << (ok ? "PASS " : "FAIL ") << name << " k=" << f.k() << " sat=" << sat.count
        << " invariant=" << inv.sets.size() << '\n';
    rows.push_back(std::move(row));
  }
  out << (failures == 0 ? "all " : "") << corpus.size() - static_cast<std::size_t>(failures) << "/" << corpus.size()
      << " formulas passed\n";
  if (!a.out.empty())
    write_json_file(a.out, Json{{"schema_version", kSchemaVersion}, {"formulas", std::move(rows)},
                                {"failures", failures}});
  return failures == 0 ? kOk : kCheckFailed;
}

// --- rate-exp --------------------------------------------------------------

struct RateArgs {
  std::string example = "ex3_1";
  RateConfig cfg;
  std::string convention = "squared";
  std::string out;
};

int do_rate(RateArgs a, std::ostream& out) {
  a.cfg.convention = parse_convention(a.convention);
  const auto scm = make_example(parse_example_name(a.example)).convert<double>();
  const auto t = rate_experiment(scm, a.cfg);
  Json j = rate_to_json(t, a.cfg);
  j["example"] = a.example;
  emit(j, a.out, out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Invariance-guided regression toolkit", "igr"};
  app.require_subcommand(1);
  // Subcommands let unknown options fall through, so `igr fit --config f.json` works.
  app.fallthrough();
  auto config = std::make_shared<JsonConfig>();
  app.config_formatter(config);
  app.set_config("--config", "", "JSON file with option values; flags override it");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Grid-search (gamma, lambda) on training environments");
  c_fit->add_option("--train", fit.train, "Directory of training CSVs")->required();
  c_fit->add_option("--valid", fit.valid, "Validation CSV (several are averaged)")->required();
  c_fit->add_option("--test", fit.test, "Test CSVs for MSE and worst-case R2");
  c_fit->add_option("--k", fit.grid.k, "Subset budget")->capture_default_str();
  c_fit->add_option("--gamma-grid", fit.grid.gammas, "Comma-separated gamma values")->delimiter(',');
  c_fit->add_option("--lambda-grid", fit.grid.lambdas, "Comma-separated lambda values")->delimiter(',');
  c_fit->add_flag("--normalize,!--no-normalize", fit.grid.normalize, "Unit pooled variance before fitting");
  c_fit->add_flag("--center,!--no-center", fit.grid.center, "Center each environment");
  c_fit->add_option("--convention", fit.convention, "Weight table scale: sqrt or squared");
  c_fit->add_option("--threads", fit.grid.threads, "Worker threads")->capture_default_str();
  c_fit->add_option("--tol", fit.grid.solver.tol, "Coordinate change stopping tolerance");
  c_fit->add_option("--max-sweeps", fit.grid.solver.max_sweeps, "Sweep cap");
  c_fit->add_option("--out", fit.out, "Report JSON path (stdout if omitted)");

  WeightArgs wts;
  auto* c_w = app.add_subcommand("weights", "Per-variable invariance weights");
  wts.src.add_to(c_w);
  c_w->add_option("--k", wts.k, "Subset budget")->capture_default_str();
  c_w->add_option("--convention", wts.convention, "sqrt or squared");
  c_w->add_option("--threads", wts.threads, "Worker threads");
  c_w->add_option("--out", wts.out, "Output JSON path");

  PathArgs pth;
  auto* c_p = app.add_subcommand("path", "Solution path over a gamma grid");
  pth.src.add_to(c_p);
  c_p->add_option("--k", pth.k, "Subset budget")->capture_default_str();
  c_p->add_option("--gamma-grid", pth.gammas, "Comma-separated gamma values")->delimiter(',');
  c_p->add_option("--lambda", pth.lambda, "Fixed lambda");
  c_p->add_option("--convention", pth.convention, "sqrt or squared");
  c_p->add_option("--out", pth.out, "Output JSON path");

  SynthArgs syn;
  auto* c_s = app.add_subcommand("synth", "Sample environments from an SCM");
  c_s->add_option("--example", syn.example, "ex2_1, ex2_2 or ex3_1");
  c_s->add_option("--regime", syn.regime, "general, block_orthogonal or no_ancestor_intervention");
  c_s->add_option("--d", syn.d, "Covariates for random SCMs");
  c_s->add_option("--block-size", syn.block_size, "Block size for block_orthogonal");
  c_s->add_option("--envs", syn.envs, "Environments for random SCMs");
  c_s->add_option("--n", syn.n, "Samples per environment")->capture_default_str();
  c_s->add_option("--seed", syn.seed, "Random seed")->capture_default_str();
  c_s->add_flag("--shifted-test", syn.shifted, "Also write test.csv from the shifted environment (ex3_1)");
  c_s->add_option("--out", syn.out, "Output directory")->required();

  std::string red_in, red_out;
  auto* c_r = app.add_subcommand("reduce-sat", "Compile a 3-CNF (DIMACS) into an instance JSON");
  c_r->add_option("--input,input", red_in, "DIMACS file, or - for stdin")->required();
  c_r->add_option("--out", red_out, "Output JSON path");

  EnumArgs en;
  auto* c_e = app.add_subcommand("enumerate-invariant", "List invariant sets of an instance");
  c_e->add_option("--instance", en.instance, "Instance JSON");
  c_e->add_option("--example", en.example, "Named example");
  c_e->add_option("--cnf", en.cnf, "DIMACS file reduced on the fly");
  c_e->add_option("--strategy", en.strategy, "auto, brute_force, schur_dfs or pruned");
  c_e->add_option("--cap", en.cap, "Largest d for exhaustive strategies")->capture_default_str();
  c_e->add_flag("--maximum", en.maximum, "Also list maximum invariant sets");
  c_e->add_flag("--separation", en.separation, "Run separation diagnostics (reduced instances)");
  c_e->add_option("--out", en.out, "Output JSON path");

  ParsimonyArgs par;
  auto* c_v = app.add_subcommand("verify-parsimony", "Compare invariant-set counts with SAT counts");
  c_v->add_option("inputs", par.inputs, "DIMACS files");
  c_v->add_option("--random", par.random, "Number of random formulas");
  c_v->add_option("--max-clauses", par.max_clauses, "Clauses per random formula: 1..max");
  c_v->add_option("--seed", par.seed, "Seed for random formulas");
  c_v->add_flag("--problem1", par.problem1, "Include the nine-clause example formula");
  c_v->add_flag("--separation", par.separation, "Also check separation gaps (d <= 22)");
  c_v->add_option("--strategy", par.strategy, "Enumeration strategy");
  c_v->add_option("--out", par.out, "Report JSON path");

  RateArgs rate;
  auto* c_x = app.add_subcommand("rate-exp", "Estimation error against sample size");
  c_x->add_option("--example", rate.example, "Named example")->capture_default_str();
  c_x->add_option("--k", rate.cfg.k, "Subset budget")->capture_default_str();
  c_x->add_option("--gamma", rate.cfg.gamma, "Penalty level")->capture_default_str();
  c_x->add_option("--lambda", rate.cfg.lambda, "L1 level");
  c_x->add_option("--n-grid", rate.cfg.n_grid, "Comma-separated sample sizes")->delimiter(',');
  c_x->add_option("--seeds", rate.cfg.seeds, "Repetitions per n")->capture_default_str();
  c_x->add_option("--seed", rate.cfg.base_seed, "First seed");
  c_x->add_flag("--center,!--no-center", rate.cfg.center, "Center samples");
  c_x->add_option("--convention", rate.convention, "sqrt or squared");
  c_x->add_option("--out", rate.out, "Output JSON path");

  for (std::size_t i = 1; i < args.size() && config->section.empty(); ++i)
    for (const auto* sub : app.get_subcommands({}))
      if (sub->get_name() == args[i]) config->section = args[i];

  try {
    std::vector<std::string> rev(args.empty() ? args.end() : args.begin() + 1, args.end());
    std::reverse(rev.begin(), rev.end());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*c_fit) return do_fit(fit, out);
    if (*c_w) return do_weights(wts, out);
    if (*c_p) return do_path(pth, out);
    if (*c_s) return do_synth(syn, out);
    if (*c_r) return do_reduce(red_in, red_out, out);
    if (*c_e) return do_enumerate(en, out);
    if (*c_v) return do_parsimony(par, out);
    if (*c_x) return do_rate(rate, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kValidation;
}

}  // namespace igr::cli

#include "igr/json_io.hpp"

#include <cmath>
#include <fstream>

namespace igr {

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json vec(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
  return a;
}

Json vec(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return Rational::parse(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw ValidationError("expected a rational as \"p/q\" string or an integer, got " + j.dump());
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

Json set_to_json(const IndexSet& s) {
  Json a = Json::array();
  for (int j : s) a.push_back(j + 1);
  return a;
}

IndexSet set_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("index set must be an array");
  std::vector<int> one;
  for (const auto& x : j) {
    if (!x.is_number_integer()) throw ValidationError("index set entries must be integers");
    one.push_back(x.get<int>());
  }
  return from_one_based(one);
}

Json instance_to_json(const lab::LisInstance& inst) {
  const auto& m = inst.moments;
  Json sig = Json::array(), u = Json::array();
  for (int e = 0; e < m.num_envs(); ++e) {
    Json mat = Json::array();
    for (int r = 0; r < m.d(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < m.d(); ++c) row.push_back(m.sigma[e](r, c).str());
      mat.push_back(std::move(row));
    }
    sig.push_back(std::move(mat));
    Json uv = Json::array();
    for (int r = 0; r < m.d(); ++r) uv.push_back(m.u[e](r).str());
    u.push_back(std::move(uv));
  }
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["d"] = m.d();
  j["environments"] = m.num_envs();
  j["sigma"] = std::move(sig);
  j["u"] = std::move(u);
  j["provenance"] = inst.provenance;
  if (inst.clauses > 0) j["clauses"] = inst.clauses;
  return j;
}

lab::LisInstance instance_from_json(const Json& j) {
  if (j.contains("schema_version") && j.at("schema_version") != kSchemaVersion)
    throw ValidationError("unsupported schema_version " + j.at("schema_version").dump());
  const int d = field(j, "d").get<int>();
  const Json& sj = field(j, "sigma");
  const Json& uj = field(j, "u");
  if (!sj.is_array() || !uj.is_array() || sj.size() != uj.size() || sj.empty())
    throw ValidationError("sigma and u must be nonempty arrays with one entry per environment");
  std::vector<Mat<Rational>> sigma;
  std::vector<Vec<Rational>> u;
  for (std::size_t e = 0; e < sj.size(); ++e) {
    const Json& mat = sj[e];
    if (!mat.is_array() || mat.size() != static_cast<std::size_t>(d))
      throw ValidationError("sigma of environment " + std::to_string(e + 1) + " must have d rows");
    Mat<Rational> s(d, d);
    for (int r = 0; r < d; ++r) {
      const Json& row = mat[static_cast<std::size_t>(r)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
        throw ValidationError("sigma of environment " + std::to_string(e + 1) + " must be d x d");
      for (int c = 0; c < d; ++c) s(r, c) = rational_from_json(row[static_cast<std::size_t>(c)]);
    }
    if (!uj[e].is_array() || uj[e].size() != static_cast<std::size_t>(d))
      throw ValidationError("u of environment " + std::to_string(e + 1) + " must have d entries");
    Vec<Rational> v(d);
    for (int r = 0; r < d; ++r) v(r) = rational_from_json(uj[e][static_cast<std::size_t>(r)]);
    sigma.push_back(std::move(s));
    u.push_back(std::move(v));
  }
  auto inst = lab::make_instance(std::move(sigma), std::move(u), j.value("provenance", std::string("hand-built")));
  inst.clauses = j.value("clauses", 0);
  return inst;
}

Json weights_to_json(const WeightTable& w) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["k"] = w.k;
  j["convention"] = to_string(w.convention);
  j["weights"] = vec(w.w);
  j["variation"] = vec(w.v);
  bool exact = false;
  for (const auto& s : w.v_exact) exact = exact || !s.empty();
  if (exact) j["variation_exact"] = w.v_exact;
  Json sets = Json::array();
  for (std::size_t i = 0; i < w.argmin_sets.size(); ++i)
    sets.push_back(w.defined[i] ? set_to_json(w.argmin_sets[i]) : Json(nullptr));
  j["argmin_sets"] = std::move(sets);
  j["singular_skips"] = w.singular_skips;
  return j;
}

Json fit_to_json(const IgrFit& fit) {
  Json j;
  j["k"] = fit.k;
  j["gamma"] = fit.gamma;
  j["lambda"] = fit.lambda;
  j["beta"] = vec(fit.beta);
  j["support"] = set_to_json(fit.support);
  j["objective"] = num(fit.objective);
  j["kkt_residual"] = num(fit.kkt);
  j["sweeps"] = fit.sweeps;
  j["converged"] = fit.converged;
  j["convention"] = to_string(fit.convention);
  return j;
}

Json path_to_json(const SolutionPath& path) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["gammas"] = vec(path.gammas);
  Json fits = Json::array();
  for (const auto& f : path.fits) fits.push_back(fit_to_json(f));
  j["fits"] = std::move(fits);
  j["identification_gamma"] = num(path.identification_gamma);
  j["zero_from_gamma"] = vec(path.zero_from_gamma);
  return j;
}

Json report_to_json(const FitReport& rep) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json cfg;
  cfg["k"] = rep.config.k;
  cfg["gamma_grid"] = vec(rep.config.gammas);
  cfg["lambda_grid"] = vec(rep.config.lambdas);
  cfg["normalize"] = rep.config.normalize;
  cfg["center"] = rep.config.center;
  cfg["convention"] = to_string(rep.config.convention);
  j["config"] = std::move(cfg);
  j["selected"] = {{"gamma", rep.gamma}, {"lambda", rep.lambda}, {"validation_loss", num(rep.validation_loss)}};
  j["beta"] = vec(rep.beta);
  j["weights"] = weights_to_json(rep.weights);
  Json cells = Json::array();
  for (const auto& c : rep.cells)
    cells.push_back({{"gamma", c.gamma},
                     {"lambda", c.lambda},
                     {"validation_loss", num(c.validation_loss)},
                     {"kkt_residual", num(c.kkt)},
                     {"converged", c.converged}});
  j["cells"] = std::move(cells);
  if (rep.has_test) {
    Json t = Json::array();
    for (std::size_t i = 0; i < rep.test_ids.size(); ++i)
      t.push_back({{"id", rep.test_ids[i]}, {"mse", num(rep.test_mse[i])}});
    j["test"] = {{"environments", std::move(t)}, {"worst_case_r2", num(rep.worst_case_r2)}};
  }
  j["wall_ms"] = {{"weights", rep.weights_ms}, {"grid", rep.grid_ms}, {"total", rep.total_ms}};
  return j;
}

Json rate_to_json(const RateTable& t, const RateConfig& cfg) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["k"] = cfg.k;
  j["gamma"] = cfg.gamma;
  j["lambda"] = cfg.lambda;
  j["seeds"] = cfg.seeds;
  j["target"] = vec(t.target);
  j["n_grid"] = t.n_grid;
  j["medians"] = vec(t.medians);
  j["slope"] = num(t.slope);
  j["monotone"] = t.monotone;
  return j;
}

Json invariant_sets_to_json(const lab::InvariantSets& sets) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["strategy"] = lab::to_string(sets.strategy);
  j["count"] = sets.sets.size();
  Json a = Json::array();
  for (const auto& s : sets.sets) a.push_back(set_to_json(s));
  j["sets"] = std::move(a);
  Json z = Json::array();
  for (const auto& s : sets.zero_beta_sets) z.push_back(set_to_json(s));
  j["zero_beta_sets"] = std::move(z);
  j["empty_set_invariant"] = sets.empty_set_invariant;
  j["subsets_examined"] = sets.subsets_examined;
  return j;
}

Json separation_to_json(const lab::SeparationReport& rep) {
  Json j;
  j["d"] = rep.d;
  j["subsets"] = rep.subsets;
  j["invariant_targets"] = rep.invariant_targets;
  j["total_mean_sq_y"] = rep.total_mean_sq_y.str();
  Json ys = Json::array();
  for (const auto& y : rep.env_mean_sq_y) ys.push_back(y.str());
  j["env_mean_sq_y"] = std::move(ys);
  j["eigen_bounds_hold"] = rep.eigen_bounds_hold;
  j["variance_bound_holds"] = rep.variance_bound_holds();
  j["min_positive_heterogeneity"] = rep.min_positive_heterogeneity.str();
  j["max_heterogeneity"] = rep.max_heterogeneity.str();
  j["min_distance"] = rep.min_distance.str();
  j["max_distance"] = rep.max_distance.str();
  j["heterogeneity_floor"] = rep.heterogeneity_floor.str();
  j["distance_floor"] = rep.distance_floor.str();
  j["heterogeneity_violations"] = rep.heterogeneity_violations;
  j["distance_violations"] = rep.distance_violations;
  j["examples"] = rep.examples;
  j["ok"] = rep.ok();
  return j;
}

Json oracle_to_json(const ScmOracle<double>& o) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["beta_star"] = vec(o.beta_star);
  j["s_star"] = set_to_json(o.s_star);
  j["endogenous"] = set_to_json(o.endogenous);
  Json envs = Json::array();
  for (int e = 0; e < o.moments.num_envs(); ++e) {
    Json sig = Json::array();
    for (Eigen::Index r = 0; r < o.moments.sigma[e].rows(); ++r) sig.push_back(vec(Eigen::VectorXd(o.moments.sigma[e].row(r).transpose())));
    Json env;
    env["sigma"] = std::move(sig);
    env["u"] = vec(o.moments.u[e]);
    if (o.moments.has_mean_sq_y()) env["mean_sq_y"] = num(o.moments.mean_sq_y[e]);
    env["x_eps"] = vec(o.x_eps[e]);
    envs.push_back(std::move(env));
  }
  j["environments"] = std::move(envs);
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace igr

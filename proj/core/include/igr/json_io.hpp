#pragma once

#include <json.hpp>

#include "igr/lab/invariance.hpp"
#include "igr/lab/reduction.hpp"
#include "igr/lab/separation.hpp"
#include "igr/pipeline.hpp"
#include "igr/scm.hpp"

namespace igr {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Index sets are written one-based.
Json set_to_json(const IndexSet& s);
IndexSet set_from_json(const Json& j);

/// {schema_version, d, environments, sigma: [env][row][col], u: [env][row], provenance}
/// with rationals as "p/q" strings. Integer JSON numbers are accepted on input.
Json instance_to_json(const lab::LisInstance& inst);
lab::LisInstance instance_from_json(const Json& j);

Json weights_to_json(const WeightTable& w);
Json fit_to_json(const IgrFit& fit);
Json path_to_json(const SolutionPath& path);
Json report_to_json(const FitReport& rep);
Json rate_to_json(const RateTable& t, const RateConfig& cfg);
Json invariant_sets_to_json(const lab::InvariantSets& sets);
Json separation_to_json(const lab::SeparationReport& rep);
Json oracle_to_json(const ScmOracle<double>& oracle);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace igr

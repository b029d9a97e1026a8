#include "igr/variation.hpp"

namespace igr {

WeightConvention parse_convention(const std::string& s) {
  if (s == "sqrt") return WeightConvention::sqrt;
  if (s == "squared") return WeightConvention::squared;
  throw ValidationError("unknown weight convention '" + s + "' (expected sqrt or squared)");
}

std::vector<IndexSet> subsets_up_to(int d, int k) {
  std::vector<IndexSet> out;
  IndexSet cur;
  // Depth-first preorder over increasing index sequences is lexicographic order.
  auto rec = [&](auto&& self, int start) -> void {
    for (int j = start; j < d; ++j) {
      cur.push_back(j);
      out.push_back(cur);
      if (static_cast<int>(cur.size()) < k) self(self, j + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

double min_env_eigenvalue(const EnvMomentSet<double>& m) {
  double kappa = std::numeric_limits<double>::infinity();
  for (const auto& s : m.sigma) kappa = std::min(kappa, min_eigenvalue(s));
  return kappa;
}

}  // namespace igr

#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace igr {

/// Sorted, duplicate-free zero-based column indices.
/// Displayed and serialized one-based, matching the usual {1, 2, ...} notation.
using IndexSet = std::vector<int>;

inline IndexSet normalize_set(IndexSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

inline bool contains(const IndexSet& s, int j) { return std::binary_search(s.begin(), s.end(), j); }

inline IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline std::vector<int> to_one_based(const IndexSet& s) {
  std::vector<int> out(s);
  for (int& j : out) ++j;
  return out;
}

inline IndexSet from_one_based(const std::vector<int>& s) {
  IndexSet out(s);
  for (int& j : out) --j;
  return normalize_set(out);
}

/// "{1,2,4}" style rendering, one-based.
inline std::string format_set(const IndexSet& s) {
  std::string out = "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i] + 1);
  }
  return out + "}";
}

/// Bitmask <-> set conversions for d <= 63.
inline IndexSet set_from_mask(unsigned long long mask) {
  IndexSet out;
  for (int j = 0; mask; ++j, mask >>= 1)
    if (mask & 1ULL) out.push_back(j);
  return out;
}

inline unsigned long long mask_from_set(const IndexSet& s) {
  unsigned long long m = 0;
  for (int j : s) m |= 1ULL << j;
  return m;
}

}  // namespace igr

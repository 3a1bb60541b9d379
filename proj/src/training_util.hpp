#pragma once

// Helpers shared by the two trainers.

#include <cmath>
#include <string>
#include <vector>

#include "diffhash/dataset.hpp"
#include "diffhash/error.hpp"
#include "diffhash/threshold.hpp"

namespace diffhash::detail {

inline void check_pairs(const PairSet& pairs, const DescriptorSet& data) {
  for (const IndexPair& p : pairs.pairs) {
    if (p.first >= data.size() || p.second >= data.size()) {
      throw InputError("pair (" + std::to_string(p.first) + "," + std::to_string(p.second) +
                       ") out of range for " + std::to_string(data.size()) + " descriptors");
    }
  }
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InputError("alpha must be finite and > 0");
}

/// Projects both members of every pair with `project(index)` and runs the
/// exhaustive threshold search.
template <typename Project>
ThresholdChoice fit_threshold(const PairSet& positives, const PairSet& negatives, Project&& project,
                              double alpha) {
  const auto collect = [&](const PairSet& s) {
    std::vector<ProjectedPair> out;
    out.reserve(s.size());
    for (const IndexPair& p : s.pairs) out.push_back({project(p.first), project(p.second)});
    return out;
  };
  const std::vector<ProjectedPair> pos = collect(positives);
  const std::vector<ProjectedPair> neg = collect(negatives);
  return choose_threshold(rate_curves(pos, neg), alpha);
}

}  // namespace diffhash::detail

#include "diffhash/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "diffhash/error.hpp"

namespace diffhash {

namespace {

// Number of pairs whose bits differ at threshold a, i.e. lo < -a <= hi.
// lows and highs are sorted ascending; count(hi >= t) - count(lo >= t).
std::size_t split_count(const std::vector<double>& lows, const std::vector<double>& highs, double t) {
  const auto at_least = [t](const std::vector<double>& v) {
    return static_cast<std::size_t>(v.end() - std::lower_bound(v.begin(), v.end(), t));
  };
  return at_least(highs) - at_least(lows);
}

void sorted_bounds(std::span<const ProjectedPair> pairs, std::vector<double>& lows, std::vector<double>& highs) {
  lows.clear();
  highs.clear();
  for (const ProjectedPair& p : pairs) {
    if (!std::isfinite(p.first) || !std::isfinite(p.second)) throw InputError("non-finite projection value");
    lows.push_back(std::min(p.first, p.second));
    highs.push_back(std::max(p.first, p.second));
  }
  std::ranges::sort(lows);
  std::ranges::sort(highs);
}

}  // namespace

RateCurves rate_curves(std::span<const ProjectedPair> positives, std::span<const ProjectedPair> negatives) {
  if (positives.empty() || negatives.empty()) throw InputError("rate curves need positive and negative pairs");

  std::vector<double> pos_lo, pos_hi, neg_lo, neg_hi;
  sorted_bounds(positives, pos_lo, pos_hi);
  sorted_bounds(negatives, neg_lo, neg_hi);

  std::vector<double> values;
  values.reserve(2 * (positives.size() + negatives.size()));
  for (const auto* v : {&pos_lo, &pos_hi, &neg_lo, &neg_hi}) values.insert(values.end(), v->begin(), v->end());
  std::ranges::sort(values);
  values.erase(std::unique(values.begin(), values.end()), values.end());

  // Cut points t = -a on the projection axis, descending so that a ascends.
  std::vector<double> cuts;
  cuts.reserve(values.size() + 1);
  cuts.push_back(values.back() + 1.0 + std::abs(values.back()));
  for (std::size_t k = values.size() - 1; k > 0; --k) {
    cuts.push_back(values[k - 1] + 0.5 * (values[k] - values[k - 1]));
  }
  cuts.push_back(values.front() - 1.0 - std::abs(values.front()));

  const double n_pos = static_cast<double>(positives.size());
  const double n_neg = static_cast<double>(negatives.size());
  RateCurves out;
  out.candidates.reserve(cuts.size());
  out.fnr.reserve(cuts.size());
  out.fpr.reserve(cuts.size());
  for (double t : cuts) {
    out.candidates.push_back(t == 0.0 ? 0.0 : -t);
    out.fnr.push_back(static_cast<double>(split_count(pos_lo, pos_hi, t)) / n_pos);
    out.fpr.push_back(static_cast<double>(negatives.size() - split_count(neg_lo, neg_hi, t)) / n_neg);
  }
  return out;
}

ThresholdChoice choose_threshold(const RateCurves& curves, double alpha) {
  if (curves.candidates.empty() || curves.fnr.size() != curves.candidates.size() ||
      curves.fpr.size() != curves.candidates.size()) {
    throw InputError("malformed rate curves");
  }
  ThresholdChoice best;
  bool have = false;
  for (std::size_t k = 0; k < curves.candidates.size(); ++k) {
    const double a = curves.candidates[k];
    const double objective = alpha * curves.fnr[k] + curves.fpr[k];
    const bool better = !have || objective < best.objective ||
                        (objective == best.objective &&
                         (std::abs(a) < std::abs(best.threshold) ||
                          (std::abs(a) == std::abs(best.threshold) && a < best.threshold)));
    if (better) {
      best = {a, curves.fnr[k], curves.fpr[k], objective};
      have = true;
    }
  }
  return best;
}

}  // namespace diffhash

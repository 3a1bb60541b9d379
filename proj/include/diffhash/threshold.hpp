#pragma once

#include <span>
#include <vector>

namespace diffhash {

/// Projections p(x), p(x') of the two members of a pair onto one hash direction.
struct ProjectedPair {
  double first;
  double second;
};

/// False negative / false positive rates of one hash bit as a function of its
/// threshold a, where the bit of a value p is (p + a >= 0).
///
/// FNR(a): fraction of positive pairs whose bits differ.
/// FPR(a): fraction of negative pairs whose bits agree.
struct RateCurves {
  std::vector<double> candidates;  // ascending
  std::vector<double> fnr;
  std::vector<double> fpr;
};

/// Evaluates both rates at every threshold where the bit pattern can change:
/// midpoints between consecutive distinct values of -p over all pooled
/// projections, plus one threshold beyond each end. Throws InputError on an
/// empty list.
RateCurves rate_curves(std::span<const ProjectedPair> positives, std::span<const ProjectedPair> negatives);

struct ThresholdChoice {
  double threshold = 0.0;
  double fnr = 0.0;
  double fpr = 0.0;
  double objective = 0.0;
};

/// Exhaustive minimizer of alpha * FNR + FPR over the candidates. Ties go to
/// the smallest |a|, then to the smaller a.
ThresholdChoice choose_threshold(const RateCurves& curves, double alpha);

inline double optimal_threshold(const RateCurves& curves, double alpha) {
  return choose_threshold(curves, alpha).threshold;
}

}  // namespace diffhash

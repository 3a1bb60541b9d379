#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffhash/dataset.hpp"
#include "diffhash/hashcodec.hpp"

namespace diffhash {

/// Per-radius acceptance rates: a pair is accepted at radius r iff its
/// Hamming distance is <= r.
struct RocCurve {
  std::size_t m = 0;
  std::vector<double> fpr;  // m + 1 entries
  std::vector<double> tpr;
};

RocCurve roc(std::span<const std::size_t> dist_pos, std::span<const std::size_t> dist_neg, std::size_t m);

struct OperatingPoint {
  double target_fpr = 0.0;
  std::optional<std::size_t> radius;  // empty when no radius meets the target
  double fnr = 1.0;
};

/// Largest radius whose FPR does not exceed `target`; FNR = 1 - TPR there.
/// With no such radius the operating point accepts nothing and FNR is 1.
OperatingPoint operating_point(const RocCurve& curve, double target);
inline double fnr_at_fpr(const RocCurve& curve, double target) { return operating_point(curve, target).fnr; }

/// Trapezoidal area from (0, 0) through every radius to (1, 1).
double auc(const RocCurve& curve);

/// Real-threshold counterpart for raw Euclidean distances; thresholds are the
/// pooled distinct distances, ascending.
struct ThresholdRoc {
  std::vector<double> thresholds;
  std::vector<double> fpr;
  std::vector<double> tpr;
};

ThresholdRoc euclidean_baseline(const DescriptorSet& data, const PairSet& positives, const PairSet& negatives);
ThresholdRoc threshold_roc(std::span<const double> dist_pos, std::span<const double> dist_neg);

struct ThresholdOperatingPoint {
  double target_fpr = 0.0;
  std::optional<double> threshold;
  double fnr = 1.0;
};

ThresholdOperatingPoint operating_point(const ThresholdRoc& curve, double target);
double auc(const ThresholdRoc& curve);

/// Hamming distances between the codes of each pair's members.
std::vector<std::size_t> pair_distances(const CodeSet& codes, const PairSet& pairs);

/// "radius,fpr,tpr,fnr" CSV, 9 significant digits.
std::string roc_csv(const RocCurve& curve);
/// "threshold,fpr,tpr,fnr" CSV, 9 significant digits.
std::string roc_csv(const ThresholdRoc& curve);

}  // namespace diffhash

#include "diffhash/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "diffhash/error.hpp"

namespace diffhash {

RocCurve roc(std::span<const std::size_t> dist_pos, std::span<const std::size_t> dist_neg, std::size_t m) {
  if (dist_pos.empty() || dist_neg.empty()) throw InputError("ROC needs positive and negative distances");
  std::vector<std::size_t> hist_pos(m + 1, 0), hist_neg(m + 1, 0);
  for (std::size_t d : dist_pos) {
    if (d > m) throw InputError("distance " + std::to_string(d) + " exceeds code length " + std::to_string(m));
    ++hist_pos[d];
  }
  for (std::size_t d : dist_neg) {
    if (d > m) throw InputError("distance " + std::to_string(d) + " exceeds code length " + std::to_string(m));
    ++hist_neg[d];
  }
  RocCurve curve;
  curve.m = m;
  std::size_t acc_pos = 0, acc_neg = 0;
  for (std::size_t r = 0; r <= m; ++r) {
    acc_pos += hist_pos[r];
    acc_neg += hist_neg[r];
    curve.tpr.push_back(static_cast<double>(acc_pos) / static_cast<double>(dist_pos.size()));
    curve.fpr.push_back(static_cast<double>(acc_neg) / static_cast<double>(dist_neg.size()));
  }
  return curve;
}

namespace {

// Largest index whose fpr <= target (fpr is nondecreasing), if any.
std::optional<std::size_t> last_within(const std::vector<double>& fpr, double target) {
  const auto it = std::upper_bound(fpr.begin(), fpr.end(), target);
  if (it == fpr.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - fpr.begin()) - 1;
}

double trapezoid(const std::vector<double>& fpr, const std::vector<double>& tpr) {
  double area = 0.0;
  double x = 0.0, y = 0.0;
  for (std::size_t i = 0; i <= fpr.size(); ++i) {
    const double nx = i < fpr.size() ? fpr[i] : 1.0;
    const double ny = i < tpr.size() ? tpr[i] : 1.0;
    area += (nx - x) * (ny + y) * 0.5;
    x = nx;
    y = ny;
  }
  return area;
}

void append_row(std::string& out, const char* first, double fpr, double tpr) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%s,%.9g,%.9g,%.9g\n", first, fpr, tpr, 1.0 - tpr);
  out += buf;
}

}  // namespace

OperatingPoint operating_point(const RocCurve& curve, double target) {
  OperatingPoint op;
  op.target_fpr = target;
  op.radius = last_within(curve.fpr, target);
  op.fnr = op.radius ? 1.0 - curve.tpr[*op.radius] : 1.0;
  return op;
}

double auc(const RocCurve& curve) { return trapezoid(curve.fpr, curve.tpr); }

ThresholdRoc threshold_roc(std::span<const double> dist_pos, std::span<const double> dist_neg) {
  if (dist_pos.empty() || dist_neg.empty()) throw InputError("ROC needs positive and negative distances");
  std::vector<double> pos(dist_pos.begin(), dist_pos.end());
  std::vector<double> neg(dist_neg.begin(), dist_neg.end());
  std::ranges::sort(pos);
  std::ranges::sort(neg);
  ThresholdRoc curve;
  curve.thresholds = pos;
  curve.thresholds.insert(curve.thresholds.end(), neg.begin(), neg.end());
  std::ranges::sort(curve.thresholds);
  curve.thresholds.erase(std::unique(curve.thresholds.begin(), curve.thresholds.end()), curve.thresholds.end());
  for (double t : curve.thresholds) {
    const auto upto = [t](const std::vector<double>& v) {
      return static_cast<double>(std::upper_bound(v.begin(), v.end(), t) - v.begin()) / static_cast<double>(v.size());
    };
    curve.tpr.push_back(upto(pos));
    curve.fpr.push_back(upto(neg));
  }
  return curve;
}

ThresholdRoc euclidean_baseline(const DescriptorSet& data, const PairSet& positives, const PairSet& negatives) {
  const auto distances = [&](const PairSet& s) {
    std::vector<double> out;
    out.reserve(s.size());
    for (const IndexPair& p : s.pairs) {
      if (p.first >= data.size() || p.second >= data.size()) throw InputError("pair index out of range");
      const auto x = data.row(p.first);
      const auto y = data.row(p.second);
      double d2 = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) d2 += (x[j] - y[j]) * (x[j] - y[j]);
      out.push_back(std::sqrt(d2));
    }
    return out;
  };
  const std::vector<double> pos = distances(positives);
  const std::vector<double> neg = distances(negatives);
  return threshold_roc(pos, neg);
}

ThresholdOperatingPoint operating_point(const ThresholdRoc& curve, double target) {
  ThresholdOperatingPoint op;
  op.target_fpr = target;
  const auto idx = last_within(curve.fpr, target);
  if (idx) {
    op.threshold = curve.thresholds[*idx];
    op.fnr = 1.0 - curve.tpr[*idx];
  }
  return op;
}

double auc(const ThresholdRoc& curve) { return trapezoid(curve.fpr, curve.tpr); }

std::vector<std::size_t> pair_distances(const CodeSet& codes, const PairSet& pairs) {
  std::vector<std::size_t> out;
  out.reserve(pairs.size());
  for (const IndexPair& p : pairs.pairs) {
    if (p.first >= codes.size() || p.second >= codes.size()) throw InputError("pair index out of range");
    out.push_back(hamming(codes.words(p.first), codes.words(p.second)));
  }
  return out;
}

std::string roc_csv(const RocCurve& curve) {
  std::string out = "radius,fpr,tpr,fnr\n";
  for (std::size_t r = 0; r < curve.fpr.size(); ++r) append_row(out, std::to_string(r).c_str(), curve.fpr[r], curve.tpr[r]);
  return out;
}

std::string roc_csv(const ThresholdRoc& curve) {
  std::string out = "threshold,fpr,tpr,fnr\n";
  char buf[32];
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", curve.thresholds[i]);
    append_row(out, buf, curve.fpr[i], curve.tpr[i]);
  }
  return out;
}

}  // namespace diffhash

#pragma once

#include <cstddef>
#include <vector>

#include "diffhash/dataset.hpp"
#include "diffhash/linalg.hpp"
#include "diffhash/threshold.hpp"

namespace diffhash {

/// xi(x) = sign(P x + a), P is m x n with m <= n.
struct LinearHashModel {
  std::size_t m = 0;
  std::size_t n = 0;
  Matrix projections;  // m x n
  std::vector<double> thresholds;
  double alpha = 25.0;

  friend bool operator==(const LinearHashModel&, const LinearHashModel&) = default;
};

/// Per-bit diagnostics from training.
struct TrainReport {
  std::vector<double> eigenvalues;        // objective eigenvalue of each bit
  std::vector<ThresholdChoice> thresholds;  // training FNR/FPR at the chosen threshold
};

template <typename Model>
struct Trained {
  Model model;
  TrainReport report;
};

/// Symmetrized pair cross-moment (1/|S|) sum ((x x'^T + x' x^T) / 2).
SymMatrix build_sigma(const PairSet& pairs, const DescriptorSet& data);

/// Sigma_N - alpha * Sigma_P.
SymMatrix diff_matrix(const PairSet& positives, const PairSet& negatives, const DescriptorSet& data,
                      double alpha);

struct LinearTrainOptions {
  std::size_t m = 0;
  double alpha = 25.0;
  /// Subtract the mean of all descriptors before building the moments. The
  /// shift is folded into the thresholds, so models encode raw descriptors
  /// either way.
  bool center = false;
};

/// Diff-hash training: rows of P are the m eigenvectors of
/// Sigma_N - alpha * Sigma_P with the smallest eigenvalues, scaled by
/// |lambda|^(1/2) (unit norm when |lambda| <= 1e-12); each threshold is
/// chosen by exhaustive search on the training pairs.
Trained<LinearHashModel> train_diff_hash(const PairSet& positives, const PairSet& negatives,
                                         const DescriptorSet& data, const LinearTrainOptions& options);

}  // namespace diffhash

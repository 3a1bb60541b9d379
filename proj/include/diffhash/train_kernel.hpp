#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "diffhash/dataset.hpp"
#include "diffhash/kernels.hpp"
#include "diffhash/linalg.hpp"
#include "diffhash/train_linear.hpp"

namespace diffhash {

/// xi(x) = sign(B k(x) + a) with k(x) = (k(x_1, x), ..., k(x_l, x)).
struct KernelHashModel {
  std::size_t m = 0;
  std::size_t l = 0;
  std::size_t n = 0;
  KernelSpec kernel;
  Matrix basis;         // l x n
  Matrix coefficients;  // m x l, unit-norm rows
  std::vector<double> thresholds;
  double alpha = 25.0;
  std::uint64_t seed = 0;

  friend bool operator==(const KernelHashModel&, const KernelHashModel&) = default;
};

/// Uniform sample of l indices from `referenced` without replacement, in
/// shuffled order.
std::vector<std::size_t> select_basis(std::span<const std::size_t> referenced, std::size_t l, std::uint64_t seed);

/// l x l objective matrix
///   (1/|N|) sym(K_N K'_N^T) - (alpha/|P|) sym(K_P K'_P^T),  sym(C) = (C + C^T)/2,
/// where K_S / K'_S hold kernel columns of the first / second pair members.
SymMatrix build_K(const PairSet& positives, const PairSet& negatives, const DescriptorSet& data,
                  const Matrix& basis, const KernelSpec& kernel, double alpha);

struct KernelTrainOptions {
  std::size_t m = 32;
  std::size_t l = 256;
  double alpha = 25.0;
  KernelKind kind = KernelKind::gaussian_mahalanobis;
  double gamma = 1.0;
  ExponentMode exponent_mode = ExponentMode::half;
  std::uint64_t seed = 0;
};

/// Trains a kernelized diff-hash model.
///
/// For the Gaussian kernel the data covariance is estimated from every
/// descriptor referenced by a training pair. Basis points are drawn from the
/// same set. Rows of B are the m unit eigenvectors of K with the smallest
/// eigenvalues; thresholds come from exhaustive search on the training pairs.
Trained<KernelHashModel> train_kdiff_hash(const PairSet& positives, const PairSet& negatives,
                                          const DescriptorSet& data, const KernelTrainOptions& options);

}  // namespace diffhash

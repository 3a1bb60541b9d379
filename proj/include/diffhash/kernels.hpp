#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "diffhash/linalg.hpp"

namespace diffhash {

enum class KernelKind { linear, gaussian_mahalanobis };

/// Which inverse power of the data covariance forms the Gaussian metric.
enum class ExponentMode { half, full };

std::string_view to_string(KernelKind kind);
std::string_view to_string(ExponentMode mode);
KernelKind parse_kernel_kind(std::string_view s);
ExponentMode parse_exponent_mode(std::string_view s);

/// Kernel function on R^n.
///
///   linear:                k(x, y) = x^T y
///   gaussian-mahalanobis:  k(x, y) = exp(-gamma (x - y)^T M (x - y))
///
/// where M is Sigma^(-1/2) (half) or Sigma^(-1) (full) of the data covariance.
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  std::size_t dim = 0;
  double gamma = 1.0;
  ExponentMode exponent_mode = ExponentMode::half;
  SymMatrix metric;  // gaussian only

  static KernelSpec linear(std::size_t dim);
  /// Builds the metric from a data covariance, flooring its spectrum at
  /// 1e-10 * trace / n.
  static KernelSpec gaussian_mahalanobis(const SymMatrix& covariance, double gamma = 1.0,
                                         ExponentMode mode = ExponentMode::half);
  /// Uses `metric` as given (e.g. when reloading a model).
  static KernelSpec gaussian_with_metric(SymMatrix metric, double gamma, ExponentMode mode);

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y);

/// Entry (i, j) is kernel_eval(spec, basis row i, points row j).
Matrix kernel_matrix(const KernelSpec& spec, const Matrix& basis, const Matrix& points);

/// Kernel column (k(x_1, x), ..., k(x_l, x)) for a single point.
void kernel_column(const KernelSpec& spec, const Matrix& basis, std::span<const double> x,
                   std::span<double> out);

}  // namespace diffhash

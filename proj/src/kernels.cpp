#include "diffhash/kernels.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "diffhash/error.hpp"

namespace diffhash {

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::linear ? "linear" : "gaussian-mahalanobis";
}

std::string_view to_string(ExponentMode mode) { return mode == ExponentMode::half ? "half" : "full"; }

KernelKind parse_kernel_kind(std::string_view s) {
  if (s == "linear") return KernelKind::linear;
  if (s == "gaussian-mahalanobis") return KernelKind::gaussian_mahalanobis;
  throw InputError("unknown kernel '" + std::string(s) + "' (expected linear or gaussian-mahalanobis)");
}

ExponentMode parse_exponent_mode(std::string_view s) {
  if (s == "half") return ExponentMode::half;
  if (s == "full") return ExponentMode::full;
  throw InputError("unknown exponent mode '" + std::string(s) + "' (expected half or full)");
}

KernelSpec KernelSpec::linear(std::size_t dim) {
  if (dim == 0) throw InputError("kernel dimension must be positive");
  KernelSpec k;
  k.kind = KernelKind::linear;
  k.dim = dim;
  return k;
}

KernelSpec KernelSpec::gaussian_mahalanobis(const SymMatrix& covariance, double gamma, ExponentMode mode) {
  const std::size_t n = covariance.dim();
  if (n == 0) throw InputError("kernel dimension must be positive");
  double floor = 1e-10 * covariance.trace() / static_cast<double>(n);
  if (!(floor > 0.0)) floor = std::numeric_limits<double>::min();
  SymMatrix metric = mode == ExponentMode::half ? inv_sqrt_psd(covariance, floor) : inv_psd(covariance, floor);
  return gaussian_with_metric(std::move(metric), gamma, mode);
}

KernelSpec KernelSpec::gaussian_with_metric(SymMatrix metric, double gamma, ExponentMode mode) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("kernel gamma must be finite and > 0");
  if (metric.dim() == 0) throw InputError("kernel dimension must be positive");
  KernelSpec k;
  k.kind = KernelKind::gaussian_mahalanobis;
  k.dim = metric.dim();
  k.gamma = gamma;
  k.exponent_mode = mode;
  k.metric = std::move(metric);
  return k;
}

namespace {

// (x - y)^T M (x - y), summed as sum_i d_i * (sum_j M_ij d_j). Negating d
// leaves every product bit-identical, so the result is exactly symmetric.
double mahalanobis_sq(const SymMatrix& metric, std::span<const double> x, std::span<const double> y,
                      std::span<double> diff) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) diff[i] = x[i] - y[i];
  const Matrix& m = metric.matrix();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += row[j] * diff[j];
    total += diff[i] * s;
  }
  return total;
}

double eval_unchecked(const KernelSpec& spec, std::span<const double> x, std::span<const double> y,
                      std::span<double> scratch) {
  if (spec.kind == KernelKind::linear) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
  }
  return std::exp(-spec.gamma * mahalanobis_sq(spec.metric, x, y, scratch));
}

void check_dim(const KernelSpec& spec, std::size_t got) {
  if (got != spec.dim) {
    throw InputError("kernel dimension mismatch: expected " + std::to_string(spec.dim) + ", got " +
                     std::to_string(got));
  }
}

}  // namespace

double kernel_eval(const KernelSpec& spec, std::span<const double> x, std::span<const double> y) {
  check_dim(spec, x.size());
  check_dim(spec, y.size());
  std::vector<double> scratch(spec.dim);
  return eval_unchecked(spec, x, y, scratch);
}

void kernel_column(const KernelSpec& spec, const Matrix& basis, std::span<const double> x,
                   std::span<double> out) {
  check_dim(spec, basis.cols());
  check_dim(spec, x.size());
  if (out.size() != basis.rows()) throw InputError("kernel column output size mismatch");
  std::vector<double> scratch(spec.dim);
  for (std::size_t i = 0; i < basis.rows(); ++i) out[i] = eval_unchecked(spec, basis.row(i), x, scratch);
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& basis, const Matrix& points) {
  check_dim(spec, basis.cols());
  check_dim(spec, points.cols());
  Matrix out(basis.rows(), points.rows());
  std::vector<double> scratch(spec.dim);
  for (std::size_t i = 0; i < basis.rows(); ++i)
    for (std::size_t j = 0; j < points.rows(); ++j)
      out(i, j) = eval_unchecked(spec, basis.row(i), points.row(j), scratch);
  return out;
}

}  // namespace diffhash

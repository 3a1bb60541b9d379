#include "diffhash/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "diffhash/error.hpp"

namespace diffhash {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw InputError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                     std::to_string(rows * cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InputError("matrix product dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto crow = c.row(i);
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InputError("dot product dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

SymMatrix::SymMatrix(Matrix a) {
  if (a.rows() != a.cols()) throw InputError("symmetric matrix must be square");
  const std::size_t n = a.rows();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(a(i, j))) {
        throw InputError("non-finite matrix entry at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = s;
      a(j, i) = s;
    }
  }
  a_ = std::move(a);
}

double SymMatrix::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim(); ++i) t += a_(i, i);
  return t;
}

std::vector<double> EigenDecomposition::vector(std::size_t k) const {
  std::vector<double> v(vectors.rows());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = vectors(i, k);
  return v;
}

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagonalTolerance = 1e-12;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Zeroes a(p,q) with a plane rotation, updating the full symmetric storage and
// accumulating the rotation into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  double t;
  if (std::abs(theta) > 1e150) {
    t = 0.5 / theta;
  } else {
    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.rows();

  for (std::size_t r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    const double np = c * arp - s * arq;
    const double nq = s * arp + c * arq;
    a(r, p) = np;
    a(p, r) = np;
    a(r, q) = nq;
    a(q, r) = nq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  for (std::size_t r = 0; r < n; ++r) {
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = c * vrp - s * vrq;
    v(r, q) = s * vrp + c * vrq;
  }
}

}  // namespace

EigenDecomposition sym_eig(const SymMatrix& input) {
  const std::size_t n = input.dim();
  if (n == 0) throw InputError("eigendecomposition of an empty matrix");

  Matrix a = input.matrix();
  Matrix v = Matrix::identity(n);
  const double target = kOffDiagonalTolerance * input.frobenius_norm();

  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (sweep == kMaxSweeps) {
      throw ConvergenceError("Jacobi eigensolver did not converge in " +
                             std::to_string(kMaxSweeps) + " sweeps (n=" + std::to_string(n) + ")");
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q)
        if (a(p, q) != 0.0) rotate(a, v, p, q);
    ++sweep;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = order[k];
    out.values[k] = a(src, src);
    std::size_t lead = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (std::abs(v(i, src)) > std::abs(v(lead, src))) lead = i;
    const double sign = v(lead, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
  }
  return out;
}

SymMatrix estimate_covariance(const Matrix& x, double eps) {
  const std::size_t count = x.rows();
  const std::size_t n = x.cols();
  if (count < 2) throw InputError("covariance estimate needs at least 2 rows");
  if (!(eps >= 0.0)) throw InputError("covariance regularizer must be nonnegative");

  std::vector<double> mean(n, 0.0);
  for (std::size_t r = 0; r < count; ++r)
    for (std::size_t j = 0; j < n; ++j) mean[j] += x(r, j);
  for (double& m : mean) m /= static_cast<double>(count);

  Matrix cov(n, n);
  std::vector<double> centered(n);
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t j = 0; j < n; ++j) centered[j] = x(r, j) - mean[j];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) cov(i, j) += centered[i] * centered[j];
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      cov(i, j) /= static_cast<double>(count);
      cov(j, i) = cov(i, j);
    }
    trace += cov(i, i);
  }
  const double ridge = eps * trace / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) cov(i, i) += ridge;
  return SymMatrix(std::move(cov));
}

namespace {

SymMatrix spectral_map(const SymMatrix& a, double floor, double (*f)(double)) {
  if (!(floor > 0.0)) throw InputError("eigenvalue floor must be positive");
  const EigenDecomposition eig = sym_eig(a);
  const std::size_t n = a.dim();
  std::vector<double> scale(n);
  for (std::size_t k = 0; k < n; ++k) scale[k] = f(std::max(eig.values[k], floor));
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += eig.vectors(i, k) * scale[k] * eig.vectors(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return SymMatrix(std::move(out));
}

}  // namespace

SymMatrix inv_sqrt_psd(const SymMatrix& a, double floor) {
  return spectral_map(a, floor, [](double l) { return 1.0 / std::sqrt(l); });
}

SymMatrix inv_psd(const SymMatrix& a, double floor) {
  return spectral_map(a, floor, [](double l) { return 1.0 / l; });
}

}  // namespace diffhash

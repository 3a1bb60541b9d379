#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace diffhash {

/// Dense row-major real matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix transpose() const;
  double frobenius_norm() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

/// Square symmetric matrix. Construction symmetrizes as (A + A^T) / 2 and
/// rejects non-finite entries, so entries(i,j) == entries(j,i) bit for bit.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(Matrix a);

  std::size_t dim() const { return a_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return a_(i, j); }
  const Matrix& matrix() const { return a_; }
  double frobenius_norm() const { return a_.frobenius_norm(); }
  double trace() const;

  friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

 private:
  Matrix a_;
};

/// Eigenpairs of a symmetric matrix: values ascending, column k of `vectors`
/// belongs to values[k].
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;

  std::vector<double> vector(std::size_t k) const;
};

/// Cyclic Jacobi eigensolver.
///
/// Sweeps visit (p, q) pairs in row-major order until the off-diagonal
/// Frobenius norm drops to 1e-12 * ||A||_F, at most 100 sweeps. Eigenvalues
/// come back ascending (stable on ties). Each eigenvector is flipped so its
/// largest-magnitude component (lowest index on ties) is nonnegative, which
/// makes the output reproducible bit for bit.
///
/// Throws InputError on an empty matrix, ConvergenceError if the sweep cap is
/// reached.
EigenDecomposition sym_eig(const SymMatrix& a);

/// Biased sample covariance of the rows of `x` plus eps * (trace / n) * I.
SymMatrix estimate_covariance(const Matrix& x, double eps);

/// V * diag(max(lambda, floor)^(-1/2)) * V^T.
SymMatrix inv_sqrt_psd(const SymMatrix& a, double floor);

/// V * diag(1 / max(lambda, floor)) * V^T.
SymMatrix inv_psd(const SymMatrix& a, double floor);

}  // namespace diffhash

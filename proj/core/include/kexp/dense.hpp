#pragma once

#include <cstddef>
#include <vector>

#include "kexp/types.hpp"

namespace kexp {

/// Small row-major complex matrix. Holds projected Krylov matrices and
/// their exponentials; not meant for the large operator.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  Complex operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<Complex>& entries() const { return data_; }

  CVector column(std::size_t j) const;
  /// Upper-left block of the given size.
  DenseMatrix leading_block(std::size_t rows, std::size_t cols) const;

  DenseMatrix operator*(const DenseMatrix& rhs) const;
  CVector operator*(std::span<const Complex> x) const;
  DenseMatrix operator+(const DenseMatrix& rhs) const;
  DenseMatrix operator-(const DenseMatrix& rhs) const;
  DenseMatrix& operator+=(const DenseMatrix& rhs);
  DenseMatrix& operator*=(Complex a);
  friend DenseMatrix operator*(Complex a, DenseMatrix m) { return m *= a; }

  DenseMatrix adjoint() const;

  double norm1() const;
  double norm_inf() const;
  double norm_frobenius() const;
  double max_abs() const;

  /// True when every entry is real, the matrix is symmetric and zero
  /// outside the three central diagonals.
  bool is_real_symmetric_tridiagonal() const;
  bool all_finite() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

/// Solves A X = B by LU with partial pivoting. Throws std::domain_error on
/// an exactly singular pivot.
DenseMatrix solve(DenseMatrix a, DenseMatrix b);

}  // namespace kexp

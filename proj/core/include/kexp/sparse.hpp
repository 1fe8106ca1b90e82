#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kexp/dense.hpp"
#include "kexp/types.hpp"

namespace kexp {

enum class Structure {
  general,
  hermitian,       // A == A^*
  skew_hermitian,  // A == -A^*
};

std::string to_string(Structure s);
Structure parse_structure(const std::string& text);

struct Triplet {
  std::size_t row;
  std::size_t col;
  Complex value;
};

/// Immutable complex n x n matrix in compressed sparse row form.
///
/// Values are std::complex<double>, i.e. interleaved (re, im) pairs. The
/// structure flag is validated at construction to 1e-12 elementwise.
class SparseOperator {
 public:
  SparseOperator() = default;

  /// Duplicate (row, col) entries are summed; explicit zeros are kept.
  static SparseOperator from_triplets(std::size_t n, std::vector<Triplet> entries,
                                      Structure structure = Structure::general);
  static SparseOperator from_csr(std::size_t n, std::vector<std::size_t> row_ptr,
                                 std::vector<std::uint32_t> col_idx, std::vector<Complex> values,
                                 Structure structure = Structure::general);
  static SparseOperator from_dense(const DenseMatrix& a, Structure structure = Structure::general);

  std::size_t dimension() const { return n_; }
  std::size_t nnz() const { return values_.size(); }
  Structure structure() const { return structure_; }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::uint32_t> col_idx() const { return col_idx_; }
  std::span<const Complex> values() const { return values_; }

  /// y = A x. Row-wise accumulation in stored order, so results are
  /// bitwise reproducible.
  void matvec(std::span<const Complex> x, std::span<Complex> y) const;
  CVector matvec(std::span<const Complex> x) const;
  /// y = A^* x
  CVector adjoint_matvec(std::span<const Complex> x) const;

  double norm1() const;
  double norm_inf() const;

  /// Largest elementwise deviation |A_ij - conj(A_ji)|.
  double hermitian_defect() const;
  double skew_hermitian_defect() const;

  DenseMatrix to_dense() const;
  std::vector<Triplet> to_triplets() const;

 private:
  void validate() const;

  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_idx_;
  std::vector<Complex> values_;
  Structure structure_ = Structure::general;
};

/// A matrix together with its prefactor sigma and whether the caller
/// asserts mu_2(sigma A) <= 0.
struct LinearOperator {
  SparseOperator matrix;
  Prefactor sigma = Prefactor::one();
  bool nonexpansive = false;

  std::size_t dimension() const { return matrix.dimension(); }
  /// sigma A is Hermitian: A Hermitian with real sigma.
  bool sigma_hermitian() const;
  /// sigma A is skew-Hermitian: A Hermitian with imaginary sigma.
  bool sigma_skew_hermitian() const;
};

}  // namespace kexp

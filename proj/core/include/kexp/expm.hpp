#pragma once

#include "kexp/dense.hpp"
#include "kexp/symtrid.hpp"
#include "kexp/types.hpp"

namespace kexp {

/// exp(z T) for a small square matrix.
///
/// Real symmetric tridiagonal input goes through its eigendecomposition;
/// everything else uses diagonal Pade approximants (degree 3..13) with
/// scaling and squaring, the degree chosen from ||z T||_1.
/// Throws std::invalid_argument for non-square input and
/// std::overflow_error if squaring leaves the finite range.
DenseMatrix expm_dense(const DenseMatrix& t, Complex z);

/// Pade scaling-and-squaring path only, regardless of structure.
DenseMatrix expm_pade(const DenseMatrix& a);

/// phi_p(z) = sum_k z^k / (k+p)!, for a scalar argument.
Complex phi_scalar(Complex z, int p);

/// phi_p(z T) e_1. p = 0 is the first column of exp(z T); p >= 1 reads the
/// last column of the exponential of the (m+p)x(m+p) augmented matrix
///   [ zT  e_1  0 ]
///   [ 0   0    I ]
///   [ 0   0    0 ].
/// For ||zT||_1 <= 1 the series is summed directly instead, which keeps the
/// tiny trailing entries of a Hessenberg T relatively accurate.
CVector phi_dense(const DenseMatrix& t, Complex z, int p);

/// Functions of a fixed real symmetric tridiagonal matrix at many scalings.
/// The eigendecomposition is computed once; each evaluation of
/// phi_p(z T) e_1 then costs O(m^2). Small ||zT||_1 takes the series path
/// of phi_dense.
class SymTridFunctions {
 public:
  explicit SymTridFunctions(const DenseMatrix& t);

  CVector phi_e1(Complex z, int p) const;
  const SymTridEigen& eigen() const { return eig_; }

 private:
  SymTridEigen eig_;
  DenseMatrix t_;
};

}  // namespace kexp

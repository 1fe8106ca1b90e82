#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kexp/sparse.hpp"
#include "kexp/types.hpp"

namespace kexp {

// Reference solutions that share no code with the Krylov path.

/// k-th eigenvalue (k = 1..n) of 1/4 tridiag(-1, 2, -1): sin^2(k pi / (2(n+1))).
double laplacian_eigenvalue(std::size_t n, std::size_t k);

/// phi_p(sigma t H) v for H = 1/4 tridiag(-1, 2, -1) of size v.size(), by
/// expansion in the sine eigenbasis. O(n^2).
CVector oracle_laplacian(const Prefactor& sigma, double t, std::span<const Complex> v, int p = 0);

/// exp(sigma t A) v by s substeps with ||sigma t A / s||_2 <= 1 and
/// truncated Taylor sums; each sum stops once the remainder bound drops
/// below target_accuracy relative to the partial sum.
/// Throws ConvergenceError if a sum needs more than 200 terms.
CVector oracle_series(const SparseOperator& a, const Prefactor& sigma, double t, std::span<const Complex> v,
                      double target_accuracy = 1e-15);

/// phi_p(sigma t A) v as the last column block of the exponential of the
/// (n+p)-dimensional augmented operator [sigma t A, v, 0; 0, 0, I; 0, 0, 0],
/// evaluated with the same series scheme. p = 0 is oracle_series.
CVector oracle_phi(const SparseOperator& a, const Prefactor& sigma, double t, std::span<const Complex> v, int p,
                   double target_accuracy = 1e-15);

/// All eigenvalues of a Hermitian operator via a dense eigensolve, ascending.
/// O(n^3) time and O(n^2) memory: meant for one-off verification runs.
std::vector<double> dense_hermitian_eigenvalues(const SparseOperator& a);

}  // namespace kexp

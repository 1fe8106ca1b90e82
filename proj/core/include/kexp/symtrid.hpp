#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kexp {

/// Eigendecomposition T = Q diag(lambda) Q^T of a real symmetric
/// tridiagonal matrix. Eigenvalues are sorted ascending; column k of Q is
/// the eigenvector for eigenvalues[k].
struct SymTridEigen {
  std::vector<double> eigenvalues;
  std::vector<double> q;  // row-major n x n; empty if vectors were not requested
  std::size_t n = 0;

  double vector_entry(std::size_t row, std::size_t k) const { return q[row * n + k]; }
};

/// Implicit QL iteration with Wilkinson shifts.
/// `diagonal` has n entries, `offdiagonal` n-1 (entry i couples rows i and i+1).
/// Throws ConvergenceError after 60 sweeps on a single eigenvalue.
SymTridEigen symtrid_eig(std::span<const double> diagonal, std::span<const double> offdiagonal,
                         bool compute_vectors = true);

}  // namespace kexp

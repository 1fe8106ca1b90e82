#pragma once

#include "kexp/sparse.hpp"

namespace kexp {

struct LogNormEstimate {
  /// Largest Ritz value of (sigma A + (sigma A)^*) / 2; a lower estimate of mu_2(sigma A).
  double value = 0.0;
  /// Ritz residual norm: some eigenvalue lies within [value - residual, value + residual].
  double residual = 0.0;
  bool converged = false;
  int iterations = 0;

  /// Conservative upper end of the interval. Use this when deciding nonexpansiveness.
  double upper() const { return value + residual; }
};

/// Estimates the 2-norm logarithmic norm of sigma A with a Lanczos
/// iteration on the Hermitian part. Only for precondition warnings; no
/// bound in kexp depends on it.
LogNormEstimate log_norm_estimate(const SparseOperator& a, const Prefactor& sigma,
                                  int max_iterations = 80, double rel_tol = 1e-10);

}  // namespace kexp

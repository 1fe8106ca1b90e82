#include "kexp/lognorm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include "kexp/symtrid.hpp"

namespace kexp {

LogNormEstimate log_norm_estimate(const SparseOperator& a, const Prefactor& sigma,
                                  int max_iterations, double rel_tol) {
  const std::size_t n = a.dimension();
  LogNormEstimate out;
  if (n == 0) {
    out.converged = true;
    return out;
  }
  const Complex s = sigma.value();
  auto apply_hermitian_part = [&](const CVector& x) {
    CVector y = a.matvec(x);
    const CVector z = a.adjoint_matvec(x);
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.5 * (s * y[i] + std::conj(s) * z[i]);
    return y;
  };

  std::mt19937_64 rng(0x5eed1234abcdULL);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CVector q(n);
  for (auto& z : q) z = Complex(unif(rng), unif(rng));
  scale(1.0 / norm2(q), q);

  std::vector<CVector> basis{q};
  std::vector<double> alpha, beta;
  const int kmax = static_cast<int>(std::min<std::size_t>(n, static_cast<std::size_t>(max_iterations)));
  for (int k = 0; k < kmax; ++k) {
    CVector w = apply_hermitian_part(basis.back());
    alpha.push_back(dot(basis.back(), w).real());
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass)
      for (const CVector& b : basis) axpy(-dot(b, w), b, w);
    const double b = norm2(w);

    const SymTridEigen eig = symtrid_eig(alpha, beta, true);
    const std::size_t m = eig.n;
    out.value = eig.eigenvalues.back();
    out.residual = b * std::abs(eig.vector_entry(m - 1, m - 1));
    out.iterations = k + 1;

    const double scale_ref = std::max(1.0, std::abs(out.value));
    if (out.residual <= rel_tol * scale_ref || b <= 1e-14 * scale_ref) {
      out.converged = true;
      break;
    }
    beta.push_back(b);
    scale(1.0 / b, w);
    basis.push_back(std::move(w));
  }
  if (static_cast<std::size_t>(out.iterations) == n) out.converged = true;
  return out;
}

}  // namespace kexp

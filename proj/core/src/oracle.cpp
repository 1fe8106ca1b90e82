#include "kexp/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "kexp/expm.hpp"

namespace kexp {

namespace {

using Apply = std::function<void(std::span<const Complex>, std::span<Complex>)>;

/// exp(B) x where ||B||_2 <= bound.
CVector taylor_exp(const Apply& apply_b, double bound, std::span<const Complex> x, double target) {
  if (!(target >= 1e-16)) throw std::invalid_argument("oracle: target accuracy too small");
  const std::size_t n = x.size();
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(bound)));
  const double h = 1.0 / static_cast<double>(steps);
  CVector y(x.begin(), x.end());
  CVector term(n), next(n);
  for (std::size_t s = 0; s < steps; ++s) {
    term = y;
    for (int k = 1;; ++k) {
      if (k > 200) throw ConvergenceError("oracle_series: Taylor sum did not converge");
      apply_b(term, next);
      scale(h / k, next);
      term.swap(next);
      axpy(1.0, term, y);
      // With ||hB|| <= 1 the tail after term k is at most ||term_k|| / k.
      const double tail = norm2(term) / k;
      if (tail <= target * norm2(y) || tail == 0.0) break;
    }
  }
  return y;
}

}  // namespace

double laplacian_eigenvalue(std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw std::out_of_range("laplacian_eigenvalue: k out of range");
  const double s = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(n + 1)));
  return s * s;
}

CVector oracle_laplacian(const Prefactor& sigma, double t, std::span<const Complex> v, int p) {
  const std::size_t n = v.size();
  if (n == 0) return {};
  if (p < 0) throw std::invalid_argument("oracle_laplacian: p must be >= 0");
  // sin(j k pi/(n+1)) depends only on j k mod 2(n+1).
  const std::size_t period = 2 * (n + 1);
  std::vector<double> table(period);
  for (std::size_t i = 0; i < period; ++i) {
    table[i] = std::sin(static_cast<double>(i) * std::numbers::pi / static_cast<double>(n + 1));
  }
  const double norm = std::sqrt(2.0 / static_cast<double>(n + 1));
  CVector out(n);
  for (std::size_t k = 1; k <= n; ++k) {
    Complex c{};
    for (std::size_t j = 1; j <= n; ++j) c += table[(j * k) % period] * v[j - 1];
    c *= norm * norm * phi_scalar(sigma.value() * t * laplacian_eigenvalue(n, k), p);
    for (std::size_t j = 1; j <= n; ++j) out[j - 1] += table[(j * k) % period] * c;
  }
  return out;
}

CVector oracle_series(const SparseOperator& a, const Prefactor& sigma, double t, std::span<const Complex> v,
                      double target_accuracy) {
  return oracle_phi(a, sigma, t, v, 0, target_accuracy);
}

CVector oracle_phi(const SparseOperator& a, const Prefactor& sigma, double t, std::span<const Complex> v, int p,
                   double target_accuracy) {
  const std::size_t n = a.dimension();
  if (v.size() != n) throw std::invalid_argument("oracle: vector length mismatch");
  if (p < 0) throw std::invalid_argument("oracle_phi: p must be >= 0");
  if (!(t >= 0.0)) throw std::invalid_argument("oracle: t must be >= 0");
  const Complex z = sigma.value() * t;
  // max(||A||_1, ||A||_inf) bounds ||A||_2.
  const double a_bound = std::max(a.norm1(), a.norm_inf()) * t;

  if (p == 0) {
    const Apply apply = [&](std::span<const Complex> x, std::span<Complex> y) {
      a.matvec(x, y);
      scale(z, y);
    };
    return taylor_exp(apply, a_bound, v, target_accuracy);
  }

  const auto np = static_cast<std::size_t>(p);
  const Apply apply = [&](std::span<const Complex> x, std::span<Complex> y) {
    a.matvec(x.first(n), y.first(n));
    scale(z, y.first(n));
    axpy(x[n], v, y.first(n));
    for (std::size_t i = 0; i + 1 < np; ++i) y[n + i] = x[n + i + 1];
    y[n + np - 1] = Complex{};
  };
  CVector x(n + np);
  x[n + np - 1] = 1.0;
  const double bound = a_bound + norm2(v) + 1.0;
  CVector y = taylor_exp(apply, bound, x, target_accuracy);
  y.resize(n);
  return y;
}

std::vector<double> dense_hermitian_eigenvalues(const SparseOperator& a) {
  if (a.structure() != Structure::hermitian) {
    throw std::invalid_argument("dense_hermitian_eigenvalues: operator not flagged Hermitian");
  }
  const auto n = static_cast<Eigen::Index>(a.dimension());
  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(n, n);
  const auto rp = a.row_ptr();
  const auto ci = a.col_idx();
  const auto val = a.values();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t k = rp[static_cast<std::size_t>(i)]; k < rp[static_cast<std::size_t>(i) + 1]; ++k) {
      dense(i, static_cast<Eigen::Index>(ci[k])) = val[k];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(dense, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw ConvergenceError("dense_hermitian_eigenvalues: eigensolver failed");
  const Eigen::VectorXd ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace kexp

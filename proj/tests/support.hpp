#pragma once

// Independent reference machinery for the tests. Nothing here calls into
// the Krylov or dense-function code paths of the library.

#include <cmath>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <kexp/dense.hpp>
#include <kexp/krylov.hpp>
#include <kexp/sparse.hpp>

namespace kexp::test {

using EMatrix = Eigen::MatrixXcd;
using EVector = Eigen::VectorXcd;

inline EMatrix to_eigen(const DenseMatrix& a) {
  EMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  return out;
}

inline EMatrix to_eigen(const SparseOperator& a) { return to_eigen(a.to_dense()); }

inline EVector to_eigen(std::span<const Complex> x) {
  EVector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out(i) = x[i];
  return out;
}

inline CVector from_eigen(const EVector& x) { return CVector(x.data(), x.data() + x.size()); }

/// Krylov basis V_m (without v_{m+1}) as an n x m matrix.
inline EMatrix basis_matrix(const KrylovDecomposition& dec, std::size_t cols) {
  EMatrix v(dec.n, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    const auto col = dec.v(j);
    for (std::size_t i = 0; i < dec.n; ++i) v(i, j) = col[i];
  }
  return v;
}

/// exp(z A) x by Taylor sums over ceil(||zA||_1) substeps, run to
/// stagnation. Dense, O(n^2) per term; for small reference problems.
inline EVector series_exp(const EMatrix& a, Complex z, EVector x) {
  const double norm = (z * a).cwiseAbs().colwise().sum().maxCoeff();
  const int s = std::max(1, static_cast<int>(std::ceil(norm)));
  const EMatrix b = (z / static_cast<double>(s)) * a;
  for (int step = 0; step < s; ++step) {
    EVector term = x, sum = x;
    for (int k = 1; k < 400; ++k) {
      term = b * term / static_cast<double>(k);
      sum += term;
      if (term.norm() <= 1e-18 * sum.norm()) break;
    }
    x = sum;
  }
  return x;
}

/// phi_p(z A) x by its defining series sum_k (zA)^k x / (k+p)!.
/// Only for ||zA|| of order one.
inline EVector series_phi(const EMatrix& a, Complex z, const EVector& x, int p) {
  double fact = 1.0;
  for (int i = 2; i <= p; ++i) fact *= i;
  EVector power = x;
  EVector sum = x / fact;
  for (int k = 1; k < 200; ++k) {
    power = z * (a * power);
    fact *= static_cast<double>(k + p);
    const EVector term = power / fact;
    sum += term;
    if (term.norm() <= 1e-18 * sum.norm()) break;
  }
  return sum;
}

/// Gauss-Legendre nodes and weights on [-1, 1] via Newton on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<double> logspace(double a, double b, int count) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = a * std::pow(b / a, count == 1 ? 0.0 : double(i) / (count - 1));
  return out;
}

}  // namespace kexp::test

#include "kexp/expm.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kexp {

namespace {

// Pade degrees and the 1-norm bounds below which each reaches unit roundoff.
constexpr std::array<double, 4> kTheta{1.495585217958292e-2, 2.539398330063230e-1,
                                       9.504178996162932e-1, 2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

constexpr std::array<double, 4> kB3{120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kB5{30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kB7{17297280.0, 8648640.0, 1995840.0, 277200.0,
                                    25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kB9{17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                     30270240.0,    2162160.0,    110880.0,     3960.0,
                                     90.0,          1.0};
constexpr std::array<double, 14> kB13{
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

// Returns (V - U)^{-1} (V + U) for the low-degree approximants.
template <std::size_t N>
DenseMatrix pade_low(const DenseMatrix& a, const std::array<double, N>& b) {
  const std::size_t n = a.rows();
  const DenseMatrix a2 = a * a;
  DenseMatrix power = DenseMatrix::identity(n);
  DenseMatrix u_inner = DenseMatrix::zeros(n, n);
  DenseMatrix v = DenseMatrix::zeros(n, n);
  for (std::size_t k = 0; 2 * k + 1 < N; ++k) {
    v += Complex(b[2 * k]) * power;
    u_inner += Complex(b[2 * k + 1]) * power;
    power = power * a2;
  }
  const DenseMatrix u = a * u_inner;
  return solve(v - u, v + u);
}

DenseMatrix pade13(const DenseMatrix& a) {
  const auto& b = kB13;
  const std::size_t n = a.rows();
  const DenseMatrix a2 = a * a;
  const DenseMatrix a4 = a2 * a2;
  const DenseMatrix a6 = a4 * a2;
  const DenseMatrix eye = DenseMatrix::identity(n);
  const DenseMatrix u_hi = Complex(b[13]) * a6 + Complex(b[11]) * a4 + Complex(b[9]) * a2;
  const DenseMatrix u_lo = Complex(b[7]) * a6 + Complex(b[5]) * a4 + Complex(b[3]) * a2 +
                           Complex(b[1]) * eye;
  const DenseMatrix u = a * (a6 * u_hi + u_lo);
  const DenseMatrix v_hi = Complex(b[12]) * a6 + Complex(b[10]) * a4 + Complex(b[8]) * a2;
  const DenseMatrix v = a6 * v_hi + Complex(b[6]) * a6 + Complex(b[4]) * a4 +
                        Complex(b[2]) * a2 + Complex(b[0]) * eye;
  return solve(v - u, v + u);
}

DenseMatrix expm_symtrid(const DenseMatrix& t, Complex z) {
  const SymTridFunctions f(t);
  const SymTridEigen& eig = f.eigen();
  const std::size_t n = eig.n;
  std::vector<Complex> ez(n);
  for (std::size_t k = 0; k < n; ++k) ez[k] = std::exp(z * eig.eigenvalues[k]);
  DenseMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex s{};
      for (std::size_t k = 0; k < n; ++k) s += eig.vector_entry(i, k) * ez[k] * eig.vector_entry(j, k);
      out(i, j) = s;
    }
  }
  return out;
}

// Below this ||zT||_1 the first column is summed as a plain Taylor series.
constexpr double kTaylorRadius = 1.0;

double norm1_scaled(const DenseMatrix& t, Complex z) { return std::abs(z) * t.norm1(); }

// sum_k (zT)^k e_1 / (k+p)!. For Hessenberg T the k-th term vanishes below
// row k+1 exactly, so the trailing entries keep full relative accuracy
// instead of sitting at the absolute round-off level of the other paths.
CVector phi_e1_taylor(const DenseMatrix& t, Complex z, int p) {
  const std::size_t m = t.rows();
  double inv_fact = 1.0;
  for (int j = 2; j <= p; ++j) inv_fact /= j;
  CVector power(m), sum(m), next(m);
  power[0] = 1.0;
  sum[0] = inv_fact;
  for (std::size_t k = 1; k < 400; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      Complex acc{};
      for (std::size_t j = 0; j < m; ++j) acc += t(i, j) * power[j];
      next[i] = z * acc;
    }
    power.swap(next);
    inv_fact /= static_cast<double>(k) + p;
    double term = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      sum[i] += power[i] * inv_fact;
      term = std::max(term, std::abs(power[i]) * inv_fact);
    }
    if (k + 1 < m) continue;
    double smallest = std::numeric_limits<double>::infinity();
    for (const Complex& x : sum)
      if (x != Complex{}) smallest = std::min(smallest, std::abs(x));
    if (term <= 0x1p-56 * smallest) break;
  }
  return sum;
}

}  // namespace

DenseMatrix expm_pade(const DenseMatrix& a) {
  if (!a.is_square()) throw std::invalid_argument("expm: matrix must be square");
  if (!a.all_finite()) throw std::invalid_argument("expm: non-finite entries");
  const std::size_t n = a.rows();
  if (n == 0) return a;
  const double norm = a.norm1();
  if (norm <= kTheta[0]) return pade_low(a, kB3);
  if (norm <= kTheta[1]) return pade_low(a, kB5);
  if (norm <= kTheta[2]) return pade_low(a, kB7);
  if (norm <= kTheta[3]) return pade_low(a, kB9);

  int s = 0;
  if (norm > kTheta13) s = static_cast<int>(std::ceil(std::log2(norm / kTheta13)));
  DenseMatrix scaled = a;
  scaled *= Complex(std::ldexp(1.0, -s));
  DenseMatrix r = pade13(scaled);
  for (int k = 0; k < s; ++k) {
    r = r * r;
    if (!r.all_finite()) throw std::overflow_error("expm: overflow in squaring phase");
  }
  if (!r.all_finite()) throw std::overflow_error("expm: non-finite result");
  return r;
}

DenseMatrix expm_dense(const DenseMatrix& t, Complex z) {
  if (!t.is_square()) throw std::invalid_argument("expm: matrix must be square");
  if (!is_finite(z)) throw std::invalid_argument("expm: non-finite scaling");
  if (t.rows() > 1 && t.is_real_symmetric_tridiagonal()) {
    DenseMatrix r = expm_symtrid(t, z);
    if (!r.all_finite()) throw std::overflow_error("expm: non-finite result");
    return r;
  }
  DenseMatrix a = t;
  a *= z;
  return expm_pade(a);
}

Complex phi_scalar(Complex z, int p) {
  if (p < 0) throw std::invalid_argument("phi: p must be nonnegative");
  if (std::abs(z) < 1.0) {
    double inv_fact = 1.0;  // 1/(k+p)!
    for (int j = 2; j <= p; ++j) inv_fact /= j;
    Complex term = inv_fact;
    Complex sum = term;
    for (int k = 1; k < 60; ++k) {
      term *= z / static_cast<double>(k + p);
      sum += term;
      if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  Complex phi = std::exp(z);
  double inv_fact = 1.0;  // 1/(k-1)!
  for (int k = 1; k <= p; ++k) {
    phi = (phi - inv_fact) / z;
    inv_fact /= k;
  }
  return phi;
}

CVector phi_dense(const DenseMatrix& t, Complex z, int p) {
  if (p < 0) throw std::invalid_argument("phi_dense: p must be nonnegative");
  if (!t.is_square()) throw std::invalid_argument("phi_dense: matrix must be square");
  const std::size_t m = t.rows();
  if (norm1_scaled(t, z) <= kTaylorRadius) return phi_e1_taylor(t, z, p);
  if (p == 0) return expm_dense(t, z).column(0);

  const std::size_t size = m + static_cast<std::size_t>(p);
  DenseMatrix aug(size, size);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) aug(i, j) = z * t(i, j);
  aug(0, m) = 1.0;
  for (std::size_t k = m; k + 1 < size; ++k) aug(k, k + 1) = 1.0;
  const DenseMatrix e = expm_pade(aug);
  CVector out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = e(i, size - 1);
  return out;
}

SymTridFunctions::SymTridFunctions(const DenseMatrix& t) {
  if (!t.is_real_symmetric_tridiagonal()) {
    throw std::invalid_argument("SymTridFunctions: matrix is not real symmetric tridiagonal");
  }
  const std::size_t n = t.rows();
  std::vector<double> diag(n), off(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i < n; ++i) diag[i] = t(i, i).real();
  for (std::size_t i = 0; i + 1 < n; ++i) off[i] = t(i + 1, i).real();
  eig_ = symtrid_eig(diag, off, true);
  t_ = t;
}

CVector SymTridFunctions::phi_e1(Complex z, int p) const {
  if (norm1_scaled(t_, z) <= kTaylorRadius) return phi_e1_taylor(t_, z, p);
  const std::size_t n = eig_.n;
  std::vector<Complex> coeff(n);
  for (std::size_t k = 0; k < n; ++k) {
    coeff[k] = phi_scalar(z * eig_.eigenvalues[k], p) * eig_.vector_entry(0, k);
  }
  CVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Complex s{};
    for (std::size_t k = 0; k < n; ++k) s += eig_.vector_entry(i, k) * coeff[k];
    out[i] = s;
  }
  return out;
}

}  // namespace kexp

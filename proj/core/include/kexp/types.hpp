#pragma once

// Scalar and vector vocabulary shared by every kexp module.

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kexp {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Thrown when an iterative kernel exhausts its iteration budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Unimodular prefactor sigma in exp(sigma t A).
class Prefactor {
 public:
  explicit Prefactor(Complex sigma) : sigma_(sigma) {
    if (!is_finite(sigma) || std::abs(std::abs(sigma) - 1.0) > 1e-12) {
      throw std::invalid_argument("prefactor must satisfy |sigma| = 1");
    }
  }

  static Prefactor minus_i() { return Prefactor(Complex(0.0, -1.0)); }
  static Prefactor minus_one() { return Prefactor(Complex(-1.0, 0.0)); }
  static Prefactor one() { return Prefactor(Complex(1.0, 0.0)); }

  Complex value() const { return sigma_; }
  bool is_real() const { return sigma_.imag() == 0.0; }
  bool is_imaginary() const { return sigma_.real() == 0.0; }

  friend bool operator==(const Prefactor&, const Prefactor&) = default;

 private:
  Complex sigma_;
};

std::string to_string(const Prefactor& sigma);
/// Accepts "-i", "i", "-1", "1" and "re,im".
Prefactor parse_prefactor(const std::string& text);

// Level-1 kernels. All of them require equal lengths.

/// Conjugate-linear in the first argument: x^* y.
Complex dot(std::span<const Complex> x, std::span<const Complex> y);
double norm2(std::span<const Complex> x);
/// y += a x
void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y);
void scale(Complex a, std::span<Complex> x);
/// ||x - y||_2
double distance(std::span<const Complex> x, std::span<const Complex> y);

}  // namespace kexp

#include "kexp/dense.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kexp {

std::string to_string(const Prefactor& sigma) {
  const Complex s = sigma.value();
  if (s == Complex(0, -1)) return "-i";
  if (s == Complex(0, 1)) return "i";
  if (s == Complex(-1, 0)) return "-1";
  if (s == Complex(1, 0)) return "1";
  std::ostringstream os;
  os.precision(17);
  os << s.real() << ',' << s.imag();
  return os.str();
}

Prefactor parse_prefactor(const std::string& text) {
  if (text == "-i") return Prefactor::minus_i();
  if (text == "i" || text == "+i") return Prefactor(Complex(0, 1));
  if (text == "-1") return Prefactor::minus_one();
  if (text == "1" || text == "+1") return Prefactor::one();
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw std::invalid_argument("cannot parse prefactor '" + text + "'");
  }
  try {
    return Prefactor(Complex(std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))));
  } catch (const std::logic_error&) {
    throw std::invalid_argument("cannot parse prefactor '" + text + "'");
  }
}

namespace {
void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("vector length mismatch");
}
}  // namespace

Complex dot(std::span<const Complex> x, std::span<const Complex> y) {
  require_same_length(x.size(), y.size());
  Complex s{};
  for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
  return s;
}

double norm2(std::span<const Complex> x) {
  // Scaled accumulation, as in the reference BLAS dznrm2.
  double scale_ = 0.0;
  double ssq = 1.0;
  for (const Complex& z : x) {
    for (double c : {z.real(), z.imag()}) {
      if (c != 0.0) {
        const double a = std::abs(c);
        if (scale_ < a) {
          ssq = 1.0 + ssq * (scale_ / a) * (scale_ / a);
          scale_ = a;
        } else {
          ssq += (a / scale_) * (a / scale_);
        }
      }
    }
  }
  return scale_ * std::sqrt(ssq);
}

void axpy(Complex a, std::span<const Complex> x, std::span<Complex> y) {
  require_same_length(x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(Complex a, std::span<Complex> x) {
  for (Complex& z : x) z *= a;
}

double distance(std::span<const Complex> x, std::span<const Complex> y) {
  require_same_length(x.size(), y.size());
  CVector d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  return norm2(d);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("DenseMatrix: entries.size() != rows * cols");
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

CVector DenseMatrix::column(std::size_t j) const {
  CVector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

DenseMatrix DenseMatrix::leading_block(std::size_t rows, std::size_t cols) const {
  if (rows > rows_ || cols > cols_) throw std::out_of_range("leading_block");
  DenseMatrix b(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) b(i, j) = (*this)(i, j);
  return b;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("DenseMatrix product: shape mismatch");
  DenseMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Complex* orow = &out.data_[i * rhs.cols_];
    for (std::size_t k = 0; k < cols_; ++k) {
      const Complex a = data_[i * cols_ + k];
      if (a == Complex{}) continue;
      const Complex* brow = &rhs.data_[k * rhs.cols_];
      for (std::size_t j = 0; j < rhs.cols_; ++j) orow[j] += a * brow[j];
    }
  }
  return out;
}

CVector DenseMatrix::operator*(std::span<const Complex> x) const {
  if (x.size() != cols_) throw std::invalid_argument("DenseMatrix*vector: shape mismatch");
  CVector y(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Complex s{};
    for (std::size_t j = 0; j < cols_; ++j) s += data_[i * cols_ + j] * x[j];
    y[i] = s;
  }
  return y;
}

DenseMatrix DenseMatrix::operator+(const DenseMatrix& rhs) const {
  DenseMatrix out(*this);
  out += rhs;
  return out;
}

DenseMatrix DenseMatrix::operator-(const DenseMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("shape mismatch");
  DenseMatrix out(*this);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] -= rhs.data_[i];
  return out;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& rhs) {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(Complex a) {
  for (Complex& z : data_) z *= a;
  return *this;
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

double DenseMatrix::norm1() const {
  double best = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double DenseMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

double DenseMatrix::norm_frobenius() const { return norm2(data_); }

double DenseMatrix::max_abs() const {
  double best = 0.0;
  for (const Complex& z : data_) best = std::max(best, std::abs(z));
  return best;
}

bool DenseMatrix::is_real_symmetric_tridiagonal() const {
  if (!is_square()) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      const Complex a = (*this)(i, j);
      if (a.imag() != 0.0) return false;
      const std::size_t gap = i > j ? i - j : j - i;
      if (gap > 1 && a != Complex{}) return false;
      if (gap == 1 && a != (*this)(j, i)) return false;
    }
  }
  return true;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](Complex z) { return is_finite(z); });
}

DenseMatrix solve(DenseMatrix a, DenseMatrix b) {
  if (!a.is_square() || a.rows() != b.rows()) throw std::invalid_argument("solve: shape mismatch");
  const std::size_t n = a.rows();
  const std::size_t k = b.cols();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > best) {
        best = std::abs(a(r, col));
        piv = r;
      }
    }
    if (best == 0.0) throw std::domain_error("solve: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (std::size_t j = 0; j < k; ++j) std::swap(b(col, j), b(piv, j));
    }
    const Complex inv = 1.0 / a(col, col);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex f = a(r, col) * inv;
      if (f == Complex{}) continue;
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      for (std::size_t j = 0; j < k; ++j) b(r, j) -= f * b(col, j);
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    const Complex inv = 1.0 / a(col, col);
    for (std::size_t j = 0; j < k; ++j) {
      Complex s = b(col, j);
      for (std::size_t c = col + 1; c < n; ++c) s -= a(col, c) * b(c, j);
      b(col, j) = s * inv;
    }
  }
  return b;
}

}  // namespace kexp

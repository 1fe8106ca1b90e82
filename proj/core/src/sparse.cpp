#include "kexp/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kexp {

std::string to_string(Structure s) {
  switch (s) {
    case Structure::general: return "general";
    case Structure::hermitian: return "hermitian";
    case Structure::skew_hermitian: return "skew-hermitian";
  }
  return "general";
}

Structure parse_structure(const std::string& text) {
  if (text == "general") return Structure::general;
  if (text == "hermitian") return Structure::hermitian;
  if (text == "skew-hermitian") return Structure::skew_hermitian;
  throw std::invalid_argument("unknown structure '" + text + "'");
}

SparseOperator SparseOperator::from_triplets(std::size_t n, std::vector<Triplet> entries,
                                             Structure structure) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("SparseOperator: dimension exceeds 32-bit column indices");
  }
  for (const Triplet& t : entries) {
    if (t.row >= n || t.col >= n) throw std::invalid_argument("SparseOperator: index out of range");
    if (!is_finite(t.value)) throw std::invalid_argument("SparseOperator: non-finite value");
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  SparseOperator op;
  op.n_ = n;
  op.structure_ = structure;
  op.row_ptr_.assign(n + 1, 0);
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const Triplet& t = entries[k];
    if (!op.values_.empty() && k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
      op.values_.back() += t.value;
      continue;
    }
    op.col_idx_.push_back(static_cast<std::uint32_t>(t.col));
    op.values_.push_back(t.value);
    ++op.row_ptr_[t.row + 1];
  }
  for (std::size_t i = 0; i < n; ++i) op.row_ptr_[i + 1] += op.row_ptr_[i];
  op.validate();
  return op;
}

SparseOperator SparseOperator::from_csr(std::size_t n, std::vector<std::size_t> row_ptr,
                                        std::vector<std::uint32_t> col_idx,
                                        std::vector<Complex> values, Structure structure) {
  SparseOperator op;
  op.n_ = n;
  op.row_ptr_ = std::move(row_ptr);
  op.col_idx_ = std::move(col_idx);
  op.values_ = std::move(values);
  op.structure_ = structure;
  op.validate();
  return op;
}

SparseOperator SparseOperator::from_dense(const DenseMatrix& a, Structure structure) {
  if (!a.is_square()) throw std::invalid_argument("SparseOperator: matrix must be square");
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != Complex{}) t.push_back({i, j, a(i, j)});
  return from_triplets(a.rows(), std::move(t), structure);
}

void SparseOperator::validate() const {
  if (row_ptr_.size() != n_ + 1 || row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
      col_idx_.size() != values_.size()) {
    throw std::invalid_argument("SparseOperator: inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (row_ptr_[i + 1] < row_ptr_[i]) {
      throw std::invalid_argument("SparseOperator: row pointers must be nondecreasing");
    }
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (col_idx_[k] >= n_) throw std::invalid_argument("SparseOperator: column index out of range");
    if (!is_finite(values_[k])) throw std::invalid_argument("SparseOperator: non-finite value");
  }
  constexpr double kTol = 1e-12;
  if (structure_ == Structure::hermitian && hermitian_defect() > kTol) {
    throw std::invalid_argument("SparseOperator: flagged hermitian but A != A^*");
  }
  if (structure_ == Structure::skew_hermitian && skew_hermitian_defect() > kTol) {
    throw std::invalid_argument("SparseOperator: flagged skew-hermitian but A != -A^*");
  }
}

void SparseOperator::matvec(std::span<const Complex> x, std::span<Complex> y) const {
  if (x.size() != n_ || y.size() != n_) throw std::invalid_argument("matvec: dimension mismatch");
  const std::size_t* rp = row_ptr_.data();
  const std::uint32_t* ci = col_idx_.data();
  const Complex* val = values_.data();
  for (std::size_t i = 0; i < n_; ++i) {
    Complex s{};
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += val[k] * x[ci[k]];
    y[i] = s;
  }
}

CVector SparseOperator::matvec(std::span<const Complex> x) const {
  CVector y(n_);
  matvec(x, y);
  return y;
}

CVector SparseOperator::adjoint_matvec(std::span<const Complex> x) const {
  if (x.size() != n_) throw std::invalid_argument("adjoint_matvec: dimension mismatch");
  CVector y(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      y[col_idx_[k]] += std::conj(values_[k]) * x[i];
  return y;
}

double SparseOperator::norm1() const {
  std::vector<double> colsum(n_, 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) colsum[col_idx_[k]] += std::abs(values_[k]);
  return colsum.empty() ? 0.0 : *std::max_element(colsum.begin(), colsum.end());
}

double SparseOperator::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += std::abs(values_[k]);
    best = std::max(best, s);
  }
  return best;
}

namespace {

// Entry (i, j) by binary search in row i; zero if not stored.
Complex lookup(std::span<const std::size_t> rp, std::span<const std::uint32_t> ci,
               std::span<const Complex> val, std::size_t i, std::size_t j) {
  const auto first = ci.begin() + static_cast<std::ptrdiff_t>(rp[i]);
  const auto last = ci.begin() + static_cast<std::ptrdiff_t>(rp[i + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
  if (it == last || *it != j) return {};
  return val[static_cast<std::size_t>(it - ci.begin())];
}

}  // namespace

double SparseOperator::hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const Complex mirror = lookup(row_ptr_, col_idx_, values_, col_idx_[k], i);
      worst = std::max(worst, std::abs(values_[k] - std::conj(mirror)));
    }
  }
  return worst;
}

double SparseOperator::skew_hermitian_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const Complex mirror = lookup(row_ptr_, col_idx_, values_, col_idx_[k], i);
      worst = std::max(worst, std::abs(values_[k] + std::conj(mirror)));
    }
  }
  return worst;
}

DenseMatrix SparseOperator::to_dense() const {
  DenseMatrix a(n_, n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) a(i, col_idx_[k]) += values_[k];
  return a;
}

std::vector<Triplet> SparseOperator::to_triplets() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) t.push_back({i, col_idx_[k], values_[k]});
  return t;
}

bool LinearOperator::sigma_hermitian() const {
  return matrix.structure() == Structure::hermitian && sigma.is_real();
}

bool LinearOperator::sigma_skew_hermitian() const {
  return matrix.structure() == Structure::hermitian && sigma.is_imaginary();
}

}  // namespace kexp

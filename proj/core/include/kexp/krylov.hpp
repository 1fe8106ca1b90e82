#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kexp/dense.hpp"
#include "kexp/sparse.hpp"
#include "kexp/types.hpp"

namespace kexp {

enum class KrylovMode { arnoldi, lanczos, automatic };

/// none:  plain three-term Lanczos recurrence (Arnoldi always does one MGS pass).
/// full:  one modified Gram-Schmidt sweep against the whole basis.
/// twice: a second sweep on top of `full`.
enum class Reorthogonalization { none, full, twice };

std::string to_string(KrylovMode mode);
std::string to_string(Reorthogonalization r);
KrylovMode parse_krylov_mode(const std::string& text);
Reorthogonalization parse_reorthogonalization(const std::string& text);

struct KrylovConfig {
  std::size_t m_max = 30;
  KrylovMode mode = KrylovMode::automatic;
  Reorthogonalization reorthogonalize = Reorthogonalization::twice;
  /// Subdiagonal entries at or below this value count as a lucky breakdown.
  /// Defaults to n * eps * ||A||_1.
  std::optional<double> breakdown_tol;

  /// `twice` for m_max > 20, `full` otherwise.
  static KrylovConfig with_defaults(std::size_t m_max, KrylovMode mode = KrylovMode::automatic);
  void validate() const;
};

/// A V_m = V_m T_m + tau_{m+1,m} v_{m+1} e_m^*.
struct KrylovDecomposition {
  std::size_t n = 0;
  std::size_t m = 0;
  /// Column-major n x (m+1) basis; the last column is v_{m+1}, absent after breakdown.
  std::vector<Complex> basis;
  /// m x m upper Hessenberg (real symmetric tridiagonal in Lanczos mode).
  DenseMatrix t;
  double tau_next = 0.0;
  /// gamma_m = prod of the m-1 subdiagonal entries of T. May overflow for
  /// large m; log_gamma is always finite for a nonzero product.
  double gamma = 1.0;
  double log_gamma = 0.0;
  bool breakdown = false;
  std::size_t matvecs = 0;

  KrylovMode mode = KrylovMode::arnoldi;  // resolved, never automatic
  Reorthogonalization reorthogonalize = Reorthogonalization::twice;
  double breakdown_tol = 0.0;
  std::size_t m_max = 0;

  std::size_t dimension() const { return m; }
  bool has_next() const { return !breakdown; }
  std::span<const Complex> v(std::size_t j) const;
  std::span<const Complex> v_next() const;
  /// sum_j coeffs[j] v_j over the first coeffs.size() basis vectors.
  CVector combine(std::span<const Complex> coeffs) const;
  /// log(tau_{m+1,m} gamma_m), or -inf on breakdown.
  double log_tau_gamma() const;
};

/// Incremental Arnoldi / Lanczos process. Each step costs one matvec.
class KrylovBuilder {
 public:
  /// `v` must have unit 2-norm (within 1e-12).
  KrylovBuilder(const SparseOperator& a, std::span<const Complex> v, const KrylovConfig& cfg);
  /// Resumes from an existing decomposition.
  KrylovBuilder(const SparseOperator& a, KrylovDecomposition dec);

  /// Adds one dimension. Returns false once the decomposition cannot grow
  /// (breakdown or m_max reached).
  bool step();
  bool can_step() const;

  const KrylovDecomposition& decomposition() const { return dec_; }
  KrylovDecomposition release() { return std::move(dec_); }

 private:
  void check_operator() const;

  const SparseOperator* a_;
  KrylovDecomposition dec_;
  CVector w_;
};

/// Builds a decomposition of dimension cfg.m_max, or less on lucky breakdown.
/// Throws std::invalid_argument if v is not normalized or Lanczos mode is
/// requested for an operator not flagged Hermitian.
KrylovDecomposition build_krylov(const SparseOperator& a, std::span<const Complex> v,
                                 const KrylovConfig& cfg);

/// Continues `dec` by `steps` dimensions. Bitwise identical to a fresh build
/// of the larger dimension with the same policy. Throws std::logic_error
/// after breakdown or when dec.m + steps exceeds dec.m_max.
KrylovDecomposition extend_krylov(const KrylovDecomposition& dec, const SparseOperator& a,
                                  std::size_t steps);

/// Debug dump of T, tau, gamma and diagnostics as `key,i,j,re,im` rows.
void write_decomposition_csv(std::ostream& out, const KrylovDecomposition& dec);

}  // namespace kexp

#pragma once

#include <memory>
#include <optional>
#include <string>

#include "kexp/expm.hpp"
#include "kexp/krylov.hpp"
#include "kexp/sparse.hpp"

namespace kexp {

enum class ApproximantKind { standard, corrected };

std::string to_string(ApproximantKind kind);

struct DefectSample {
  double t = 0.0;
  /// (exp(sigma t T_m))_{m,1}
  Complex delta;
  /// d/dt delta
  Complex delta_prime;
  /// ||exp(sigma t T_m) e_1||_2, the scale for round-off decisions.
  double column_norm = 0.0;
};

struct EffectiveOrder {
  double rho = 0.0;
  /// False when |delta| sits at the round-off floor; rho is then meaningless.
  bool reliable = false;
};

/// Relative threshold on |delta| / ||exp(sigma t T) e_1|| below which the
/// effective order is reported as unreliable.
inline constexpr double kDefectRoundoffFloor = 1e3 * 2.220446049250313e-16;

/// Standard  V_m phi_p(sigma t T_m) e_1, or corrected
/// [V_m | v_{m+1}] phi_p(sigma t Tbar_m) e_1 with Tbar_m = [T_m 0; tau e_m^* 0].
///
/// Holds references to the decomposition and operator; both must outlive
/// the approximant. Copies share the lazily computed A v_{m+1} cache.
class Approximant {
 public:
  Approximant(const KrylovDecomposition& dec, const LinearOperator& op,
              ApproximantKind kind = ApproximantKind::standard, int p = 0);

  /// Krylov approximation of phi_p(sigma t A) v.
  CVector apply(double t) const;
  /// The small coefficient vector combined with the basis in apply().
  CVector coefficients(double t) const;
  /// phi_q(sigma t T_m) e_1, reusing the eigendecomposition of T_m when
  /// it is real symmetric tridiagonal.
  CVector phi_e1(double t, int q) const;

  /// Defect scalar of the exponential approximation. Requires m >= 2.
  DefectSample defect(double t) const;
  /// rho(t) = t |delta|' / |delta| = t Re(delta' / delta).
  EffectiveOrder effective_order(double t) const;

  /// ||A v_{m+1}||_2; the first call costs one matvec. Throws after breakdown.
  double norm_av_next() const;
  /// <v_{m+1}, A v_{m+1}>, from the same cached product.
  Complex v_next_dot_av_next() const;
  /// 1 once A v_{m+1} has been formed, 0 otherwise.
  std::size_t extra_matvecs() const;

  const KrylovDecomposition& decomposition() const { return *dec_; }
  const LinearOperator& op() const { return *op_; }
  const Prefactor& sigma() const { return op_->sigma; }
  ApproximantKind kind() const { return kind_; }
  int p() const { return p_; }
  std::size_t m() const { return dec_->m; }

 private:
  struct Cache;

  const KrylovDecomposition* dec_;
  const LinearOperator* op_;
  ApproximantKind kind_;
  int p_;
  std::shared_ptr<const SymTridFunctions> symtrid_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace kexp

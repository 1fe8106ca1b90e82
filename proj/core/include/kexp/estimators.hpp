#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "kexp/approximant.hpp"
#include "kexp/krylov.hpp"

namespace kexp {

enum class EstimatorKind {
  era,
  era_phi,
  era_corrected,
  err1,
  err1_phi,
  err1_corrected,
  hermite_quad,
  improved_hermite_quad,
  trapezoid_quad,
  effective_order_quad,
  expokit_first_step,
};

/// CamelCase names as used in CSV headers ("Era", "HermiteQuad", ...).
std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(const std::string& text);

struct ErrorEstimate {
  EstimatorKind kind = EstimatorKind::era;
  double value = 0.0;
  bool is_proven_upper_bound = false;
  std::size_t extra_matvecs = 0;
  /// False only for the effective-order estimate when its guard rejects t.
  bool available = true;
};

/// sigma A Hermitian (A flagged Hermitian, sigma real) and flagged nonexpansive.
bool hermitian_nonexpansive(const LinearOperator& op);

/// log(tau gamma t^m / (m+p)!), -inf when the value is zero.
double log_era(const KrylovDecomposition& dec, double t, int p);

/// tau gamma t^m / (m+p)!. Proven bound iff the operator is flagged nonexpansive.
ErrorEstimate era(const KrylovDecomposition& dec, double t, int p, bool nonexpansive);
ErrorEstimate era(const Approximant& appr, double t);

/// ||A v_{m+1}|| tau gamma t^{m+1} / (m+p+1)!.
ErrorEstimate era_corrected(const KrylovDecomposition& dec, double norm_av_next, double t, int p,
                            bool nonexpansive);
/// Forms A v_{m+1} on first use (one extra matvec).
ErrorEstimate era_corrected(const Approximant& appr, double t);

/// standard:  tau t |e_m^* phi_{p+1}(sigma t T) e_1|
/// corrected: ||A v_{m+1}|| tau t^2 |e_m^* phi_{p+2}(sigma t T) e_1|
ErrorEstimate err1(const Approximant& appr, double t, bool corrected);

// Defect quadratures for the exponential (p = 0).
ErrorEstimate hermite_quad(const Approximant& appr, double t);
ErrorEstimate improved_hermite_quad(const Approximant& appr, double t);
/// tau t/2 |delta(t)|. Proven only for Hermitian nonexpansive operators and
/// t with t max(0, -sigma tr(T)/m) <= m-2, which forces rho >= 1 on (0, t].
ErrorEstimate trapezoid_quad(const Approximant& appr, double t);
/// tau t/(rho+1) |delta|. Available only if rho(t) is above the round-off
/// floor, and rho lies in [1, m-1] and is nonincreasing over those of the
/// probes t/4, t/2, t that are above the floor.
ErrorEstimate effective_order_quad(const Approximant& appr, double t);

/// Hermite, improved Hermite, trapezoid and effective order, in that order.
std::vector<ErrorEstimate> quad_estimates(const Approximant& appr, double t);

/// Dispatch by kind. ExpokitFirstStep is a step size, not an estimate, and
/// is rejected here.
ErrorEstimate estimate(const Approximant& appr, EstimatorKind kind, double t);

/// First step size of the classic Expokit controller:
///   (1/h) (tol ((m+1)/e)^{m+1} sqrt(2 pi (m+1)) / (4 h))^{1/m},  h = ||H||_inf.
double expokit_first_step(double norm_inf, std::size_t m, double tol);

}  // namespace kexp

#include "kexp/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace kexp {

namespace {

constexpr std::array<std::pair<EstimatorKind, const char*>, 11> kNames{{
    {EstimatorKind::era, "Era"},
    {EstimatorKind::era_phi, "EraPhi"},
    {EstimatorKind::era_corrected, "EraCorrected"},
    {EstimatorKind::err1, "Err1"},
    {EstimatorKind::err1_phi, "Err1Phi"},
    {EstimatorKind::err1_corrected, "Err1Corrected"},
    {EstimatorKind::hermite_quad, "HermiteQuad"},
    {EstimatorKind::improved_hermite_quad, "ImprovedHermiteQuad"},
    {EstimatorKind::trapezoid_quad, "TrapezoidQuad"},
    {EstimatorKind::effective_order_quad, "EffectiveOrderQuad"},
    {EstimatorKind::expokit_first_step, "ExpokitFirstStep"},
}};

void check_t(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("estimator: t must be finite and >= 0");
}

void check_exponential(const Approximant& appr, const char* who) {
  if (appr.p() != 0) throw std::invalid_argument(std::string(who) + ": defect quadrature needs p = 0");
}

double tau(const Approximant& appr) { return appr.decomposition().tau_next; }

}  // namespace

std::string to_string(EstimatorKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "Era";
}

EstimatorKind parse_estimator_kind(const std::string& text) {
  for (const auto& [k, name] : kNames)
    if (text == name) return k;
  throw std::invalid_argument("unknown estimator '" + text + "'");
}

bool hermitian_nonexpansive(const LinearOperator& op) {
  return op.nonexpansive && op.matrix.structure() == Structure::hermitian && op.sigma.is_real();
}

namespace {

// For real sigma and Hermitian T, |delta(s)| = c s^{m-1} int exp(-s y) M(y) dy
// with M the B-spline on the nodes -sigma theta_i, so rho(s) = m-1 - s E_s[y]
// and E_s[y] decreases in s from its B-spline mean -sigma tr(T)/m. Hence
// t max(0, -sigma tr(T)/m) <= m-2 gives rho >= 1 on (0, t], which is what
// bounds the defect integral by the trapezoid value.
bool trapezoid_chain_holds(const Approximant& appr, double t) {
  const KrylovDecomposition& dec = appr.decomposition();
  if (dec.m < 2) return false;
  double trace = 0.0;
  for (std::size_t i = 0; i < dec.m; ++i) trace += dec.t(i, i).real();
  const double m = static_cast<double>(dec.m);
  const double mean = -appr.sigma().value().real() * trace / m;
  return t * std::max(0.0, mean) <= m - 2.0;
}

}  // namespace

double log_era(const KrylovDecomposition& dec, double t, int p) {
  check_t(t);
  if (p < 0) throw std::invalid_argument("era: p must be >= 0");
  const double lt = dec.log_tau_gamma();
  if (t == 0.0 || std::isinf(lt)) return -std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(dec.m);
  return lt + m * std::log(t) - std::lgamma(m + p + 1.0);
}

ErrorEstimate era(const KrylovDecomposition& dec, double t, int p, bool nonexpansive) {
  ErrorEstimate e;
  e.kind = p == 0 ? EstimatorKind::era : EstimatorKind::era_phi;
  e.value = std::exp(log_era(dec, t, p));
  e.is_proven_upper_bound = nonexpansive;
  return e;
}

ErrorEstimate era(const Approximant& appr, double t) {
  return era(appr.decomposition(), t, appr.p(), appr.op().nonexpansive);
}

ErrorEstimate era_corrected(const KrylovDecomposition& dec, double norm_av_next, double t, int p,
                            bool nonexpansive) {
  ErrorEstimate e;
  e.kind = EstimatorKind::era_corrected;
  e.is_proven_upper_bound = nonexpansive;
  e.extra_matvecs = 1;
  const double base = log_era(dec, t, p);
  if (std::isinf(base) || norm_av_next == 0.0) return e;
  // t^{m+1}/(m+p+1)! = t^m/(m+p)! * t/(m+p+1)
  const double m = static_cast<double>(dec.m);
  e.value = std::exp(base + std::log(norm_av_next) + std::log(t) - std::log(m + p + 1.0));
  return e;
}

ErrorEstimate era_corrected(const Approximant& appr, double t) {
  const KrylovDecomposition& dec = appr.decomposition();
  if (dec.breakdown) {
    ErrorEstimate e;
    e.kind = EstimatorKind::era_corrected;
    e.is_proven_upper_bound = appr.op().nonexpansive;
    return e;
  }
  return era_corrected(dec, appr.norm_av_next(), t, appr.p(), appr.op().nonexpansive);
}

ErrorEstimate err1(const Approximant& appr, double t, bool corrected) {
  check_t(t);
  ErrorEstimate e;
  const int p = appr.p();
  if (corrected) {
    e.kind = EstimatorKind::err1_corrected;
    e.extra_matvecs = 1;
  } else {
    e.kind = p == 0 ? EstimatorKind::err1 : EstimatorKind::err1_phi;
    e.is_proven_upper_bound = hermitian_nonexpansive(appr.op());
  }
  if (t == 0.0 || tau(appr) == 0.0) return e;
  const double corner = std::abs(appr.phi_e1(t, p + (corrected ? 2 : 1)).back());
  e.value = tau(appr) * t * corner;
  if (corrected) e.value *= appr.norm_av_next() * t;
  return e;
}

ErrorEstimate hermite_quad(const Approximant& appr, double t) {
  check_t(t);
  check_exponential(appr, "hermite_quad");
  ErrorEstimate e;
  e.kind = EstimatorKind::hermite_quad;
  if (t == 0.0 || tau(appr) == 0.0) return e;
  const double m = static_cast<double>(appr.m());
  e.value = tau(appr) * (t / m) * std::abs(appr.defect(t).delta);
  return e;
}

ErrorEstimate improved_hermite_quad(const Approximant& appr, double t) {
  check_t(t);
  check_exponential(appr, "improved_hermite_quad");
  ErrorEstimate e;
  e.kind = EstimatorKind::improved_hermite_quad;
  e.extra_matvecs = 1;
  if (t == 0.0 || tau(appr) == 0.0) return e;
  const DefectSample s = appr.defect(t);
  const double m = static_cast<double>(appr.m());
  const Complex sigma = appr.sigma().value();
  // (2t/(m+1)) D - (t^2/(m(m+1))) D^[2] with D = sigma tau delta v_{m+1} and
  // D^[2] = D' - sigma A D collapses to sigma tau (a v_{m+1} + b A v_{m+1}).
  const Complex a = 2.0 * t * s.delta / (m + 1.0) - t * t * s.delta_prime / (m * (m + 1.0));
  const Complex b = sigma * t * t * s.delta / (m * (m + 1.0));
  const double nav = appr.norm_av_next();
  const Complex vav = appr.v_next_dot_av_next();
  const double sq = std::norm(a) + std::norm(b) * nav * nav + 2.0 * (std::conj(a) * b * vav).real();
  e.value = tau(appr) * std::sqrt(std::max(sq, 0.0));
  return e;
}

ErrorEstimate trapezoid_quad(const Approximant& appr, double t) {
  check_t(t);
  check_exponential(appr, "trapezoid_quad");
  ErrorEstimate e;
  e.kind = EstimatorKind::trapezoid_quad;
  e.is_proven_upper_bound = hermitian_nonexpansive(appr.op()) && trapezoid_chain_holds(appr, t);
  if (t == 0.0 || tau(appr) == 0.0) return e;
  e.value = tau(appr) * 0.5 * t * std::abs(appr.defect(t).delta);
  return e;
}

ErrorEstimate effective_order_quad(const Approximant& appr, double t) {
  check_t(t);
  check_exponential(appr, "effective_order_quad");
  ErrorEstimate e;
  e.kind = EstimatorKind::effective_order_quad;
  if (t == 0.0 || tau(appr) == 0.0) return e;
  const double m = static_cast<double>(appr.m());
  constexpr double slack = 1e-6;
  double previous = std::numeric_limits<double>::infinity();
  double rho = 0.0;
  for (double fraction : {0.25, 0.5, 1.0}) {
    const EffectiveOrder r = appr.effective_order(fraction * t);
    // Probes drowned in round-off carry no information; t itself must be clean.
    if (!r.reliable) {
      if (fraction == 1.0) {
        e.available = false;
        return e;
      }
      continue;
    }
    if (r.rho < 1.0 - slack || r.rho > m - 1.0 + slack || r.rho > previous + slack) {
      e.available = false;
      return e;
    }
    previous = r.rho;
    rho = r.rho;
  }
  e.value = tau(appr) * t / (rho + 1.0) * std::abs(appr.defect(t).delta);
  return e;
}

std::vector<ErrorEstimate> quad_estimates(const Approximant& appr, double t) {
  return {hermite_quad(appr, t), improved_hermite_quad(appr, t), trapezoid_quad(appr, t),
          effective_order_quad(appr, t)};
}

ErrorEstimate estimate(const Approximant& appr, EstimatorKind kind, double t) {
  switch (kind) {
    case EstimatorKind::era:
    case EstimatorKind::era_phi: return era(appr, t);
    case EstimatorKind::era_corrected: return era_corrected(appr, t);
    case EstimatorKind::err1:
    case EstimatorKind::err1_phi: return err1(appr, t, false);
    case EstimatorKind::err1_corrected: return err1(appr, t, true);
    case EstimatorKind::hermite_quad: return hermite_quad(appr, t);
    case EstimatorKind::improved_hermite_quad: return improved_hermite_quad(appr, t);
    case EstimatorKind::trapezoid_quad: return trapezoid_quad(appr, t);
    case EstimatorKind::effective_order_quad: return effective_order_quad(appr, t);
    case EstimatorKind::expokit_first_step: break;
  }
  throw std::invalid_argument("estimate: ExpokitFirstStep is a step-size rule, not an error estimate");
}

double expokit_first_step(double norm_inf, std::size_t m, double tol) {
  if (!(norm_inf > 0.0)) throw std::invalid_argument("expokit_first_step: ||H||_inf must be positive");
  if (m < 1) throw std::invalid_argument("expokit_first_step: m must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("expokit_first_step: tol must be positive");
  const double mp1 = static_cast<double>(m) + 1.0;
  const double log_h = std::log(norm_inf);
  const double inner = std::log(tol) + mp1 * (std::log(mp1) - 1.0) +
                       0.5 * std::log(2.0 * std::numbers::pi * mp1) - std::log(4.0) - log_h;
  return std::exp(-log_h + inner / static_cast<double>(m));
}

}  // namespace kexp

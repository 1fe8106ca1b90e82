#include "kexp/approximant.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace kexp {

std::string to_string(ApproximantKind kind) {
  return kind == ApproximantKind::standard ? "standard" : "corrected";
}

struct Approximant::Cache {
  std::once_flag once;
  double norm_av = 0.0;
  Complex v_dot_av;
  std::atomic<bool> formed{false};
};

Approximant::Approximant(const KrylovDecomposition& dec, const LinearOperator& op,
                         ApproximantKind kind, int p)
    : dec_(&dec), op_(&op), kind_(kind), p_(p), cache_(std::make_shared<Cache>()) {
  if (p < 0) throw std::invalid_argument("Approximant: p must be >= 0");
  if (dec.m == 0) throw std::invalid_argument("Approximant: empty decomposition");
  if (dec.n != op.dimension()) throw std::invalid_argument("Approximant: dimension mismatch");
  if (kind == ApproximantKind::corrected && dec.breakdown) {
    throw std::invalid_argument("Approximant: corrected kind needs v_{m+1}, absent after breakdown");
  }
  if (dec.m > 1 && dec.t.is_real_symmetric_tridiagonal()) {
    symtrid_ = std::make_shared<const SymTridFunctions>(dec.t);
  }
}

CVector Approximant::phi_e1(double t, int q) const {
  const Complex z = op_->sigma.value() * t;
  if (symtrid_) return symtrid_->phi_e1(z, q);
  return phi_dense(dec_->t, z, q);
}

CVector Approximant::coefficients(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("Approximant: t must be finite and >= 0");
  CVector c = phi_e1(t, p_);
  if (kind_ == ApproximantKind::corrected) {
    // Last entry of phi_p(z Tbar) e_1 is tau z e_m^* phi_{p+1}(z T) e_1.
    const Complex z = op_->sigma.value() * t;
    const CVector next = phi_e1(t, p_ + 1);
    c.push_back(dec_->tau_next * z * next.back());
  }
  return c;
}

CVector Approximant::apply(double t) const { return dec_->combine(coefficients(t)); }

DefectSample Approximant::defect(double t) const {
  if (dec_->m < 2) throw std::invalid_argument("defect: needs Krylov dimension m >= 2");
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("defect: t must be finite and >= 0");
  const std::size_t m = dec_->m;
  const CVector u = phi_e1(t, 0);
  DefectSample s;
  s.t = t;
  s.delta = u[m - 1];
  s.delta_prime = op_->sigma.value() * (dec_->t(m - 1, m - 1) * u[m - 1] + dec_->t(m - 1, m - 2) * u[m - 2]);
  s.column_norm = norm2(u);
  return s;
}

EffectiveOrder Approximant::effective_order(double t) const {
  const DefectSample s = defect(t);
  EffectiveOrder out;
  const double mag = std::abs(s.delta);
  out.reliable = t > 0.0 && mag >= kDefectRoundoffFloor * s.column_norm && mag > 0.0;
  if (mag > 0.0) out.rho = t * (s.delta_prime / s.delta).real();
  return out;
}

double Approximant::norm_av_next() const {
  if (dec_->breakdown) throw std::logic_error("norm_av_next: no v_{m+1} after breakdown");
  std::call_once(cache_->once, [this] {
    const auto v = dec_->v_next();
    const CVector av = op_->matrix.matvec(v);
    cache_->norm_av = norm2(av);
    cache_->v_dot_av = dot(v, av);
    cache_->formed = true;
  });
  return cache_->norm_av;
}

Complex Approximant::v_next_dot_av_next() const {
  norm_av_next();
  return cache_->v_dot_av;
}

std::size_t Approximant::extra_matvecs() const {
  if (dec_->breakdown) return 0;
  return cache_->formed.load() ? 1 : 0;
}

}  // namespace kexp

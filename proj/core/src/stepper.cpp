#include "kexp/stepper.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kexp {

namespace {

constexpr double kIterationRelTol = 1e-3;
constexpr double kInf = std::numeric_limits<double>::infinity();

double target_for(double dt, double tol, ErrorModel model) {
  return model == ErrorModel::per_unit_step ? dt * tol : tol;
}

}  // namespace

std::string to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::direct_era_global: return "direct_era_global";
    case ControllerKind::direct_era_local: return "direct_era_local";
    case ControllerKind::direct_era_corrected: return "direct_era_corrected";
    case ControllerKind::heuristic: return "heuristic";
    case ControllerKind::heuristic_iterated: return "heuristic_iterated";
    case ControllerKind::expokit_first_step_only: return "expokit_first_step_only";
  }
  return "direct_era_local";
}

std::string to_string(ErrorModel model) {
  return model == ErrorModel::global_budget ? "global_budget" : "per_unit_step";
}

ControllerKind parse_controller_kind(const std::string& text) {
  for (ControllerKind k : {ControllerKind::direct_era_global, ControllerKind::direct_era_local,
                           ControllerKind::direct_era_corrected, ControllerKind::heuristic,
                           ControllerKind::heuristic_iterated, ControllerKind::expokit_first_step_only}) {
    if (to_string(k) == text) return k;
  }
  throw std::invalid_argument("unknown controller '" + text + "'");
}

ErrorModel parse_error_model(const std::string& text) {
  if (text == "global_budget") return ErrorModel::global_budget;
  if (text == "per_unit_step") return ErrorModel::per_unit_step;
  throw std::invalid_argument("unknown error model '" + text + "'");
}

double ControllerSpec::safety_value() const {
  if (safety) return *safety;
  return kind == ControllerKind::heuristic || kind == ControllerKind::heuristic_iterated ? 0.9 : 1.0;
}

void ControllerSpec::validate() const {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw std::invalid_argument("controller: tol must be positive");
  if (iteration_cap < 1) throw std::invalid_argument("controller: iteration_cap must be >= 1");
  const double s = safety_value();
  if (!(s > 0.0 && s <= 1.0)) throw std::invalid_argument("controller: safety must lie in (0, 1]");
  if (max_steps < 1) throw std::invalid_argument("controller: max_steps must be >= 1");
}

double step_size_direct(const KrylovDecomposition& dec, double tol, ErrorModel model, int p) {
  if (!(tol > 0.0)) throw std::invalid_argument("step_size_direct: tol must be positive");
  const double lt = dec.log_tau_gamma();
  if (std::isinf(lt)) return kInf;
  const double m = static_cast<double>(dec.m);
  const double log_num = std::log(tol) + std::lgamma(m + p + 1.0) - lt;
  if (model == ErrorModel::global_budget) return std::exp(log_num / m);
  // Per unit step with m = 1: Era/dt does not depend on dt.
  if (dec.m == 1) return log_num >= 0.0 ? kInf : 0.0;
  return std::exp(log_num / (m - 1.0));
}

double step_size_direct_corrected(const KrylovDecomposition& dec, double norm_av_next, double tol,
                                  ErrorModel model, int p) {
  if (!(tol > 0.0)) throw std::invalid_argument("step_size_direct_corrected: tol must be positive");
  const double lt = dec.log_tau_gamma();
  if (std::isinf(lt) || norm_av_next == 0.0) return kInf;
  const double m = static_cast<double>(dec.m);
  const double log_num = std::log(tol) + std::lgamma(m + p + 2.0) - lt - std::log(norm_av_next);
  return std::exp(log_num / (model == ErrorModel::global_budget ? m + 1.0 : m));
}

double step_size_heuristic(double prev_dt, double prev_estimate, double tol, std::size_t m,
                           ErrorModel model, double safety) {
  if (!(prev_estimate > 0.0)) throw std::invalid_argument("step_size_heuristic: previous estimate must be positive");
  if (!(prev_dt > 0.0)) throw std::invalid_argument("step_size_heuristic: previous step must be positive");
  if (m < 1) throw std::invalid_argument("step_size_heuristic: m must be >= 1");
  const double target = target_for(prev_dt, tol, model);
  return safety * prev_dt * std::pow(target / prev_estimate, 1.0 / static_cast<double>(m));
}

ErrorEstimate controller_estimate(const Approximant& appr, EstimatorKind estimator, double dt) {
  ErrorEstimate e = estimate(appr, estimator, dt);
  if (!e.available) {
    ErrorEstimate fallback = trapezoid_quad(appr, dt);
    fallback.kind = e.kind;
    return fallback;
  }
  return e;
}

IteratedStep step_size_iterated(const Approximant& appr, double tol, EstimatorKind estimator, int cap,
                                ErrorModel model, double safety, std::optional<double> start) {
  if (cap < 1) throw std::invalid_argument("step_size_iterated: cap must be >= 1");
  IteratedStep out;
  const double direct = step_size_direct(appr.decomposition(), tol, model);
  if (!std::isfinite(direct) || direct <= 0.0) {
    out.dt = direct;
    out.converged = true;
    return out;
  }
  const double inv_m = 1.0 / static_cast<double>(appr.m());
  double x = (start && std::isfinite(*start) && *start > 0.0) ? *start : direct;
  int direction = 0;
  for (int l = 0; l < cap; ++l) {
    const double e = controller_estimate(appr, estimator, x).value;
    if (!(e > 0.0) || !std::isfinite(e)) {
      out.dt = safety * direct;
      out.iterations = l;
      out.converged = false;
      return out;
    }
    const double next = x * std::pow(target_for(x, tol, model) / e, inv_m);
    const double change = std::abs(next - x) / x;
    const int dir = next > x ? 1 : (next < x ? -1 : 0);
    if (direction != 0 && dir != 0 && dir != direction) out.monotone = false;
    if (dir != 0) direction = dir;
    x = next;
    out.iterations = l + 1;
    if (change <= kIterationRelTol) {
      out.converged = true;
      break;
    }
  }
  out.dt = safety * x;
  return out;
}

bool estimator_needs_extra_matvec(EstimatorKind estimator) {
  return estimator == EstimatorKind::era_corrected || estimator == EstimatorKind::err1_corrected ||
         estimator == EstimatorKind::improved_hermite_quad;
}

ApproximantKind approximant_kind_for(EstimatorKind estimator) {
  return estimator == EstimatorKind::era_corrected || estimator == EstimatorKind::err1_corrected
             ? ApproximantKind::corrected
             : ApproximantKind::standard;
}

namespace {

PropagationResult run(const LinearOperator& op, std::span<const Complex> v, std::optional<double> t_final,
                      std::optional<std::size_t> steps, const KrylovConfig& cfg, const ControllerSpec& ctrl,
                      EstimatorKind estimator) {
  ctrl.validate();
  cfg.validate();
  if (v.size() != op.dimension()) throw std::invalid_argument("propagate: starting vector has wrong length");
  if (std::abs(norm2(v) - 1.0) > 1e-12) throw std::invalid_argument("propagate: starting vector must have unit norm");
  if (estimator == EstimatorKind::expokit_first_step) {
    throw std::invalid_argument("propagate: ExpokitFirstStep is a controller, not an estimator");
  }
  if (estimator == EstimatorKind::era_phi || estimator == EstimatorKind::err1_phi) {
    throw std::invalid_argument("propagate: phi-function estimators do not apply to the exponential");
  }

  const double safety = ctrl.safety_value();
  const ApproximantKind kind = ctrl.kind == ControllerKind::direct_era_corrected
                                   ? ApproximantKind::corrected
                                   : approximant_kind_for(estimator);
  const double norm_inf = ctrl.kind == ControllerKind::expokit_first_step_only ? op.matrix.norm_inf() : 0.0;

  PropagationResult res;
  res.w_final.assign(v.begin(), v.end());
  double t = 0.0;
  double prev_dt = 0.0;
  // Unscaled iterate of the previous substep; seeds the next iteration.
  std::optional<double> prev_iterate;
  double prev_est = 0.0;

  for (std::size_t j = 0;; ++j) {
    double remaining = kInf;
    if (t_final) {
      remaining = *t_final - t;
      if (remaining <= 0.0) break;
    } else if (j == *steps) {
      break;
    }
    if (j >= ctrl.max_steps) throw ConvergenceError("propagate: exceeded max_steps substeps");

    CVector& w = res.w_final;
    const double beta = norm2(w);
    StepRecord rec;
    rec.j = j;
    rec.t_start = t;
    rec.input_norm = beta;
    if (beta == 0.0) {
      // The zero vector stays put; finish in one exact step.
      if (!t_final) throw ConvergenceError("propagate: zero vector with free-floating time");
      rec.dt = remaining;
      res.records.push_back(rec);
      t = *t_final;
      break;
    }
    CVector u = w;
    scale(1.0 / beta, u);
    const double tol_eff = ctrl.tol / beta;

    KrylovBuilder builder(op.matrix, u, cfg);
    bool finishing = false;
    const double log_target = t_final ? std::log(target_for(remaining, tol_eff, ctrl.error_model)) : 0.0;
    while (builder.can_step()) {
      builder.step();
      if (ctrl.early_stop && t_final && log_era(builder.decomposition(), remaining, 0) <= log_target) {
        finishing = true;
        break;
      }
    }
    const KrylovDecomposition dec = builder.release();
    // After breakdown there is nothing to correct: the standard approximation is exact.
    const Approximant appr(dec, op, dec.breakdown ? ApproximantKind::standard : kind);

    double dt = 0.0;
    if (dec.breakdown) {
      if (!t_final) throw ConvergenceError("propagate: lucky breakdown leaves the step size unbounded");
      dt = remaining;
    } else if (finishing) {
      dt = remaining;
    } else {
      switch (ctrl.kind) {
        case ControllerKind::direct_era_global:
          dt = safety * step_size_direct(dec, tol_eff, ErrorModel::global_budget);
          break;
        case ControllerKind::direct_era_local:
          dt = safety * step_size_direct(dec, tol_eff, ErrorModel::per_unit_step);
          break;
        case ControllerKind::direct_era_corrected:
          dt = safety * step_size_direct_corrected(dec, appr.norm_av_next(), tol_eff, ctrl.error_model);
          break;
        case ControllerKind::heuristic:
          if (j == 0 || !(prev_est > 0.0)) {
            dt = step_size_direct(dec, tol_eff, ctrl.error_model);
          } else {
            dt = step_size_heuristic(prev_dt, prev_est, tol_eff, dec.m, ctrl.error_model, safety);
          }
          break;
        case ControllerKind::heuristic_iterated: {
          const IteratedStep it = step_size_iterated(appr, tol_eff, estimator, ctrl.iteration_cap,
                                                     ctrl.error_model, safety, prev_iterate);
          dt = it.dt;
          prev_iterate = it.dt / safety;
          rec.controller_iterations = it.iterations;
          break;
        }
        case ControllerKind::expokit_first_step_only:
          dt = safety * expokit_first_step(norm_inf, dec.m, tol_eff);
          break;
      }
    }
    if (t_final && dt >= remaining) dt = remaining;
    if (!(dt > 0.0) || !std::isfinite(dt) || (t_final && dt < 1e-14 * *t_final)) {
      throw ConvergenceError("propagate: step size underflow (controller stagnation) at t = " + std::to_string(t));
    }

    // Early stops and breakdowns may leave m = 1, where only Era is defined.
    ErrorEstimate est = (finishing || dec.breakdown || dec.m < 2)
                            ? era(dec, dt, 0, op.nonexpansive)
                            : controller_estimate(appr, estimator, dt);
    w = appr.apply(dt);
    scale(beta, w);
    est.value *= beta;

    rec.dt = dt;
    rec.m_used = dec.m;
    rec.estimate = est;
    rec.matvecs = dec.matvecs + appr.extra_matvecs();
    res.records.push_back(rec);
    res.accumulated_bound += est.value;
    res.total_matvecs += rec.matvecs;

    prev_dt = dt;
    prev_est = est.value / beta;
    t = (t_final && dt == remaining) ? *t_final : t + dt;
  }
  res.total_t = t;
  return res;
}

}  // namespace

PropagationResult propagate(const LinearOperator& op, std::span<const Complex> v, double t_final,
                            const KrylovConfig& cfg, const ControllerSpec& ctrl, EstimatorKind estimator) {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("propagate: t_final must be positive");
  return run(op, v, t_final, std::nullopt, cfg, ctrl, estimator);
}

PropagationResult propagate_steps(const LinearOperator& op, std::span<const Complex> v, std::size_t steps,
                                  const KrylovConfig& cfg, const ControllerSpec& ctrl,
                                  EstimatorKind estimator) {
  if (steps == 0) throw std::invalid_argument("propagate_steps: need at least one substep");
  return run(op, v, std::nullopt, steps, cfg, ctrl, estimator);
}

EarlyStop early_stop_dimension(const LinearOperator& op, std::span<const Complex> v, double t, double tol,
                               std::size_t m_max, int p) {
  if (m_max < 1) throw std::invalid_argument("early_stop_dimension: m_max must be >= 1");
  if (!(t > 0.0)) throw std::invalid_argument("early_stop_dimension: t must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("early_stop_dimension: tol must be positive");
  KrylovBuilder builder(op.matrix, v, KrylovConfig::with_defaults(m_max));
  const double log_target = std::isinf(tol) ? kInf : std::log(tol * t);
  EarlyStop out;
  while (builder.can_step()) {
    builder.step();
    if (log_era(builder.decomposition(), t, p) <= log_target) {
      out.tolerance_met = true;
      break;
    }
  }
  out.dec = builder.release();
  if (out.dec.breakdown) out.tolerance_met = true;
  return out;
}

}  // namespace kexp

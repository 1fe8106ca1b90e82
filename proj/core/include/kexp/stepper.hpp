#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kexp/approximant.hpp"
#include "kexp/estimators.hpp"
#include "kexp/krylov.hpp"

namespace kexp {

enum class ControllerKind {
  direct_era_global,
  direct_era_local,
  direct_era_corrected,
  heuristic,
  heuristic_iterated,
  expokit_first_step_only,
};

/// global_budget: each substep error <= tol.
/// per_unit_step: each substep error <= tol * dt, so the total is <= tol * t.
enum class ErrorModel { global_budget, per_unit_step };

std::string to_string(ControllerKind kind);
std::string to_string(ErrorModel model);
ControllerKind parse_controller_kind(const std::string& text);
ErrorModel parse_error_model(const std::string& text);

struct ControllerSpec {
  ControllerKind kind = ControllerKind::direct_era_local;
  double tol = 1e-8;
  ErrorModel error_model = ErrorModel::per_unit_step;
  int iteration_cap = 5;
  /// Defaults to 1.0 for the proven-bound rules and 0.9 for the heuristics.
  std::optional<double> safety;
  /// Stop growing the Krylov space once Era for the remaining time span
  /// already meets the tolerance; the substep then finishes the run.
  bool early_stop = false;
  std::size_t max_steps = 1'000'000;

  double safety_value() const;
  void validate() const;
};

struct StepRecord {
  std::size_t j = 0;
  double t_start = 0.0;
  double dt = 0.0;
  std::size_t m_used = 0;
  /// Scaled by the norm of the substep's input vector.
  ErrorEstimate estimate;
  std::size_t matvecs = 0;
  int controller_iterations = 0;
  double input_norm = 1.0;
};

struct PropagationResult {
  CVector w_final;
  std::vector<StepRecord> records;
  double accumulated_bound = 0.0;
  std::size_t total_matvecs = 0;
  double total_t = 0.0;
};

/// Step from inverting Era (p = 0: (tol m!/(tau gamma))^{1/m} for the global
/// model, exponent 1/(m-1) for the per-unit-step model). +inf after breakdown.
double step_size_direct(const KrylovDecomposition& dec, double tol, ErrorModel model, int p = 0);

/// Inverts the corrected bound: (tol (m+1)!/(||Av_{m+1}|| tau gamma))^{1/m}
/// per unit step, exponent 1/(m+1) for the global model.
double step_size_direct_corrected(const KrylovDecomposition& dec, double norm_av_next, double tol,
                                  ErrorModel model, int p = 0);

/// safety * prev_dt * (target / prev_estimate)^{1/m}, target = tol (global)
/// or prev_dt * tol (per unit step).
double step_size_heuristic(double prev_dt, double prev_estimate, double tol, std::size_t m,
                           ErrorModel model, double safety = 1.0);

struct IteratedStep {
  double dt = 0.0;
  /// Fixed-point updates performed.
  int iterations = 0;
  /// Relative change of the last update <= 1e-3.
  bool converged = false;
  bool monotone = true;
};

/// Fixed-point refinement of dt such that the estimate matches the target,
/// starting from `start` if given (typically the previous substep's
/// iterate), else from the direct Era step. The safety factor is applied
/// to the final iterate only.
IteratedStep step_size_iterated(const Approximant& appr, double tol, EstimatorKind estimator, int cap,
                                ErrorModel model = ErrorModel::per_unit_step, double safety = 1.0,
                                std::optional<double> start = std::nullopt);

/// Evaluates the estimator used by the controllers; an unavailable
/// effective-order estimate falls back to the trapezoid rule.
ErrorEstimate controller_estimate(const Approximant& appr, EstimatorKind estimator, double dt);

/// Restarted propagation of exp(sigma t A) v to t_final. The last substep
/// is clipped to land on t_final exactly and is re-estimated.
PropagationResult propagate(const LinearOperator& op, std::span<const Complex> v, double t_final,
                            const KrylovConfig& cfg, const ControllerSpec& ctrl, EstimatorKind estimator);

/// Fixed number of substeps with free-floating total time.
PropagationResult propagate_steps(const LinearOperator& op, std::span<const Complex> v, std::size_t steps,
                                  const KrylovConfig& cfg, const ControllerSpec& ctrl,
                                  EstimatorKind estimator);

struct EarlyStop {
  KrylovDecomposition dec;
  bool tolerance_met = false;
};

/// Smallest m <= m_max with Era(m, t, p) <= tol * t, found while building.
EarlyStop early_stop_dimension(const LinearOperator& op, std::span<const Complex> v, double t, double tol,
                               std::size_t m_max, int p = 0);

/// Estimators that form A v_{m+1} cost one matvec on top of the m-step build.
bool estimator_needs_extra_matvec(EstimatorKind estimator);

/// Approximation kind that matches an estimator (corrected for the
/// corrected bounds, standard otherwise).
ApproximantKind approximant_kind_for(EstimatorKind estimator);

}  // namespace kexp

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kexp_cli/config.hpp"

namespace kexp::cli {

enum ExitCode : int { kOk = 0, kViolation = 1, kConfigError = 2, kRuntimeError = 3 };

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;
};

/// Runs f(0..count-1) on up to `threads` workers. Rethrows the first
/// exception after all workers have stopped.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f);

/// Shortest round-trip decimal text; empty for NaN.
std::string format_double(double x);

/// Independent reference for phi_p(sigma t A) v: the sine-basis expansion
/// for the Laplacian chains, the series oracle otherwise.
CVector reference_solution(const Config& cfg, const LinearOperator& op, std::span<const Complex> v, double t);

struct SweepRow {
  double t = 0.0;
  double oracle_error = 0.0;
  /// Era-family, Err1-family, then the four quadratures (p = 0 standard only).
  std::vector<ErrorEstimate> estimates;
  std::optional<double> rho;
};

struct SweepTable {
  std::size_t m = 0;
  std::vector<SweepRow> rows;
};

std::vector<SweepTable> run_sweep(const Config& cfg, const LinearOperator& op, std::span<const Complex> v,
                                  unsigned threads);

struct BenchRow {
  std::string controller;
  EstimatorKind estimator = EstimatorKind::era;
  std::size_t m = 0;
  std::size_t krylov_dimension = 0;
  double tol = 0.0;
  PropagationResult result;
  double oracle_error = 0.0;
  /// Every recorded substep estimate was a proven bound.
  bool proven = false;
};

std::vector<BenchRow> run_bench(const Config& cfg, const LinearOperator& op, std::span<const Complex> v,
                                unsigned threads);

/// Matplotlib script that overlays every wide sweep CSV on log-log axes.
std::string plot_script(const std::vector<std::filesystem::path>& csv_files);

int cmd_build(const Config& cfg, const RunOptions& opts, std::ostream& log);
int cmd_sweep(const Config& cfg, const RunOptions& opts, std::ostream& log);
int cmd_bench(const Config& cfg, const RunOptions& opts, std::ostream& log);

}  // namespace kexp::cli

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <kexp/approximant.hpp>
#include <kexp/estimators.hpp>
#include <kexp/krylov.hpp>
#include <kexp/problems.hpp>
#include <kexp/stepper.hpp>

namespace kexp::cli {

/// Anything wrong with the user's configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ControllerRun {
  ControllerSpec spec;
  EstimatorKind estimator = EstimatorKind::era;
  /// Label for the CSV `controller` column; defaults to the kind name.
  std::string label;
};

struct BenchConfig {
  std::vector<ControllerRun> controllers;
  /// Exactly one of steps / t_final is set.
  std::optional<std::size_t> steps;
  std::optional<double> t_final;
  /// Spend one Krylov dimension less on estimators that need an extra
  /// matvec, so every variant costs m matvecs per substep.
  bool equal_cost = false;
};

struct Config {
  ProblemSpec problem;
  std::optional<Prefactor> sigma;
  std::optional<bool> nonexpansive;
  std::vector<std::size_t> m;
  int p = 0;
  ApproximantKind approximation = ApproximantKind::standard;
  std::vector<double> t_grid;
  std::vector<EstimatorKind> estimators;
  std::optional<KrylovMode> krylov_mode;
  std::optional<Reorthogonalization> reorthogonalize;
  BenchConfig bench;
  std::filesystem::path output_dir = "out";
};

/// Parses a JSON document. Throws ConfigError with a readable message.
Config parse_config(const std::string& json_text);
Config load_config(const std::filesystem::path& path);

/// `count` points from start to stop, evenly spaced in log t.
std::vector<double> log_spaced(double start, double stop, std::size_t count);

/// Operator with the configured sigma / nonexpansive overrides applied.
LinearOperator make_operator(const Config& cfg);

KrylovConfig krylov_config(const Config& cfg, std::size_t m);

}  // namespace kexp::cli

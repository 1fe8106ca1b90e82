#include "kexp_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include <kexp/lognorm.hpp>

namespace kexp::cli {

using nlohmann::json;

namespace {

template <class F>
auto wrap(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

const json* find(const json& j, const char* key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double positive(const json& j, const char* what) {
  const double x = j.get<double>();
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + " must be positive and finite");
  return x;
}

ControllerRun parse_controller(const json& j) {
  if (!j.is_object()) throw ConfigError("bench.controllers entries must be objects");
  ControllerRun run;
  run.spec.kind = parse_controller_kind(j.at("kind").get<std::string>());
  if (const json* e = find(j, "estimator")) {
    run.estimator = parse_estimator_kind(e->get<std::string>());
  } else if (run.spec.kind == ControllerKind::direct_era_corrected) {
    run.estimator = EstimatorKind::era_corrected;
  }
  if (const json* x = find(j, "tol")) run.spec.tol = positive(*x, "tol");
  if (const json* x = find(j, "error_model")) run.spec.error_model = parse_error_model(x->get<std::string>());
  if (const json* x = find(j, "iteration_cap")) run.spec.iteration_cap = x->get<int>();
  if (const json* x = find(j, "safety")) run.spec.safety = x->get<double>();
  if (const json* x = find(j, "early_stop")) run.spec.early_stop = x->get<bool>();
  run.label = j.value("label", to_string(run.spec.kind));
  run.spec.validate();
  return run;
}

}  // namespace

std::vector<double> log_spaced(double start, double stop, std::size_t count) {
  if (count == 0) return {};
  if (!(start > 0.0) || !(stop > 0.0)) throw ConfigError("t grid bounds must be positive");
  if (count == 1) return {start};
  std::vector<double> out(count);
  const double a = std::log(start), b = std::log(stop);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  out.front() = start;
  out.back() = stop;
  return out;
}

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  return wrap("config", [&] {
    Config cfg;
    cfg.problem.kind = parse_problem_kind(j.at("problem").get<std::string>());
    if (const json* params = find(j, "params")) {
      if (const json* x = find(*params, "n")) cfg.problem.n = x->get<std::size_t>();
      if (const json* x = find(*params, "omega")) cfg.problem.omega = x->get<double>();
      if (const json* x = find(*params, "U")) cfg.problem.hubbard_u = x->get<double>();
      if (const json* x = find(*params, "mu1")) cfg.problem.mu1 = x->get<double>();
      if (const json* x = find(*params, "mu2")) cfg.problem.mu2 = x->get<double>();
    }
    if (const json* x = find(j, "seed")) cfg.problem.seed = x->get<std::uint64_t>();
    cfg.problem.validate();
    if (const json* x = find(j, "sigma")) cfg.sigma = parse_prefactor(x->get<std::string>());
    if (const json* x = find(j, "nonexpansive")) cfg.nonexpansive = x->get<bool>();

    if (const json* x = find(j, "m")) {
      if (x->is_array()) {
        cfg.m = x->get<std::vector<std::size_t>>();
      } else {
        cfg.m = {x->get<std::size_t>()};
      }
    } else {
      cfg.m = {10};
    }
    for (std::size_t m : cfg.m)
      if (m < 1) throw ConfigError("m must be >= 1");
    if (const json* x = find(j, "p")) cfg.p = x->get<int>();
    if (cfg.p < 0) throw ConfigError("p must be >= 0");
    if (const json* x = find(j, "approximation")) {
      const auto s = x->get<std::string>();
      if (s == "standard") {
        cfg.approximation = ApproximantKind::standard;
      } else if (s == "corrected") {
        cfg.approximation = ApproximantKind::corrected;
      } else {
        throw ConfigError("approximation must be 'standard' or 'corrected'");
      }
    }

    if (const json* x = find(j, "t")) {
      cfg.t_grid = x->get<std::vector<double>>();
    } else if (const json* g = find(j, "t_grid")) {
      cfg.t_grid = log_spaced(g->at("start").get<double>(), g->at("stop").get<double>(),
                              g->at("count").get<std::size_t>());
    }
    for (double t : cfg.t_grid)
      if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("t grid values must be positive");

    if (const json* x = find(j, "estimators")) {
      for (const auto& e : *x) cfg.estimators.push_back(parse_estimator_kind(e.get<std::string>()));
    }
    if (const json* k = find(j, "krylov")) {
      if (const json* x = find(*k, "mode")) cfg.krylov_mode = parse_krylov_mode(x->get<std::string>());
      if (const json* x = find(*k, "reorthogonalize")) {
        cfg.reorthogonalize = parse_reorthogonalization(x->get<std::string>());
      }
    }

    if (const json* b = find(j, "bench")) {
      const double tol = b->contains("tol") ? positive(b->at("tol"), "bench.tol") : 1e-8;
      if (const json* cs = find(*b, "controllers")) {
        for (const auto& c : *cs) {
          ControllerRun run = parse_controller(c);
          if (!c.contains("tol")) run.spec.tol = tol;
          cfg.bench.controllers.push_back(run);
        }
      }
      if (const json* x = find(*b, "steps")) {
        const auto steps = x->get<long long>();
        if (steps < 1) throw ConfigError("bench.steps must be >= 1");
        cfg.bench.steps = static_cast<std::size_t>(steps);
      }
      if (const json* x = find(*b, "t_final")) cfg.bench.t_final = positive(*x, "bench.t_final");
      if (cfg.bench.steps && cfg.bench.t_final) throw ConfigError("bench: give either steps or t_final, not both");
      cfg.bench.equal_cost = b->value("equal_cost", false);
    }
    if (const json* x = find(j, "output_dir")) cfg.output_dir = x->get<std::string>();
    return cfg;
  });
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

LinearOperator make_operator(const Config& cfg) {
  LinearOperator op = build_problem(cfg.problem);
  if (cfg.sigma && !(*cfg.sigma == op.sigma)) {
    op.sigma = *cfg.sigma;
    // The problem's own flag no longer applies; fall back to an estimate of
    // the logarithmic norm unless the user asserts it explicitly.
    const LogNormEstimate mu = log_norm_estimate(op.matrix, op.sigma);
    op.nonexpansive = mu.converged && mu.upper() <= 1e-10 * std::max(1.0, op.matrix.norm1());
  }
  if (cfg.nonexpansive) op.nonexpansive = *cfg.nonexpansive;
  return op;
}

KrylovConfig krylov_config(const Config& cfg, std::size_t m) {
  KrylovConfig k = KrylovConfig::with_defaults(m, cfg.krylov_mode.value_or(KrylovMode::automatic));
  if (cfg.reorthogonalize) k.reorthogonalize = *cfg.reorthogonalize;
  return k;
}

}  // namespace kexp::cli

#include "kexp_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include <kexp/matrix_market.hpp>
#include <kexp/oracle.hpp>

namespace kexp::cli {

namespace fs = std::filesystem;

namespace {

// Oracle error above which a proven bound counts as violated.
bool exceeds(double oracle_error, double bound) { return oracle_error > bound * (1.0 + 1e-9) + 1e-13; }

fs::path output_dir(const Config& cfg, const RunOptions& opts) {
  fs::path dir = opts.out_dir.value_or(cfg.output_dir);
  fs::create_directories(dir);
  return dir;
}

CVector start_vector(const Config& cfg, const RunOptions& opts) {
  return starting_vector(cfg.problem, opts.seed.value_or(cfg.problem.seed));
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string stem(const Config& cfg) { return to_string(cfg.problem.kind); }

/// The fixed wide-CSV estimator slots for a given approximation.
std::vector<EstimatorKind> wide_estimators(const Config& cfg) {
  if (cfg.approximation == ApproximantKind::corrected) {
    return {EstimatorKind::era_corrected, EstimatorKind::err1_corrected};
  }
  if (cfg.p > 0) return {EstimatorKind::era_phi, EstimatorKind::err1_phi};
  return {EstimatorKind::era,          EstimatorKind::err1,           EstimatorKind::hermite_quad,
          EstimatorKind::improved_hermite_quad, EstimatorKind::trapezoid_quad, EstimatorKind::effective_order_quad};
}

bool estimator_applies(const Config& cfg, EstimatorKind k, std::size_t m) {
  switch (k) {
    case EstimatorKind::era:
    case EstimatorKind::err1: return cfg.p == 0 && cfg.approximation == ApproximantKind::standard;
    case EstimatorKind::era_phi:
    case EstimatorKind::err1_phi: return cfg.approximation == ApproximantKind::standard;
    case EstimatorKind::era_corrected:
    case EstimatorKind::err1_corrected: return cfg.approximation == ApproximantKind::corrected;
    case EstimatorKind::hermite_quad:
    case EstimatorKind::improved_hermite_quad:
    case EstimatorKind::trapezoid_quad:
    case EstimatorKind::effective_order_quad:
      return cfg.p == 0 && cfg.approximation == ApproximantKind::standard && m >= 2;
    case EstimatorKind::expokit_first_step: return false;
  }
  return false;
}

ErrorEstimate evaluate(const Approximant& appr, EstimatorKind k, double t) {
  // Era/Err1 of the phi family are the same formulas with p > 0.
  return estimate(appr, k, t);
}

}  // namespace

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

CVector reference_solution(const Config& cfg, const LinearOperator& op, std::span<const Complex> v, double t) {
  const bool chain = cfg.problem.kind == ProblemKind::schrodinger_free || cfg.problem.kind == ProblemKind::heat;
  if (chain) return oracle_laplacian(op.sigma, t, v, cfg.p);
  return oracle_phi(op.matrix, op.sigma, t, v, cfg.p);
}

std::vector<SweepTable> run_sweep(const Config& cfg, const LinearOperator& op, std::span<const Complex> v,
                                  unsigned threads) {
  if (cfg.t_grid.empty()) throw ConfigError("sweep: empty t grid");
  if (cfg.m.empty()) throw ConfigError("sweep: empty m list");
  const std::size_t nt = cfg.t_grid.size();

  std::vector<CVector> refs(nt);
  parallel_for(nt, threads, [&](std::size_t i) { refs[i] = reference_solution(cfg, op, v, cfg.t_grid[i]); });

  std::vector<KrylovDecomposition> decs(cfg.m.size());
  parallel_for(cfg.m.size(), threads, [&](std::size_t k) { decs[k] = build_krylov(op.matrix, v, krylov_config(cfg, cfg.m[k])); });

  std::vector<SweepTable> tables(cfg.m.size());
  const std::vector<EstimatorKind> slots = wide_estimators(cfg);
  for (std::size_t k = 0; k < cfg.m.size(); ++k) {
    const Approximant appr(decs[k], op, cfg.approximation, cfg.p);
    // Form A v_{m+1} up front so the shared cache is populated before the pool.
    if (!decs[k].breakdown) appr.norm_av_next();
    SweepTable& table = tables[k];
    table.m = cfg.m[k];
    table.rows.resize(nt);
    parallel_for(nt, threads, [&](std::size_t i) {
      const double t = cfg.t_grid[i];
      SweepRow& row = table.rows[i];
      row.t = t;
      row.oracle_error = distance(appr.apply(t), refs[i]);
      for (EstimatorKind e : slots) {
        if (estimator_applies(cfg, e, decs[k].m)) {
          row.estimates.push_back(evaluate(appr, e, t));
        } else {
          ErrorEstimate missing;
          missing.kind = e;
          missing.available = false;
          row.estimates.push_back(missing);
        }
      }
      if (decs[k].m >= 2) {
        const EffectiveOrder r = appr.effective_order(t);
        if (r.reliable) row.rho = r.rho;
      }
    });
  }
  return tables;
}

std::vector<BenchRow> run_bench(const Config& cfg, const LinearOperator& op, std::span<const Complex> v,
                                unsigned threads) {
  const BenchConfig& b = cfg.bench;
  if (b.controllers.empty()) throw ConfigError("bench: no controllers configured");
  if (!b.steps && !b.t_final) throw ConfigError("bench: set either steps or t_final");
  if (cfg.m.empty()) throw ConfigError("bench: empty m list");

  std::vector<BenchRow> rows(cfg.m.size() * b.controllers.size());
  parallel_for(rows.size(), threads, [&](std::size_t idx) {
    const std::size_t mi = idx / b.controllers.size();
    const ControllerRun& run = b.controllers[idx % b.controllers.size()];
    const std::size_t m = cfg.m[mi];
    const bool extra = estimator_needs_extra_matvec(run.estimator) ||
                       run.spec.kind == ControllerKind::direct_era_corrected;
    const std::size_t dim = (b.equal_cost && extra) ? m - 1 : m;
    if (dim < 1) throw ConfigError("bench: Krylov dimension must stay >= 1");

    BenchRow& row = rows[idx];
    row.controller = run.label;
    row.estimator = run.estimator;
    row.m = m;
    row.krylov_dimension = dim;
    row.tol = run.spec.tol;
    const KrylovConfig kc = krylov_config(cfg, dim);
    row.result = b.steps ? propagate_steps(op, v, *b.steps, kc, run.spec, run.estimator)
                         : propagate(op, v, *b.t_final, kc, run.spec, run.estimator);
    Config exp_cfg = cfg;
    exp_cfg.p = 0;
    row.oracle_error = distance(reference_solution(exp_cfg, op, v, row.result.total_t), row.result.w_final);
    row.proven = std::all_of(row.result.records.begin(), row.result.records.end(),
                             [](const StepRecord& r) { return r.estimate.is_proven_upper_bound; });
  });
  return rows;
}

std::string plot_script(const std::vector<fs::path>& csv_files) {
  std::ostringstream s;
  s << "#!/usr/bin/env python3\n"
       "# Generated by `kexp sweep`: log-log overlays of oracle error and estimates.\n"
       "import csv\nimport math\nimport sys\n\nimport matplotlib\nmatplotlib.use('Agg')\n"
       "import matplotlib.pyplot as plt\n\nFILES = [\n";
  for (const auto& f : csv_files) s << "    " << std::quoted(f.filename().string()) << ",\n";
  s << "]\n\n"
       "STYLE = {'oracle_error': 'ko', 'Era': 'b+-', 'Err1': 'rx', 'HermiteQuad': 'g^',\n"
       "         'ImprovedHermiteQuad': 'gv', 'TrapezoidQuad': 'ms', 'EffectiveOrderQuad': 'cd'}\n\n"
       "def load(path):\n"
       "    with open(path) as fh:\n"
       "        rows = list(csv.DictReader(fh))\n"
       "    cols = {}\n"
       "    for row in rows:\n"
       "        for k, v in row.items():\n"
       "            cols.setdefault(k, []).append(float(v) if v else math.nan)\n"
       "    return cols\n\n"
       "def main(directory='.'):\n"
       "    for name in FILES:\n"
       "        cols = load(f'{directory}/{name}')\n"
       "        fig, ax = plt.subplots(figsize=(6, 4.5))\n"
       "        for key, style in STYLE.items():\n"
       "            if key not in cols:\n"
       "                continue\n"
       "            pts = [(t, y) for t, y in zip(cols['t'], cols[key]) if y > 0]\n"
       "            if pts:\n"
       "                ax.loglog(*zip(*pts), style, label=key, markersize=4)\n"
       "        ax.set_xlabel('t')\n"
       "        ax.set_ylabel('error')\n"
       "        ax.set_title(name)\n"
       "        ax.legend(fontsize=7)\n"
       "        fig.tight_layout()\n"
       "        fig.savefig(f\"{directory}/{name.replace('.csv', '.png')}\", dpi=150)\n"
       "        plt.close(fig)\n\n"
       "if __name__ == '__main__':\n"
       "    main(sys.argv[1] if len(sys.argv) > 1 else '.')\n";
  return s.str();
}

int cmd_build(const Config& cfg, const RunOptions& opts, std::ostream& log) {
  const LinearOperator op = make_operator(cfg);
  const fs::path dir = output_dir(cfg, opts);
  const fs::path mtx = dir / (stem(cfg) + ".mtx");
  const fs::path meta = dir / (stem(cfg) + ".json");
  write_matrix_market(mtx, op.matrix);
  nlohmann::ordered_json j;
  j["problem"] = stem(cfg);
  j["n"] = op.dimension();
  j["nnz"] = op.matrix.nnz();
  j["symmetry"] = to_string(op.matrix.structure());
  j["sigma"] = to_string(op.sigma);
  j["nonexpansive"] = op.nonexpansive;
  j["params"] = {{"n", cfg.problem.n},
                 {"omega", cfg.problem.omega},
                 {"U", cfg.problem.hubbard_u},
                 {"mu1", cfg.problem.mu1},
                 {"mu2", cfg.problem.mu2},
                 {"seed", opts.seed.value_or(cfg.problem.seed)}};
  auto out = open_out(meta);
  out << j.dump(2) << '\n';
  log << "wrote " << mtx.string() << " (n=" << op.dimension() << ", nnz=" << op.matrix.nnz() << ")\n";
  return kOk;
}

int cmd_sweep(const Config& cfg, const RunOptions& opts, std::ostream& log) {
  if (cfg.t_grid.empty()) throw ConfigError("sweep: empty t grid");
  const LinearOperator op = make_operator(cfg);
  const CVector v = start_vector(cfg, opts);
  const std::vector<SweepTable> tables = run_sweep(cfg, op, v, opts.threads);
  const fs::path dir = output_dir(cfg, opts);

  std::vector<fs::path> wide_files;
  std::size_t violations = 0;
  const fs::path long_path = dir / ("estimators_" + stem(cfg) + ".csv");
  auto long_csv = open_out(long_path);
  long_csv << "problem,m,sigma,p,t,estimator,value,extra_matvecs,oracle_error\n";
  const std::string sigma = to_string(op.sigma);

  for (const SweepTable& table : tables) {
    const fs::path wide_path = dir / ("sweep_" + stem(cfg) + "_m" + std::to_string(table.m) + ".csv");
    wide_files.push_back(wide_path);
    auto wide = open_out(wide_path);
    wide << "t,oracle_error,Era,Err1,HermiteQuad,ImprovedHermiteQuad,TrapezoidQuad,EffectiveOrderQuad,rho\n";
    for (const SweepRow& row : table.rows) {
      wide << format_double(row.t) << ',' << format_double(row.oracle_error);
      for (std::size_t slot = 0; slot < 6; ++slot) {
        wide << ',';
        if (slot < row.estimates.size() && row.estimates[slot].available) wide << format_double(row.estimates[slot].value);
      }
      wide << ',' << (row.rho ? format_double(*row.rho) : "") << '\n';

      for (const ErrorEstimate& e : row.estimates) {
        if (!e.available) continue;
        if (!cfg.estimators.empty() &&
            std::find(cfg.estimators.begin(), cfg.estimators.end(), e.kind) == cfg.estimators.end()) {
          continue;
        }
        long_csv << stem(cfg) << ',' << table.m << ',' << sigma << ',' << cfg.p << ',' << format_double(row.t) << ','
                 << to_string(e.kind) << ',' << format_double(e.value) << ',' << e.extra_matvecs << ','
                 << format_double(row.oracle_error) << '\n';
        if (e.is_proven_upper_bound && exceeds(row.oracle_error, e.value)) {
          ++violations;
          log << "violation: m=" << table.m << " t=" << format_double(row.t) << ' ' << to_string(e.kind) << '='
              << format_double(e.value) << " < oracle error " << format_double(row.oracle_error) << '\n';
        }
      }
    }
  }
  const fs::path script = dir / "plot_sweep.py";
  open_out(script) << plot_script(wide_files);
  log << "wrote " << wide_files.size() << " sweep tables, " << long_path.string() << " and " << script.string()
      << '\n';
  return violations == 0 ? kOk : kViolation;
}

int cmd_bench(const Config& cfg, const RunOptions& opts, std::ostream& log) {
  const LinearOperator op = make_operator(cfg);
  const CVector v = start_vector(cfg, opts);
  const std::vector<BenchRow> rows = run_bench(cfg, op, v, opts.threads);
  const fs::path dir = output_dir(cfg, opts);

  const fs::path path = dir / ("bench_" + stem(cfg) + ".csv");
  const fs::path steps_path = dir / ("bench_" + stem(cfg) + "_steps.csv");
  auto out = open_out(path);
  auto steps = open_out(steps_path);
  out << "controller,estimator,m,tol,N,total_t,total_matvecs,accumulated_bound,oracle_error_per_unit_t\n";
  steps << "controller,estimator,m,j,t_start,dt,m_used,estimate,matvecs,controller_iterations\n";
  std::size_t violations = 0;
  for (const BenchRow& r : rows) {
    const PropagationResult& res = r.result;
    out << r.controller << ',' << to_string(r.estimator) << ',' << r.m << ',' << format_double(r.tol) << ','
        << res.records.size() << ',' << format_double(res.total_t) << ',' << res.total_matvecs << ','
        << format_double(res.accumulated_bound) << ',' << format_double(r.oracle_error / res.total_t) << '\n';
    for (const StepRecord& s : res.records) {
      steps << r.controller << ',' << to_string(r.estimator) << ',' << r.m << ',' << s.j << ','
            << format_double(s.t_start) << ',' << format_double(s.dt) << ',' << s.m_used << ','
            << format_double(s.estimate.value) << ',' << s.matvecs << ',' << s.controller_iterations << '\n';
    }
    if (r.proven && exceeds(r.oracle_error, res.accumulated_bound)) {
      ++violations;
      log << "violation: " << r.controller << '/' << to_string(r.estimator) << " m=" << r.m
          << " oracle error " << format_double(r.oracle_error) << " > accumulated bound "
          << format_double(res.accumulated_bound) << '\n';
    }
  }
  log << "wrote " << path.string() << " (" << rows.size() << " runs)\n";
  return violations == 0 ? kOk : kViolation;
}

}  // namespace kexp::cli

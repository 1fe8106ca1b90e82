#include <benchmark/benchmark.h>

#include <kexp/approximant.hpp>
#include <kexp/expm.hpp>
#include <kexp/krylov.hpp>
#include <kexp/problems.hpp>
#include <kexp/stepper.hpp>

namespace {

const kexp::LinearOperator& hubbard() {
  static const kexp::LinearOperator op = kexp::build_hubbard(0.123);
  return op;
}

void BM_HubbardMatvec(benchmark::State& state) {
  const auto& op = hubbard();
  const kexp::CVector x = kexp::random_unit_vector(op.dimension(), 7);
  kexp::CVector y(x.size());
  for (auto _ : state) {
    op.matrix.matvec(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(op.matrix.nnz()));
}
BENCHMARK(BM_HubbardMatvec);

void BM_KrylovBuild(benchmark::State& state) {
  const auto& op = hubbard();
  const kexp::CVector v = kexp::random_unit_vector(op.dimension(), 1);
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto mode = state.range(1) ? kexp::KrylovMode::lanczos : kexp::KrylovMode::arnoldi;
  const kexp::KrylovConfig cfg = kexp::KrylovConfig::with_defaults(m, mode);
  for (auto _ : state) benchmark::DoNotOptimize(kexp::build_krylov(op.matrix, v, cfg));
}
BENCHMARK(BM_KrylovBuild)->ArgsProduct({{10, 30}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ExpmDense(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  kexp::DenseMatrix t(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    t(i, i) = -2.0;
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = 1.0;
  }
  for (auto _ : state) benchmark::DoNotOptimize(kexp::expm_dense(t, kexp::Complex(0.0, -3.0)));
}
BENCHMARK(BM_ExpmDense)->Arg(10)->Arg(30)->Arg(80);

void BM_PropagateEra(benchmark::State& state) {
  const auto& op = hubbard();
  const kexp::CVector v = kexp::random_unit_vector(op.dimension(), 1);
  const kexp::KrylovConfig cfg = kexp::KrylovConfig::with_defaults(10, kexp::KrylovMode::automatic);
  kexp::ControllerSpec ctrl;
  ctrl.kind = kexp::ControllerKind::direct_era_local;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kexp::propagate_steps(op, v, 10, cfg, ctrl, kexp::EstimatorKind::era));
  }
}
BENCHMARK(BM_PropagateEra)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

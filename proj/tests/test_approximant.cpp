#include <gtest/gtest.h>

#include <kexp/approximant.hpp>
#include <kexp/estimators.hpp>
#include <kexp/oracle.hpp>
#include <kexp/problems.hpp>

#include "support.hpp"

namespace kexp {
namespace {

using test::EMatrix;
using test::EVector;

struct Built {
  LinearOperator op;
  CVector v;
  KrylovDecomposition dec;

  Built(LinearOperator o, std::size_t m, std::uint64_t seed = 1,
        Reorthogonalization r = Reorthogonalization::full)
      : op(std::move(o)), v(random_unit_vector(op.dimension(), seed)) {
    KrylovConfig cfg = KrylovConfig::with_defaults(m);
    cfg.reorthogonalize = r;
    dec = build_krylov(op.matrix, v, cfg);
  }
};

/// -H with sigma = 1: a Hermitian, nonexpansive operator in the sigma = 1 convention.
LinearOperator negative_laplacian(std::size_t n) {
  LinearOperator h = build_schrodinger(n);
  auto trip = h.matrix.to_triplets();
  for (auto& t : trip) t.value = -t.value;
  return {SparseOperator::from_triplets(n, trip, Structure::hermitian), Prefactor::one(), true};
}

TEST(Approximant, AtZeroReturnsV) {
  Built s(build_schrodinger(50), 8);
  const Approximant a(s.dec, s.op);
  EXPECT_LT(distance(a.apply(0.0), s.v), 1e-15);
  EXPECT_THROW(a.apply(-1.0), std::invalid_argument);
}

TEST(Approximant, ScaledIdentityIsExact) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < 6; ++i) t.push_back({i, i, 0.7});
  const LinearOperator op{SparseOperator::from_triplets(6, t, Structure::hermitian), Prefactor::minus_i(), true};
  const CVector v = random_unit_vector(6, 2);
  const auto dec = build_krylov(op.matrix, v, KrylovConfig::with_defaults(4));
  const Approximant a(dec, op);
  for (double time : {0.1, 1.0, 50.0}) {
    CVector expected = v;
    scale(std::exp(Complex(0.0, -0.7 * time)), expected);
    EXPECT_LT(distance(a.apply(time), expected), 1e-14);
  }
  EXPECT_THROW(Approximant(dec, op, ApproximantKind::corrected), std::invalid_argument);
}

TEST(Approximant, SmallLaplacianWithinEra) {
  Built s(build_schrodinger(6), 3);
  const Approximant a(s.dec, s.op);
  const double t = 0.2;
  const EVector ref = test::series_exp(test::to_eigen(s.op.matrix), Complex(0.0, -t), test::to_eigen(s.v));
  const double err = (test::to_eigen(a.apply(t)) - ref).norm();
  const double bound = era(a, t).value;
  EXPECT_LE(err, bound * (1 + 1e-9) + 1e-15);
  EXPECT_GT(err, 0.5 * bound);  // sharp in the asymptotic regime
}

TEST(Approximant, PhiAndCorrectedMatchDenseReference) {
  Built s(build_convection_diffusion(3, 0.9, 1.1), 6);
  const EMatrix a = test::to_eigen(s.op.matrix);
  const double t = 0.004;
  for (int p : {0, 1, 2}) {
    for (ApproximantKind kind : {ApproximantKind::standard, ApproximantKind::corrected}) {
      const Approximant appr(s.dec, s.op, kind, p);
      // Reference: the same projection evaluated with Eigen's dense exponential.
      const std::size_t m = s.dec.m;
      const std::size_t k = kind == ApproximantKind::corrected ? m + 1 : m;
      EMatrix tb = EMatrix::Zero(k + p, k + p);
      tb.topLeftCorner(m, m) = test::to_eigen(s.dec.t) * t;
      if (kind == ApproximantKind::corrected) tb(m, m - 1) = s.dec.tau_next * t;
      if (p > 0) {
        tb(0, k) = 1.0;
        for (int i = 1; i < p; ++i) tb(k + i - 1, k + i) = 1.0;
      }
      const EMatrix e = tb.exp();
      const EVector c = p == 0 ? EVector(e.col(0).head(k)) : EVector(e.col(k + p - 1).head(k));
      const EVector ref = test::basis_matrix(s.dec, k) * c;
      EXPECT_LT((test::to_eigen(appr.apply(t)) - ref).norm(), 1e-13) << "p=" << p;
      // phi_p applied to the exact operator, for a sanity check of the whole pipeline.
      const EVector exact = test::series_phi(a, t, test::to_eigen(s.v), p);
      EXPECT_LT((test::to_eigen(appr.apply(t)) - exact).norm(), 1e-3);
    }
  }
}

TEST(Defect, ZeroAtTimeZero) {
  Built s(build_hubbard(0.123), 10);
  const Approximant a(s.dec, s.op);
  EXPECT_EQ(std::abs(a.defect(0.0).delta), 0.0);
}

TEST(Defect, PositiveForHermitianSigmaOne) {
  const LinearOperator op = negative_laplacian(100);
  const CVector v = random_unit_vector(100, 3);
  const auto dec = build_krylov(op.matrix, v, KrylovConfig::with_defaults(10));
  const Approximant a(dec, op);
  for (double t : test::logspace(1e-2, 1e3, 12)) {
    const Complex d = a.defect(t).delta;
    EXPECT_GT(d.real(), 0.0) << t;
    EXPECT_EQ(d.imag(), 0.0);
  }
}

TEST(Defect, TwoByTwoClosedForm) {
  Built s(build_schrodinger(30), 2);
  const Approximant a(s.dec, s.op);
  const double p = s.dec.t(0, 0).real(), b = s.dec.t(1, 0).real(), c = s.dec.t(1, 1).real();
  const Complex sigma(0.0, -1.0);
  for (double t : {0.3, 2.0, 7.0}) {
    // exp(z [[p,b],[b,c]])_{21} = b z e^{z(p+c)/2} sinh(z d)/(z d), d = sqrt(((p-c)/2)^2 + b^2)
    const Complex z = sigma * t;
    const double d = std::sqrt(0.25 * (p - c) * (p - c) + b * b);
    const Complex expected = b * std::exp(z * (p + c) / 2.0) * std::sinh(z * d) / d;
    EXPECT_LT(std::abs(a.defect(t).delta - expected), 1e-14);
  }
}

TEST(Defect, DerivativeMatchesFiniteDifference) {
  Built s(build_convection_diffusion(4, 0.9, 1.1), 8);
  const Approximant a(s.dec, s.op);
  const double t = 1e-3, h = 1e-7;
  const DefectSample d = a.defect(t);
  const Complex fd = (a.defect(t + h).delta - a.defect(t - h).delta) / (2 * h);
  EXPECT_LT(std::abs(d.delta_prime - fd), 1e-6 * std::abs(fd));
}

TEST(Defect, RequiresTwoDimensions) {
  Built s(build_schrodinger(30), 1);
  const Approximant a(s.dec, s.op);
  EXPECT_THROW(a.defect(1.0), std::invalid_argument);
}

TEST(EffectiveOrder, SmallTimeLimitIsMMinusOne) {
  for (std::size_t m : {2u, 3u, 5u}) {
    Built s(build_hubbard(0.123), m);
    const Approximant a(s.dec, s.op);
    const EffectiveOrder r = a.effective_order(1e-3);
    ASSERT_TRUE(r.reliable) << m;
    EXPECT_NEAR(r.rho, static_cast<double>(m - 1), 1e-2);
  }
}

TEST(EffectiveOrder, ReferenceValues) {
  {
    Built s(build_hubbard(0.123), 10);
    const EffectiveOrder r = Approximant(s.dec, s.op).effective_order(3.9e-2);
    ASSERT_TRUE(r.reliable);
    EXPECT_NEAR(r.rho, 8.99, 0.05);
  }
  {
    Built s(build_heat(10000), 10);
    const EffectiveOrder r = Approximant(s.dec, s.op).effective_order(1.0);
    ASSERT_TRUE(r.reliable);
    EXPECT_NEAR(r.rho, 8.50, 0.05);
  }
}

TEST(EffectiveOrder, MatchesLogDerivative) {
  Built s(build_convection_diffusion(4, 10.0, 10.0), 6);
  const Approximant a(s.dec, s.op);
  const double t = 2e-3, h = 1e-6;
  const double fd = t * (std::log(std::abs(a.defect(t * (1 + h)).delta)) -
                         std::log(std::abs(a.defect(t * (1 - h)).delta))) / (2 * h * t);
  const EffectiveOrder r = a.effective_order(t);
  ASSERT_TRUE(r.reliable);
  EXPECT_NEAR(r.rho, fd, 1e-5 * std::abs(fd));
}

TEST(EffectiveOrder, RoundoffFloorIsUnreliable) {
  Built s(build_schrodinger(100), 30);
  EXPECT_FALSE(Approximant(s.dec, s.op).effective_order(1e-6).reliable);
}

TEST(Approximant, MassConservationSkewHermitian) {
  for (std::size_t m : {5u, 10u, 20u, 30u}) {
    Built s(build_hubbard(0.123), m, 2, Reorthogonalization::twice);
    const Approximant a(s.dec, s.op);
    for (double t : {0.01, 0.3, 2.0, 20.0}) EXPECT_NEAR(norm2(a.apply(t)), 1.0, 1e-12);
  }
}

TEST(Approximant, ErrorSlopes) {
  // Standard error ~ t^m, corrected ~ t^{m+1} in the asymptotic regime.
  const std::size_t m = 10;
  Built s(build_schrodinger(200), m);
  std::vector<double> ts, es, ec;
  for (double t : test::logspace(1.0, 3.0, 10)) {
    const CVector ref = oracle_laplacian(s.op.sigma, t, s.v);
    ts.push_back(t);
    es.push_back(distance(Approximant(s.dec, s.op).apply(t), ref));
    ec.push_back(distance(Approximant(s.dec, s.op, ApproximantKind::corrected).apply(t), ref));
  }
  EXPECT_NEAR(test::loglog_slope(ts, es), 10.0, 0.25);
  EXPECT_NEAR(test::loglog_slope(ts, ec), 11.0, 0.25);
}

TEST(Approximant, ExtraMatvecCachedOnce) {
  Built s(build_hubbard(0.123), 10);
  const Approximant a(s.dec, s.op, ApproximantKind::corrected);
  EXPECT_EQ(a.extra_matvecs(), 0u);
  const double n1 = a.norm_av_next();
  const Approximant copy = a;
  EXPECT_EQ(copy.norm_av_next(), n1);
  EXPECT_EQ(copy.extra_matvecs(), 1u);
  EXPECT_NEAR(n1, norm2(s.op.matrix.matvec(s.dec.v_next())), 1e-14);
}

}  // namespace
}  // namespace kexp

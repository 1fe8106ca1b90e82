#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

#include <kexp/krylov.hpp>
#include <kexp/oracle.hpp>
#include <kexp/problems.hpp>
#include <kexp/stepper.hpp>

#include "support.hpp"

namespace kexp {
namespace {

using test::EMatrix;
using test::to_eigen;

TEST(Schrodinger, SmallSpectrum) {
  const LinearOperator op = build_schrodinger(3);
  EXPECT_EQ(op.sigma, Prefactor::minus_i());
  EXPECT_EQ(op.matrix.structure(), Structure::hermitian);
  EXPECT_TRUE(op.nonexpansive);
  Eigen::SelfAdjointEigenSolver<EMatrix> es(to_eigen(op.matrix));
  for (int k = 1; k <= 3; ++k) {
    EXPECT_NEAR(es.eigenvalues()[k - 1], 0.25 * (2.0 - 2.0 * std::cos(k * std::numbers::pi / 4.0)), 1e-15);
  }
}

TEST(Schrodinger, LargeNormNearOne) {
  const LinearOperator op = build_schrodinger(10000);
  EXPECT_NEAR(laplacian_eigenvalue(10000, 10000), 1.0, 1e-7);
  // Power iteration lower bound plus the Gershgorin upper bound.
  EXPECT_LE(op.matrix.norm1(), 1.0);
  CVector x(10000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 ? -1.0 : 1.0);
  scale(1.0 / norm2(x), x);
  EXPECT_GT(norm2(op.matrix.matvec(x)), 0.999);
}

TEST(Schrodinger, FirstColumn) {
  const LinearOperator op = build_schrodinger(6);
  CVector e1(6);
  e1[0] = 1.0;
  const CVector y = op.matrix.matvec(e1);
  EXPECT_EQ(y[0], Complex(0.5));
  EXPECT_EQ(y[1], Complex(-0.25));
  for (std::size_t i = 2; i < 6; ++i) EXPECT_EQ(y[i], Complex(0.0));
  EXPECT_EQ(build_schrodinger(3).matrix.nnz(), 7u);
  EXPECT_THROW(build_schrodinger(1), std::invalid_argument);
}

TEST(Heat, NegativeLogNorm) {
  const LinearOperator op = build_heat(50);
  EXPECT_EQ(op.sigma, Prefactor::minus_one());
  EXPECT_TRUE(op.nonexpansive);
  EXPECT_TRUE(op.sigma_hermitian());
  // mu_2(-H) = -lambda_min(H) for Hermitian H.
  Eigen::SelfAdjointEigenSolver<EMatrix> es(-to_eigen(op.matrix));
  EXPECT_LT(es.eigenvalues().maxCoeff(), 0.0);
}

TEST(Heat, PropagationMatchesSineOracle) {
  const LinearOperator op = build_heat(200);
  const CVector v = random_unit_vector(200, 11);
  ControllerSpec c;
  c.kind = ControllerKind::direct_era_local;
  c.tol = 1e-12;
  const auto res = propagate(op, v, 5.0, KrylovConfig::with_defaults(30), c, EstimatorKind::era);
  EXPECT_LE(distance(res.w_final, oracle_laplacian(op.sigma, 5.0, v)), 1e-10);
}

// Independent Hamiltonian: second quantization with Jordan-Wigner signs over
// the 16 bit positions, acting on one occupation state at a time.
struct FermionTerm {
  std::uint32_t state;
  Complex amplitude;
};

std::optional<FermionTerm> hop(std::uint32_t s, int from, int to) {
  if (!(s >> from & 1u) || (from != to && (s >> to & 1u))) return std::nullopt;
  auto below = [](std::uint32_t x, int pos) { return std::popcount(x & ((1u << pos) - 1u)); };
  int sign = below(s, from);
  s &= ~(1u << from);
  sign += below(s, to);
  s |= 1u << to;
  return FermionTerm{s, sign % 2 ? -1.0 : 1.0};
}

std::vector<FermionTerm> brute_force_column(std::uint32_t s, double omega, double u) {
  const Complex forward(-std::cos(omega), std::sin(omega));
  std::vector<FermionTerm> out;
  Complex diag = 0.0;
  for (int j = 0; j < 8; ++j) {
    const double v = (j == 0 || j == 7) ? -1.75 : -2.0;
    for (int spin = 0; spin < 2; ++spin)
      if (hop(s, 8 * spin + j, 8 * spin + j)) diag += v;
    if ((s >> j & 1u) && (s >> (8 + j) & 1u)) diag += u;
  }
  out.push_back({s, diag});
  for (int spin = 0; spin < 2; ++spin) {
    for (int j = 0; j + 1 < 8; ++j) {
      if (auto f = hop(s, 8 * spin + j, 8 * spin + j + 1)) out.push_back({f->state, forward * f->amplitude});
      if (auto b = hop(s, 8 * spin + j + 1, 8 * spin + j)) out.push_back({b->state, std::conj(forward) * b->amplitude});
    }
  }
  return out;
}

const LinearOperator& hubbard() {
  static const LinearOperator op = build_hubbard(0.123);
  return op;
}

TEST(Hubbard, SizeAndStructure) {
  EXPECT_EQ(hubbard().dimension(), 4900u);
  EXPECT_EQ(hubbard().matrix.nnz(), 43980u);
  EXPECT_EQ(hubbard().matrix.structure(), Structure::hermitian);
  EXPECT_EQ(hubbard().sigma, Prefactor::minus_i());
  const auto basis = hubbard_basis();
  EXPECT_TRUE(std::is_sorted(basis.begin(), basis.end()));
  for (auto s : basis) {
    EXPECT_EQ(std::popcount(static_cast<unsigned>(s & 0xFFu)), 4);
    EXPECT_EQ(std::popcount(static_cast<unsigned>(s >> 8)), 4);
  }
}

TEST(Hubbard, SubBlockMatchesBruteForce) {
  const auto basis = hubbard_basis();
  const auto triplets = hubbard().matrix.to_triplets();
  for (std::size_t col = 0; col < basis.size(); col += 490) {
    std::vector<Complex> expected(basis.size());
    for (const auto& term : brute_force_column(basis[col], 0.123, 5.0)) {
      const auto it = std::lower_bound(basis.begin(), basis.end(), term.state);
      ASSERT_TRUE(it != basis.end() && *it == term.state) << "sector leak";
      expected[static_cast<std::size_t>(it - basis.begin())] += term.amplitude;
    }
    std::vector<Complex> actual(basis.size());
    for (const auto& t : triplets)
      if (t.col == col) actual[t.row] += t.value;
    Complex sum_expected = 0.0, sum_actual = 0.0;
    for (std::size_t r = 0; r < basis.size(); ++r) {
      EXPECT_LT(std::abs(actual[r] - expected[r]), 1e-14) << "row " << r << " col " << col;
      sum_expected += expected[r];
      sum_actual += actual[r];
    }
    EXPECT_LT(std::abs(sum_actual - sum_expected), 1e-13);
  }
}

std::pair<double, double> lanczos_extremes(const SparseOperator& a) {
  KrylovConfig cfg = KrylovConfig::with_defaults(200, KrylovMode::lanczos);
  const auto dec = build_krylov(a, random_unit_vector(a.dimension(), 3), cfg);
  Eigen::SelfAdjointEigenSolver<EMatrix> es(to_eigen(dec.t), Eigen::EigenvaluesOnly);
  return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

TEST(Hubbard, SpectralInterval) {
  const auto [lo, hi] = lanczos_extremes(hubbard().matrix);
  EXPECT_GT(lo, -19.1);
  EXPECT_LT(hi, 8.3);
  const auto [lo1, hi1] = lanczos_extremes(build_hubbard(1.0).matrix);
  EXPECT_NEAR(lo1, lo, 1e-8);
  EXPECT_NEAR(hi1, hi, 1e-8);
}

TEST(Hubbard, EvenMomentsIndependentOfOmega) {
  // tr(H^2) is a basis-free spectral invariant.
  auto trace_sq = [](const SparseOperator& a) {
    double s = 0.0;
    for (const Complex& x : a.values()) s += std::norm(x);
    return s;
  };
  EXPECT_NEAR(trace_sq(build_hubbard(1.0).matrix), trace_sq(hubbard().matrix), 1e-8);
}

TEST(ConvectionDiffusion, PureDiffusionIsSymmetric) {
  const LinearOperator op = build_convection_diffusion(4, 0.0, 0.0);
  EXPECT_EQ(op.matrix.structure(), Structure::hermitian);
  EXPECT_EQ(op.matrix.hermitian_defect(), 0.0);
  EXPECT_EQ(op.sigma, Prefactor::one());
  EXPECT_GT(build_convection_diffusion(4, 0.9, 1.1).matrix.hermitian_defect(), 0.0);
  EXPECT_EQ(build_convection_diffusion(15, 0.9, 1.1).dimension(), 3375u);
}

EMatrix tridiag(int n, double lower, double diag, double upper) {
  EMatrix m = EMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = diag;
    if (i > 0) m(i, i - 1) = lower;
    if (i + 1 < n) m(i, i + 1) = upper;
  }
  return m;
}

TEST(ConvectionDiffusion, KroneckerForm) {
  const int n = 4;
  const double mu1 = 0.9, mu2 = 1.1, s = (n + 1) * (n + 1);
  const EMatrix id = EMatrix::Identity(n, n);
  const EMatrix b = s * tridiag(n, 1, -2, 1);
  const EMatrix c1 = s * tridiag(n, 1 + mu1, -2, 1 - mu1);
  const EMatrix c2 = s * tridiag(n, 1 + mu2, -2, 1 - mu2);
  const EMatrix expected = Eigen::kroneckerProduct(id, Eigen::kroneckerProduct(id, c1)).eval() +
                           Eigen::kroneckerProduct(b, Eigen::kroneckerProduct(id, id)).eval() +
                           Eigen::kroneckerProduct(id, Eigen::kroneckerProduct(c2, id)).eval();
  const EMatrix actual = to_eigen(build_convection_diffusion(n, mu1, mu2).matrix);
  // equal up to the rounding of -6 h^-2 versus three -2 h^-2 sums
  EXPECT_LE((actual - expected).cwiseAbs().maxCoeff(), 1e-15 * 6 * s);
}

struct Rectangle {
  double mu1, mu2, re_lo, re_hi, im_max;
};

TEST(ConvectionDiffusion, SpectralRectangles) {
  const int n = 6;
  const double h2 = 1.0 / ((n + 1) * (n + 1));
  for (const Rectangle r : {Rectangle{0.9, 1.1, -9, -3, 1}, Rectangle{10, 10, -8, -4, 39}}) {
    const EMatrix a = h2 * to_eigen(build_convection_diffusion(n, r.mu1, r.mu2).matrix);
    Eigen::ComplexEigenSolver<EMatrix> es(a, false);
    for (const auto& z : es.eigenvalues()) {
      EXPECT_GE(z.real(), r.re_lo - 1e-10) << r.mu1;
      EXPECT_LE(z.real(), r.re_hi + 1e-10) << r.mu1;
      EXPECT_LE(std::abs(z.imag()), r.im_max + 1e-10) << r.mu1;
    }
  }
}

TEST(StartingVector, NormalizedAndSeeded) {
  ProblemSpec spec;
  spec.kind = ProblemKind::schrodinger_free;
  spec.n = 100;
  const CVector a = starting_vector(spec, 7), b = starting_vector(spec, 7), c = starting_vector(spec, 8);
  EXPECT_NEAR(norm2(a), 1.0, 1e-15);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  spec.kind = ProblemKind::convection_diffusion;
  spec.n = 5;
  const CVector ones = starting_vector(spec);
  ASSERT_EQ(ones.size(), 125u);
  for (const Complex& x : ones) EXPECT_NEAR(std::abs(x - 1.0 / std::sqrt(125.0)), 0.0, 1e-16);
}

TEST(ProblemSpec, NamesAndValidation) {
  for (ProblemKind k : {ProblemKind::schrodinger_free, ProblemKind::heat, ProblemKind::hubbard,
                        ProblemKind::convection_diffusion}) {
    EXPECT_EQ(parse_problem_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_problem_kind("lattice"), std::invalid_argument);
  ProblemSpec bad;
  bad.n = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace kexp

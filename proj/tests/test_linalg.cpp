#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <kexp/expm.hpp>
#include <kexp/lognorm.hpp>
#include <kexp/matrix_market.hpp>
#include <kexp/problems.hpp>
#include <kexp/symtrid.hpp>

#include "support.hpp"

namespace kexp {
namespace {

using test::EMatrix;

SparseOperator laplacian(std::size_t n) { return build_schrodinger(n).matrix; }

DenseMatrix random_dense(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(u(rng), u(rng));
  return a;
}

double max_diff(const DenseMatrix& a, const EMatrix& b) { return (test::to_eigen(a) - b).cwiseAbs().maxCoeff(); }

TEST(Matvec, Identity) {
  DenseMatrix id = DenseMatrix::identity(3);
  const auto a = SparseOperator::from_dense(id);
  const CVector y = a.matvec(CVector{1.0, 2.0, 3.0});
  EXPECT_EQ(y, (CVector{1.0, 2.0, 3.0}));
}

TEST(Matvec, LaplacianStencil) {
  const CVector y = laplacian(3).matvec(CVector{1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(y[0].real(), 0.5);
  EXPECT_DOUBLE_EQ(y[1].real(), -0.25);
  EXPECT_DOUBLE_EQ(y[2].real(), 0.0);
}

TEST(Matvec, DimensionMismatchThrows) {
  EXPECT_THROW(laplacian(3).matvec(CVector(4)), std::invalid_argument);
}

TEST(Matvec, BitwiseDeterministic) {
  const auto op = build_hubbard(0.123);
  const CVector x = random_unit_vector(op.dimension(), 3);
  EXPECT_EQ(op.matrix.matvec(x), op.matrix.matvec(x));
}

TEST(SparseOperator, RejectsNonFinite) {
  std::vector<Triplet> t{{0, 0, Complex(std::nan(""), 0.0)}};
  EXPECT_THROW(SparseOperator::from_triplets(1, t), std::invalid_argument);
}

TEST(SparseOperator, HermitianFlagValidated) {
  std::vector<Triplet> t{{0, 1, 1.0}, {1, 0, 2.0}};
  EXPECT_THROW(SparseOperator::from_triplets(2, t, Structure::hermitian), std::invalid_argument);
  std::vector<Triplet> ok{{0, 1, Complex(1.0, 1.0)}, {1, 0, Complex(1.0, -1.0)}};
  EXPECT_NO_THROW(SparseOperator::from_triplets(2, ok, Structure::hermitian));
}

TEST(SparseOperator, AdjointMatchesDense) {
  const auto a = SparseOperator::from_dense(random_dense(6, 5));
  const CVector x = random_unit_vector(6, 1);
  const test::EVector ref = test::to_eigen(a).adjoint() * test::to_eigen(x);
  EXPECT_LT((test::to_eigen(a.adjoint_matvec(x)) - ref).norm(), 1e-14);
}

TEST(Prefactor, RequiresUnitModulus) {
  EXPECT_THROW(Prefactor(Complex(2.0, 0.0)), std::invalid_argument);
  EXPECT_NO_THROW(Prefactor(Complex(std::sqrt(0.5), std::sqrt(0.5))));
  EXPECT_EQ(parse_prefactor("-i"), Prefactor::minus_i());
  EXPECT_EQ(parse_prefactor("-1"), Prefactor::minus_one());
}

TEST(ExpmDense, ZeroIsIdentity) {
  const DenseMatrix e = expm_dense(DenseMatrix::zeros(4, 4), 1.0);
  EXPECT_EQ(max_diff(e, EMatrix::Identity(4, 4)), 0.0);
}

TEST(ExpmDense, Diagonal) {
  DenseMatrix d(2, 2);
  d(0, 0) = 0.3;
  d(1, 1) = -1.7;
  const DenseMatrix e = expm_dense(d, 1.0);
  EXPECT_NEAR(e(0, 0).real(), std::exp(0.3), 1e-15);
  EXPECT_NEAR(e(1, 1).real(), std::exp(-1.7), 1e-15);
  EXPECT_EQ(std::abs(e(0, 1)), 0.0);
}

TEST(ExpmDense, Nilpotent) {
  DenseMatrix n(2, 2);
  n(0, 1) = 1.0;
  const double t = 2.5;
  const DenseMatrix e = expm_dense(n, t);
  EXPECT_NEAR(std::abs(e(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e(0, 1) - t), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(e(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(e(1, 1) - 1.0), 0.0, 1e-15);
}

TEST(ExpmDense, NonSquareThrows) { EXPECT_THROW(expm_dense(DenseMatrix(2, 3), 1.0), std::invalid_argument); }

TEST(ExpmDense, MatchesEigenOnRandomMatrices) {
  for (std::size_t n : {1u, 3u, 7u, 20u}) {
    for (double scale : {1e-3, 0.5, 4.0, 30.0}) {
      const DenseMatrix a = random_dense(n, n * 31 + static_cast<std::uint64_t>(scale * 10));
      const Complex z(0.0, -scale);
      const EMatrix ref = (z * test::to_eigen(a)).exp();
      const double rel = max_diff(expm_dense(a, z), ref) / std::max(1.0, ref.cwiseAbs().maxCoeff());
      EXPECT_LT(rel, 1e-11) << "n=" << n << " scale=" << scale;
    }
  }
}

TEST(ExpmDense, SymmetricTridiagonalPathAgreesWithPade) {
  DenseMatrix t(12, 12);
  for (std::size_t i = 0; i < 12; ++i) {
    t(i, i) = 0.1 * static_cast<double>(i) - 0.4;
    if (i + 1 < 12) t(i, i + 1) = t(i + 1, i) = 0.3 + 0.05 * static_cast<double>(i);
  }
  const Complex z(0.0, -3.0);
  const DenseMatrix eig = expm_dense(t, z);
  const DenseMatrix pade = expm_pade(z * t);
  EXPECT_LT(max_diff(eig, test::to_eigen(pade)), 1e-13);
}

TEST(ExpmDense, InverseProperty) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    DenseMatrix a = random_dense(8, seed);
    const double scale = 10.0 / a.norm1();  // ||zT|| <= 10
    const DenseMatrix prod = expm_dense(a, scale) * expm_dense(a, -scale);
    EXPECT_LT(max_diff(prod, EMatrix::Identity(8, 8)), 1e-11);
  }
}

TEST(PhiDense, ZeroMatrix) {
  double fact = 1.0;
  for (int p = 0; p <= 4; ++p) {
    if (p > 0) fact *= p;
    const CVector c = phi_dense(DenseMatrix::zeros(3, 3), 1.0, p);
    EXPECT_NEAR(c[0].real(), 1.0 / fact, 1e-16);
    EXPECT_EQ(std::abs(c[1]), 0.0);
  }
}

TEST(PhiDense, ScalarPhi1ClosedForm) {
  for (Complex z : {Complex(0.7, 0.0), Complex(-3.0, 1.0), Complex(0.0, -5.0)}) {
    DenseMatrix t(1, 1);
    t(0, 0) = z;
    const Complex got = phi_dense(t, 1.0, 1)[0];
    EXPECT_LT(std::abs(got - (std::exp(z) - 1.0) / z), 1e-14);
  }
  EXPECT_THROW(phi_dense(DenseMatrix::zeros(1, 1), 1.0, -1), std::invalid_argument);
}

TEST(PhiDense, RandomMatchesSeries) {
  const DenseMatrix t = random_dense(5, 11);
  const Complex z(0.3, -0.8);
  test::EVector e1 = test::EVector::Zero(5);
  e1(0) = 1.0;
  const test::EVector ref = test::series_phi(test::to_eigen(t), z, e1, 2);
  EXPECT_LT((test::to_eigen(phi_dense(t, z, 2)) - ref).norm(), 1e-12);
}

TEST(PhiDense, P0IsExpColumn) {
  const DenseMatrix t = random_dense(6, 2);
  const DenseMatrix e = expm_dense(t, Complex(0.0, 1.3));
  const CVector c = phi_dense(t, Complex(0.0, 1.3), 0);
  for (std::size_t i = 0; i < 6; ++i) EXPECT_LT(std::abs(c[i] - e(i, 0)), 1e-13);
}

TEST(PhiScalar, Recurrence) {
  double fact = 1.0;
  for (int p = 1; p <= 5; ++p) {
    if (p > 1) fact *= p - 1;
    for (Complex z : {Complex(0.5, 0.2), Complex(-2.0, 0.0), Complex(0.0, 3.0), Complex(1e-4, 0.0)}) {
      const Complex lhs = phi_scalar(z, p);
      const Complex rhs = (phi_scalar(z, p - 1) - 1.0 / fact) / z;
      const double tol = std::abs(z) < 1e-2 ? 1e-9 : 1e-12;
      EXPECT_LT(std::abs(lhs - rhs), tol * std::max(1.0, std::abs(lhs))) << "p=" << p << " z=" << z;
    }
  }
}

TEST(SymTridEig, Diagonal) {
  const std::vector<double> d{3.0, 1.0, 2.0}, e{0.0, 0.0};
  const SymTridEigen r = symtrid_eig(d, e);
  EXPECT_EQ(r.eigenvalues, (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(std::abs(r.vector_entry(1, 0)), 1.0);
}

TEST(SymTridEig, TwoByTwo) {
  const std::vector<double> d{0.0, 0.0}, e{1.0};
  const SymTridEigen r = symtrid_eig(d, e);
  EXPECT_NEAR(r.eigenvalues[0], -1.0, 1e-15);
  EXPECT_NEAR(r.eigenvalues[1], 1.0, 1e-15);
}

TEST(SymTridEig, LaplacianSpectrumAndReconstruction) {
  const std::size_t n = 50;
  std::vector<double> d(n, 0.5), e(n - 1, -0.25);
  const SymTridEigen r = symtrid_eig(d, e);
  for (std::size_t k = 1; k <= n; ++k) {
    const double s = std::sin(static_cast<double>(k) * std::numbers::pi / 102.0);
    EXPECT_NEAR(r.eigenvalues[k - 1], s * s, 1e-14);
  }
  Eigen::MatrixXd q(n, n), t = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) q(i, k) = r.vector_entry(i, k);
    t(i, i) = d[i];
    if (i + 1 < n) t(i, i + 1) = t(i + 1, i) = e[i];
  }
  const Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(r.eigenvalues.data(), n);
  EXPECT_LE((q * lam.asDiagonal() * q.transpose() - t).norm(), n * 1e-13 * t.norm());
  EXPECT_LE((q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).norm(), n * 1e-13);
}

TEST(SymTridEig, RandomAgainstEigen) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  const std::size_t n = 40;
  std::vector<double> d(n), e(n - 1);
  for (auto& x : d) x = g(rng);
  for (auto& x : e) x = g(rng);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    t(i, i) = d[i];
    if (i + 1 < n) t(i, i + 1) = t(i + 1, i) = e[i];
  }
  const Eigen::VectorXd ref = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(t).eigenvalues();
  const SymTridEigen r = symtrid_eig(d, e, false);
  for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(r.eigenvalues[k], ref(k), 1e-13);
}

TEST(LogNorm, NegativeDefiniteIsNonpositive) {
  const LogNormEstimate mu = log_norm_estimate(laplacian(60), Prefactor::minus_one());
  EXPECT_TRUE(mu.converged);
  EXPECT_LE(mu.value, 0.0);
}

TEST(LogNorm, SkewHermitianIsZero) {
  const auto op = build_hubbard(0.123);
  const LogNormEstimate mu = log_norm_estimate(op.matrix, Prefactor::minus_i());
  EXPECT_NEAR(mu.value, 0.0, 1e-10);
}

TEST(LogNorm, HeatInUnitInterval) {
  const auto op = build_heat(200);
  const LogNormEstimate mu = log_norm_estimate(op.matrix, op.sigma);
  EXPECT_GE(mu.value, -1.0);
  EXPECT_LE(mu.value, 0.0);
  // A Ritz value never undershoots the true -lambda_min of the scaled Laplacian.
  EXPECT_LE(mu.value, -std::pow(std::sin(std::numbers::pi / 402.0), 2) + 1e-12);
}

TEST(MatrixMarket, RoundTripIsIdempotent) {
  for (const auto& a : {laplacian(5), build_convection_diffusion(3, 0.9, 1.1).matrix,
                        SparseOperator::from_dense(random_dense(4, 7))}) {
    std::ostringstream first;
    write_matrix_market(first, a);
    std::istringstream in(first.str());
    const SparseOperator b = read_matrix_market(in);
    std::ostringstream second;
    write_matrix_market(second, b);
    EXPECT_EQ(first.str(), second.str());
    EXPECT_EQ(a.to_dense().entries(), b.to_dense().entries());
    EXPECT_EQ(a.structure(), b.structure());
  }
}

TEST(MatrixMarket, ReadsRealSymmetric) {
  std::istringstream in(
      "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 2\n1 1 2.0\n2 1 -1.0\n");
  const SparseOperator a = read_matrix_market(in);
  const DenseMatrix d = a.to_dense();
  EXPECT_EQ(d(0, 1), Complex(-1.0));
  EXPECT_EQ(d(1, 0), Complex(-1.0));
  EXPECT_EQ(d(0, 0), Complex(2.0));
}

TEST(MatrixMarket, RejectsGarbage) {
  std::istringstream in("not a matrix\n");
  EXPECT_THROW(read_matrix_market(in), std::runtime_error);
}

}  // namespace
}  // namespace kexp

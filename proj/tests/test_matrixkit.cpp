#include <gtest/gtest.h>

#include <cmath>

#include "mvf/matrixkit.hpp"
#include "mvf/random.hpp"

using namespace mvf;

TEST(HermitianMinEigenvalue, Identity) { EXPECT_DOUBLE_EQ(hermitian_min_eigenvalue(identity(3)), 1.0); }

TEST(HermitianMinEigenvalue, Diagonal) {
  CMatrix d = CMatrix::Zero(3, 3);
  d.diagonal() << 2.0, 2.0, 0.5;
  EXPECT_DOUBLE_EQ(hermitian_min_eigenvalue(d), 0.5);
}

// Rayleigh quotients never undercut the minimum, and the returned
// eigenvector attains it.
TEST(HermitianMinEigenvalue, RayleighSampling) {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix h = random_hermitian(rng, 3);
    const double lmin = hermitian_min_eigenvalue(h);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 10000; ++i) {
      CVector v = random_vector(rng, 3);
      v /= v.norm();
      best = std::min(best, v.dot(h * v).real());
    }
    EXPECT_GE(best, lmin - 1e-12);
    EXPECT_LE(best - lmin, 0.05 * (1.0 + h.norm()));
    auto [l, v] = min_eigenpair(h);
    EXPECT_NEAR(l, lmin, 1e-12);
    EXPECT_NEAR(v.dot(h * v).real(), lmin, 1e-12);
  }
}

TEST(HermitianMinEigenvalue, RejectsBadInput) {
  EXPECT_THROW(hermitian_min_eigenvalue(CMatrix::Zero(2, 3)), ContractError);
  EXPECT_THROW(hermitian_min_eigenvalue(unit(3, 0, 1)), ContractError);
}

TEST(HermitianEigenvalues, Weyl) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const CMatrix a = random_hermitian(rng, 4), b = random_hermitian(rng, 4);
    EXPECT_GE(hermitian_min_eigenvalue(a + b), hermitian_min_eigenvalue(a) + hermitian_min_eigenvalue(b) - 1e-9);
  }
}

TEST(MinSingularValue, Basics) {
  EXPECT_NEAR(min_singular_value(identity(3)), 1.0, 1e-15);
  EXPECT_NEAR(min_singular_value(unit(3, 0, 0)), 0.0, 1e-15);
  EXPECT_THROW(min_singular_value(CMatrix::Zero(2, 3)), ContractError);
}

TEST(MinSingularValue, ConstructedSvd) {
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const CMatrix u = random_unitary(rng, 3), v = random_unitary(rng, 3);
    CMatrix s = CMatrix::Zero(3, 3);
    s.diagonal() << 3.0, 2.0, 1.0;
    const CMatrix m = u * s * v.adjoint();
    EXPECT_NEAR(min_singular_value(m), 1.0, 1e-10);
    const Eigen::VectorXd sv = singular_values(m);
    EXPECT_NEAR(sv(0), 3.0, 1e-10);
  }
}

TEST(MinSingularValue, DeterminantBracket) {
  Rng rng(9);
  for (int i = 0; i < 100; ++i) {
    const CMatrix m = random_matrix(rng, 3);
    const double g = std::pow(std::abs(m.determinant()), 1.0 / 3.0);
    EXPECT_LE(min_singular_value(m), g * (1 + 1e-12));
    EXPECT_GE(singular_values(m)(0), g * (1 - 1e-12));
  }
}

TEST(Vec, BasisElement) {
  const MatVec v = vec(unit(2, 0, 0));
  ASSERT_EQ(v.data.size(), 4);
  EXPECT_EQ(v.data(0), cplx(1.0));
  for (int i = 1; i < 4; ++i) EXPECT_EQ(v.data(i), cplx(0.0));
  // column-stacked: E_21 is the second entry
  EXPECT_EQ(vec(unit(2, 1, 0)).data(1), cplx(1.0));
}

TEST(Vec, RoundTripAndLinearity) {
  Rng rng(1);
  const CMatrix m = random_matrix(rng, 4), n = random_matrix(rng, 4);
  EXPECT_EQ(unvec(vec(m)), m);
  const cplx a(0.3, -1.2), b(2.0, 0.5);
  EXPECT_LE((vec(a * m + b * n).data - (a * vec(m).data + b * vec(n).data)).norm(), 1e-14);
}

TEST(Vec, DimensionMismatch) {
  EXPECT_THROW(unvec(MatVec{3, CVector::Zero(8)}), ContractError);
  EXPECT_THROW(vec(CMatrix::Zero(2, 3)), ContractError);
}

TEST(Hermitian, EigenvaluesReal) {
  Rng rng(4);
  const CMatrix h = random_hermitian(rng, 5);
  Eigen::ComplexEigenSolver<CMatrix> es(h);
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  EXPECT_LE(es.eigenvalues().imag().cwiseAbs().maxCoeff(), 1e-12 * rho);
}

TEST(PositiveDefinite, ScaleAwareThreshold) {
  EXPECT_TRUE(is_positive_definite(identity(3)));
  CMatrix d = identity(3);
  d(2, 2) = 1e-12;
  EXPECT_FALSE(is_positive_definite(d));
  d(2, 2) = 1e-6;
  EXPECT_TRUE(is_positive_definite(d));
}

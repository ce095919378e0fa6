// Dense symmetric kernels: Cholesky factorization/solves, conjugate
// gradients, and smallest-eigenvalue estimation, cross-checked against an
// independent Jacobi-rotation eigensolver.

#include <gtest/gtest.h>

#include <cmath>

#include <hoal/linalg.hpp>
#include <hoal/problems.hpp>
#include <hoal/rng.hpp>

#include "support/test_util.hpp"

using hoal::Mat;
using hoal::Vec;

namespace {

TEST(Cholesky, IdentityAndDiagonal) {
  const hoal::SpdFactorization fi = hoal::cholesky_factor(Mat::Identity(3, 3));
  EXPECT_LE((fi.lower() - Mat::Identity(3, 3)).norm(), 1e-15);

  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const hoal::SpdFactorization fd = hoal::cholesky_factor(d);
  EXPECT_NEAR(fd.lower()(0, 0), 2.0, 1e-15);
  EXPECT_NEAR(fd.lower()(1, 1), 3.0, 1e-15);
  EXPECT_NEAR(fd.lower()(0, 1), 0.0, 1e-15);
  EXPECT_NEAR(fd.lower()(1, 0), 0.0, 1e-15);
}

TEST(Cholesky, IndefiniteMatrixReportsPivot) {
  // Eigenvalues 3 and -1: the second pivot goes nonpositive.
  Mat m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  try {
    hoal::cholesky_factor(m);
    FAIL() << "expected CholeskyError";
  } catch (const hoal::CholeskyError& e) {
    EXPECT_EQ(e.pivot_index, 1);
  }
}

TEST(Cholesky, ReconstructionAccuracy) {
  hoal::Rng rng(21);
  for (const int dim : {4, 16, 64}) {
    const Mat M = testutil::random_spd(dim, rng);
    const hoal::SpdFactorization f = hoal::cholesky_factor(M);
    const Mat R = f.lower() * f.lower().transpose();
    EXPECT_LE((R - M).norm() / M.norm(), 1e-12);
  }
}

TEST(CholeskySolve, ClosedFormAndResiduals) {
  const hoal::SpdFactorization fi = hoal::cholesky_factor(Mat::Identity(3, 3));
  Vec rhs(3);
  rhs << 1.0, -2.0, 0.5;
  EXPECT_LE((fi.solve(rhs) - rhs).norm(), 1e-15);

  Mat two(1, 1);
  two << 2.0;
  Vec four(1);
  four << 4.0;
  EXPECT_NEAR(hoal::cholesky_factor(two).solve(four)[0], 2.0, 1e-15);

  hoal::Rng rng(22);
  for (const int dim : {8, 32, 64}) {
    const Mat M = testutil::random_spd(dim, rng);
    const Vec b = rng.uniform_pm1_vector(dim);
    const Vec x = hoal::solve(hoal::cholesky_factor(M), b);
    EXPECT_LE((M * x - b).norm(), 1e-10 * (1.0 + b.norm()));
  }
}

TEST(CholeskySolve, DimensionMismatchThrows) {
  const hoal::SpdFactorization f = hoal::cholesky_factor(Mat::Identity(3, 3));
  EXPECT_THROW(f.solve(Vec::Zero(2)), hoal::DimensionError);
}

TEST(Cg, IdentityOperatorImmediate) {
  Vec rhs(4);
  rhs << 1.0, 2.0, 3.0, 4.0;
  int calls = 0;
  const Vec x = hoal::cg_solve(
      [&calls](const Vec& v) {
        ++calls;
        return v;
      },
      rhs, 1e-12, 5);
  EXPECT_LE((x - rhs).norm(), 1e-12 * rhs.norm());
  EXPECT_EQ(calls, 1);  // one Krylov step suffices for the identity
}

TEST(Cg, DiagonalOperatorFiniteTermination) {
  const int dim = 6;
  Vec diag(dim);
  diag << 1.0, 2.0, 3.0, 4.0, 5.0, 6.0;
  hoal::Rng rng(23);
  const Vec rhs = rng.uniform_pm1_vector(dim);
  int calls = 0;
  const Vec x = hoal::cg_solve(
      [&diag, &calls](const Vec& v) {
        ++calls;
        return Vec(diag.asDiagonal() * v);
      },
      rhs, 1e-12, dim + 2);
  EXPECT_LE((diag.asDiagonal() * x - rhs).norm(), 1e-12 * rhs.norm());
  EXPECT_LE(calls, dim);  // finite termination in at most dim steps
}

// Five-point Dirichlet Laplacian on an m x m grid as an operator.
Vec apply_laplacian(const Vec& v, int m) {
  Vec out(m * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int c = i * m + j;
      double acc = 4.0 * v[c];
      if (i > 0) acc -= v[c - m];
      if (i + 1 < m) acc -= v[c + m];
      if (j > 0) acc -= v[c - 1];
      if (j + 1 < m) acc -= v[c + 1];
      out[c] = acc;
    }
  }
  return out;
}

TEST(Cg, DirichletLaplacianStencil) {
  const int m = 8;
  hoal::Rng rng(24);
  const Vec rhs = rng.uniform_pm1_vector(m * m);
  const auto op = [m](const Vec& v) { return apply_laplacian(v, m); };
  const Vec x = hoal::cg_solve(op, rhs, 1e-12, 500);
  EXPECT_LE((op(x) - rhs).norm(), 1e-12 * rhs.norm());
}

TEST(Cg, IterationCapCarriesResidualHistory) {
  const int m = 8;
  hoal::Rng rng(25);
  const Vec rhs = rng.uniform_pm1_vector(m * m);
  try {
    hoal::cg_solve([m](const Vec& v) { return apply_laplacian(v, m); }, rhs, 1e-14, 3);
    FAIL() << "expected CgError";
  } catch (const hoal::CgError& e) {
    EXPECT_EQ(e.residual_history.size(), 4u);  // initial residual + 3 iterations
    EXPECT_GT(e.residual_history.back(), 1e-14);
    // History is a relative-residual record: starts at 1 for x = 0.
    EXPECT_NEAR(e.residual_history.front(), 1.0, 1e-12);
  }
}

TEST(Cg, ZeroRhsReturnsZero) {
  const Vec x = hoal::cg_solve([](const Vec& v) { return v; }, Vec::Zero(3), 1e-12, 5);
  EXPECT_EQ(x.norm(), 0.0);
}

TEST(SmallestEigenvalue, ClosedFormValues) {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2.0;
  d(1, 1) = 5.0;
  EXPECT_NEAR(hoal::smallest_eigenvalue_spd(d), 2.0, 1e-10);
  EXPECT_NEAR(hoal::smallest_eigenvalue_spd(Mat::Identity(4, 4)), 1.0, 1e-10);
}

TEST(SmallestEigenvalue, GridGraphConstraintOperator) {
  // The 2x2-cell grid-graph divergence yields B B^t equal to the four-point
  // Dirichlet stencil, whose smallest eigenvalue is exactly 2.
  const hoal::GraphDarcyForchheimer gdf = hoal::make_graph_df(2, 7);
  const Mat BBt = gdf.problem.B * gdf.problem.B.transpose();
  EXPECT_NEAR(hoal::smallest_eigenvalue_spd(BBt), 2.0, 1e-8);
}

TEST(SmallestEigenvalue, AgreesWithJacobiOracle) {
  hoal::Rng rng(26);
  for (const int dim : {2, 5, 12, 32}) {
    const Mat M = testutil::random_spd(dim, rng);
    const double lib = hoal::smallest_eigenvalue_spd(M);
    const double oracle = testutil::jacobi_eigenvalues(M).front();
    EXPECT_LE(std::abs(lib - oracle), 1e-8 * std::abs(oracle)) << "dim=" << dim;
  }
}

TEST(SmallestEigenvalue, RejectsIndefinite) {
  Mat m(2, 2);
  m << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(hoal::smallest_eigenvalue_spd(m), hoal::CholeskyError);
}

}  // namespace

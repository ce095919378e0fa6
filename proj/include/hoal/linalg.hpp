#pragma once

// Dense symmetric linear algebra kernels: Cholesky factorization and solves,
// conjugate gradients for operator-defined systems, and smallest-eigenvalue
// estimation for symmetric positive definite matrices.

#include <cmath>
#include <functional>
#include <vector>

#include "hoal/core.hpp"

namespace hoal {

// Lower-triangular Cholesky factor L of a symmetric positive definite M,
// M = L L^t. Immutable after construction; concurrent solves are safe.
class SpdFactorization {
 public:
  explicit SpdFactorization(Mat lower) : L_(std::move(lower)) {}

  int dim() const { return static_cast<int>(L_.rows()); }
  const Mat& lower() const { return L_; }

  // Solves M x = rhs by forward/back substitution.
  Vec solve(const Vec& rhs) const {
    require_dim(rhs.size(), L_.rows(), "SpdFactorization::solve");
    const int n = dim();
    Vec y(n);
    for (int i = 0; i < n; ++i) {
      double acc = rhs[i];
      for (int j = 0; j < i; ++j) acc -= L_(i, j) * y[j];
      y[i] = acc / L_(i, i);
    }
    Vec x(n);
    for (int i = n - 1; i >= 0; --i) {
      double acc = y[i];
      for (int j = i + 1; j < n; ++j) acc -= L_(j, i) * x[j];
      x[i] = acc / L_(i, i);
    }
    return x;
  }

 private:
  Mat L_;
};

// Factors a symmetric positive definite matrix; a nonpositive pivot aborts
// with the failing pivot index (the matrix is numerically not SPD there).
inline SpdFactorization cholesky_factor(const Mat& M) {
  require(M.rows() == M.cols(), "cholesky_factor: matrix must be square");
  const int n = static_cast<int>(M.rows());
  Mat L = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double d = M(k, k);
    for (int j = 0; j < k; ++j) d -= L(k, j) * L(k, j);
    if (!(d > 0.0) || !std::isfinite(d)) throw CholeskyError(k);
    const double lkk = std::sqrt(d);
    L(k, k) = lkk;
    for (int i = k + 1; i < n; ++i) {
      double acc = M(i, k);
      for (int j = 0; j < k; ++j) acc -= L(i, j) * L(k, j);
      L(i, k) = acc / lkk;
    }
  }
  return SpdFactorization(std::move(L));
}

inline Vec solve(const SpdFactorization& fact, const Vec& rhs) { return fact.solve(rhs); }

// Conjugate gradients for an SPD operator given as a matrix-vector product.
// Starts from x = 0 and stops when ||apply(x) - rhs|| <= tol * ||rhs||.
// Failure to converge within maxit raises CgError carrying the full relative
// residual history.
inline Vec cg_solve(const std::function<Vec(const Vec&)>& apply, const Vec& rhs,
                    double tol, int maxit) {
  require(tol > 0.0, "cg_solve: tol must be positive");
  require(maxit >= 1, "cg_solve: maxit must be >= 1");
  const double rhs_norm = rhs.norm();
  std::vector<double> history;
  if (rhs_norm == 0.0) return Vec::Zero(rhs.size());
  Vec x = Vec::Zero(rhs.size());
  Vec r = rhs;  // residual of x = 0
  Vec p = r;
  double rr = r.squaredNorm();
  history.push_back(std::sqrt(rr) / rhs_norm);
  if (history.back() <= tol) return x;
  for (int it = 0; it < maxit; ++it) {
    const Vec Ap = apply(p);
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) throw CgError("cg_solve: operator is not positive definite", history);
    const double alpha = rr / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    const double rr_new = r.squaredNorm();
    history.push_back(std::sqrt(rr_new) / rhs_norm);
    if (history.back() <= tol) return x;
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  throw CgError("cg_solve: no convergence within iteration cap", history);
}

// Smallest eigenvalue of a symmetric positive semidefinite matrix via a dense
// symmetric eigensolve. Singular (rank-deficient) input returns a value at
// rounding scale; clearly indefinite input is rejected.
inline double smallest_eigenvalue_spd(const Mat& M) {
  require(M.rows() == M.cols(), "smallest_eigenvalue_spd: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Mat> solver(M, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error("smallest_eigenvalue_spd: eigensolver did not converge");
  const double lo = solver.eigenvalues().minCoeff();
  const double hi = solver.eigenvalues().maxCoeff();
  if (lo < -1e-12 * std::max(1.0, std::abs(hi)))
    throw CholeskyError("smallest_eigenvalue_spd: matrix is not positive semidefinite");
  return lo;
}

}  // namespace hoal

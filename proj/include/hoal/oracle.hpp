#pragma once

// Evaluation contract for differentiable convex functionals: value, gradient,
// dense Hessian; Bregman distances and finite-difference gradient validation.

#include <functional>
#include <memory>

#include "hoal/core.hpp"
#include "hoal/linalg.hpp"

namespace hoal {

// Exact data for a quadratic functional F(v) = 1/2 (A v, v) - (b, v). Attached
// to oracles that are exactly quadratic so that closed-form conjugates and
// dual Hessians are available.
struct QuadraticData {
  Mat A;
  Vec b;
  std::shared_ptr<const SpdFactorization> A_fact;  // Cholesky of A

  // Closed-form Legendre-Fenchel conjugate:
  //   F*(xi) = 1/2 (A^{-1}(xi + b), xi + b), attained at v = A^{-1}(xi + b).
  double conjugate(const Vec& xi) const {
    const Vec v = A_fact->solve(xi + b);
    return 0.5 * v.dot(xi + b);
  }
  Vec conjugate_argmax(const Vec& xi) const { return A_fact->solve(xi + b); }
};

struct FunctionalOracle {
  int dim = 0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
  // Non-null iff the functional is exactly quadratic.
  std::shared_ptr<const QuadraticData> quadratic;
};

inline FunctionalOracle make_quadratic_oracle(const Mat& A, const Vec& b) {
  require(A.rows() == A.cols(), "make_quadratic_oracle: A must be square");
  require_dim(b.size(), A.rows(), "make_quadratic_oracle");
  auto data = std::make_shared<QuadraticData>();
  data->A = A;
  data->b = b;
  data->A_fact = std::make_shared<const SpdFactorization>(cholesky_factor(A));
  FunctionalOracle o;
  o.dim = static_cast<int>(A.rows());
  o.value = [data](const Vec& v) { return 0.5 * v.dot(data->A * v) - data->b.dot(v); };
  o.gradient = [data](const Vec& v) { return Vec(data->A * v - data->b); };
  o.hessian = [data](const Vec&) { return data->A; };
  o.quadratic = data;
  return o;
}

// Bregman distance D_F(v, w) = F(v) - F(w) - (grad F(w), v - w); nonnegative
// for convex F.
inline double bregman(const FunctionalOracle& oracle, const Vec& v, const Vec& w) {
  require_dim(v.size(), oracle.dim, "bregman");
  require_dim(w.size(), oracle.dim, "bregman");
  return oracle.value(v) - oracle.value(w) - oracle.gradient(w).dot(v - w);
}

// Symmetrized Bregman distance (grad F(v) - grad F(w), v - w); equals
// D_F(v, w) + D_F(w, v).
inline double bregman_sym(const FunctionalOracle& oracle, const Vec& v, const Vec& w) {
  require_dim(v.size(), oracle.dim, "bregman_sym");
  require_dim(w.size(), oracle.dim, "bregman_sym");
  return (oracle.gradient(v) - oracle.gradient(w)).dot(v - w);
}

// Max over coordinates of |central difference - gradient component| divided by
// (1 + |gradient component|).
inline double fd_check_gradient(const FunctionalOracle& oracle, const Vec& v, double h) {
  require(h > 0.0, "fd_check_gradient: h must be positive");
  require_dim(v.size(), oracle.dim, "fd_check_gradient");
  const Vec grad = oracle.gradient(v);
  double worst = 0.0;
  Vec e = v;
  for (int i = 0; i < oracle.dim; ++i) {
    const double vi = v[i];
    e[i] = vi + h;
    const double fp = oracle.value(e);
    e[i] = vi - h;
    const double fm = oracle.value(e);
    e[i] = vi;
    const double fd = (fp - fm) / (2.0 * h);
    const double err = std::abs(fd - grad[i]) / (1.0 + std::abs(grad[i]));
    if (err > worst) worst = err;
  }
  return worst;
}

}  // namespace hoal

#pragma once

// Power-of-norm penalty terms  w -> (coef/q) * ||w||^q  with exact gradient
// coef * J_q(w) and exact Hessian, including the kink-clamping policy for
// sub-quadratic exponents: Hessian evaluations floor the norm (and, for
// coordinate-power norms, the component magnitudes) at a small delta so the
// Hessian stays finite at the cusp; gradients are never clamped.

#include <cmath>

#include "hoal/core.hpp"
#include "hoal/normed_space.hpp"

namespace hoal {

inline double power_term_value(const NormedSpaceSpec& space, const Vec& w, double q,
                               double coef) {
  return (coef / q) * std::pow(norm(space, w), q);
}

inline Vec power_term_gradient(const NormedSpaceSpec& space, const Vec& w, double q,
                               double coef) {
  return coef * duality_map(space, w, q);
}

namespace detail {
// pow with a floor applied to the base only when the exponent is negative
// (where an unclamped zero base would blow up).
inline double guarded_pow(double base, double exponent, double floor_value) {
  if (exponent < 0.0) base = std::max(base, floor_value);
  return std::pow(base, exponent);
}
}  // namespace detail

inline Mat power_term_hessian(const NormedSpaceSpec& space, const Vec& w, double q,
                              double coef, double clamp_floor) {
  require_dim(w.size(), space.dim, "power_term_hessian");
  require(clamp_floor > 0.0, "power_term_hessian: clamp floor must be positive");
  const int n = space.dim;
  const double N = norm(space, w);
  if (space.kind == NormKind::euclidean) {
    // coef * ( N^{q-2} I + (q-2) N^{q-4} w w^t )
    const double a = detail::guarded_pow(N, q - 2.0, clamp_floor);
    Mat H = a * Mat::Identity(n, n);
    if (q != 2.0 && N > 0.0) {
      const double b = (q - 2.0) * detail::guarded_pow(N, q - 4.0, clamp_floor);
      H += b * (w * w.transpose());
    }
    return coef * H;
  }
  // coordinate_power(s):
  //   grad = N^{q-s} psi with psi_i = sign(w_i)|w_i|^{s-1}
  //   hess = (q-s) N^{q-2s} psi psi^t + N^{q-s} (s-1) diag(|w_i|^{s-2})
  const double s = space.s;
  Vec psi(n);
  for (int i = 0; i < n; ++i) psi[i] = sign_power(w[i], s - 1.0);
  Mat H = Mat::Zero(n, n);
  const double outer = (q - s) * detail::guarded_pow(N, q - 2.0 * s, clamp_floor);
  if (q != s) H += outer * (psi * psi.transpose());
  const double diag_scale = (s - 1.0) * detail::guarded_pow(N, q - s, clamp_floor);
  for (int i = 0; i < n; ++i) {
    const double mag = s < 2.0 ? std::max(std::abs(w[i]), clamp_floor) : std::abs(w[i]);
    H(i, i) += diag_scale * std::pow(mag, s - 2.0);
  }
  return coef * H;
}

}  // namespace hoal

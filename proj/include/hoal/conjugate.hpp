#pragma once

// Numerical Legendre-Fenchel conjugation: F*(xi) = sup_v { (xi, v) - F(v) },
// computed by minimizing F(v) - (xi, v) with the damped Newton solver. The
// solve always warm-starts at 0.

#include <utility>

#include "hoal/core.hpp"
#include "hoal/newton.hpp"
#include "hoal/oracle.hpp"

namespace hoal {

struct ConjugateValue {
  double value = 0.0;  // F*(xi)
  Vec argmax;          // the maximizing v, satisfying grad F(v) = xi
};

// Shifted oracle v -> F(v) - (xi, v); strictly convex whenever F is.
inline FunctionalOracle tilt_oracle(const FunctionalOracle& oracle, const Vec& xi) {
  require_dim(xi.size(), oracle.dim, "tilt_oracle");
  FunctionalOracle t;
  t.dim = oracle.dim;
  t.value = [oracle, xi](const Vec& v) { return oracle.value(v) - xi.dot(v); };
  t.gradient = [oracle, xi](const Vec& v) { return Vec(oracle.gradient(v) - xi); };
  t.hessian = oracle.hessian;
  return t;
}

inline ConjugateValue conjugate_value(const FunctionalOracle& oracle, const Vec& xi,
                                      const NewtonConfig& cfg) {
  const FunctionalOracle tilted = tilt_oracle(oracle, xi);
  const NewtonResult res = minimize(tilted, Vec::Zero(oracle.dim), cfg);
  ConjugateValue out;
  out.argmax = res.minimizer;
  out.value = xi.dot(res.minimizer) - oracle.value(res.minimizer);
  return out;
}

}  // namespace hoal

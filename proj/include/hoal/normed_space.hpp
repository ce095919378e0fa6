#pragma once

// Finite-dimensional normed vector spaces with the standard coordinate inner
// product, their dual norms, and duality maps of arbitrary power type.
//
// Two norm families are supported:
//   * euclidean           : ||v|| = (sum v_i^2)^(1/2)
//   * coordinate_power(s) : ||v|| = (sum |v_i|^s)^(1/s), s > 1
//
// The duality map of power type p > 1 is the gradient of (1/p)||.||^p; its
// inverse is the power-(p*) duality map taken with respect to the dual norm,
// where 1/p + 1/p* = 1.

#include <cmath>

#include "hoal/core.hpp"

namespace hoal {

// Holder-conjugate exponent pair: 1/p + 1/p_star = 1.
struct PowerPair {
  double p;
  double p_star;

  static PowerPair from_p(double p) {
    require(p > 1.0, "PowerPair: p must exceed 1");
    PowerPair pair{p, p / (p - 1.0)};
    pair.validate();
    return pair;
  }

  void validate() const {
    require(p > 1.0 && p_star > 1.0, "PowerPair: both exponents must exceed 1");
    const double resid = std::abs(1.0 / p + 1.0 / p_star - 1.0);
    require(resid <= 1e-14, "PowerPair: exponents are not Holder conjugate");
  }
};

enum class NormKind { euclidean, coordinate_power };

struct NormedSpaceSpec {
  int dim = 0;
  NormKind kind = NormKind::euclidean;
  double s = 2.0;  // only meaningful for coordinate_power

  static NormedSpaceSpec Euclidean(int dim) {
    require(dim >= 1, "NormedSpaceSpec: dim must be >= 1");
    return NormedSpaceSpec{dim, NormKind::euclidean, 2.0};
  }

  static NormedSpaceSpec CoordinatePower(int dim, double s) {
    require(dim >= 1, "NormedSpaceSpec: dim must be >= 1");
    require(s > 1.0, "NormedSpaceSpec: coordinate power s must exceed 1");
    return NormedSpaceSpec{dim, NormKind::coordinate_power, s};
  }

  // The space carrying the dual norm (euclidean is self-dual; the
  // coordinate-power dual exponent is the Holder conjugate).
  NormedSpaceSpec dual() const {
    if (kind == NormKind::euclidean) return *this;
    return CoordinatePower(dim, PowerPair::from_p(s).p_star);
  }
};

inline double norm(const NormedSpaceSpec& space, const Vec& v) {
  require_dim(v.size(), space.dim, "norm");
  if (space.kind == NormKind::euclidean) return v.norm();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v[i]), space.s);
  return std::pow(acc, 1.0 / space.s);
}

inline double dual_norm(const NormedSpaceSpec& space, const Vec& v) {
  return norm(space.dual(), v);
}

// J_p(v): gradient of (1/p)||.||^p at v. Satisfies (J_p(v), v) = ||v||^p and
// ||J_p(v)||_* = ||v||^(p-1); J_p(0) = 0 by continuous extension.
inline Vec duality_map(const NormedSpaceSpec& space, const Vec& v, double p) {
  require_dim(v.size(), space.dim, "duality_map");
  require(p > 1.0, "duality_map: power p must exceed 1");
  const double n = norm(space, v);
  if (n == 0.0) return Vec::Zero(space.dim);
  if (space.kind == NormKind::euclidean) {
    return std::pow(n, p - 2.0) * v;
  }
  const double s = space.s;
  Vec out(space.dim);
  const double scale = std::pow(n, p - s);
  for (int i = 0; i < space.dim; ++i) out[i] = scale * sign_power(v[i], s - 1.0);
  return out;
}

// Inverse of J_p: the power-(p*) duality map with respect to the dual norm.
inline Vec inverse_duality_map(const NormedSpaceSpec& space, const Vec& w, double p) {
  require_dim(w.size(), space.dim, "inverse_duality_map");
  const PowerPair pair = PowerPair::from_p(p);
  return duality_map(space.dual(), w, pair.p_star);
}

}  // namespace hoal

// Norm evaluation, dual norms, and duality maps: closed-form values,
// algebraic identities, round trips, and finite-difference consistency.

#include <gtest/gtest.h>

#include <cmath>

#include <hoal/normed_space.hpp>
#include <hoal/rng.hpp>

#include "support/test_util.hpp"

using hoal::NormedSpaceSpec;
using hoal::Vec;

namespace {

Vec make2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

TEST(PowerPair, HolderConjugates) {
  const hoal::PowerPair p2 = hoal::PowerPair::from_p(2.0);
  EXPECT_DOUBLE_EQ(p2.p_star, 2.0);
  const hoal::PowerPair p3 = hoal::PowerPair::from_p(3.0);
  EXPECT_DOUBLE_EQ(p3.p_star, 1.5);
  const hoal::PowerPair p15 = hoal::PowerPair::from_p(1.5);
  EXPECT_DOUBLE_EQ(p15.p_star, 3.0);
  EXPECT_THROW(hoal::PowerPair::from_p(1.0), hoal::DomainError);
  EXPECT_THROW((hoal::PowerPair{2.0, 3.0}.validate()), hoal::DomainError);
}

TEST(Norm, ClosedFormValues) {
  const NormedSpaceSpec e2 = NormedSpaceSpec::Euclidean(2);
  EXPECT_DOUBLE_EQ(hoal::norm(e2, make2(3.0, 4.0)), 5.0);
  EXPECT_DOUBLE_EQ(hoal::norm(e2, Vec::Zero(2)), 0.0);

  const NormedSpaceSpec c3 = NormedSpaceSpec::CoordinatePower(2, 3.0);
  EXPECT_NEAR(hoal::norm(c3, make2(1.0, 1.0)), std::pow(2.0, 1.0 / 3.0), 1e-15);
  EXPECT_DOUBLE_EQ(hoal::norm(c3, Vec::Zero(2)), 0.0);
}

TEST(Norm, DimensionMismatchThrows) {
  const NormedSpaceSpec e2 = NormedSpaceSpec::Euclidean(2);
  EXPECT_THROW(hoal::norm(e2, Vec::Zero(3)), hoal::DimensionError);
  EXPECT_THROW(hoal::duality_map(e2, Vec::Zero(3), 2.0), hoal::DimensionError);
  EXPECT_THROW(hoal::inverse_duality_map(e2, Vec::Zero(1), 2.0), hoal::DimensionError);
}

TEST(Norm, InvalidConstruction) {
  EXPECT_THROW(NormedSpaceSpec::Euclidean(0), hoal::DomainError);
  EXPECT_THROW(NormedSpaceSpec::CoordinatePower(2, 1.0), hoal::DomainError);
}

TEST(DualNorm, ClosedFormValues) {
  const NormedSpaceSpec e2 = NormedSpaceSpec::Euclidean(2);
  EXPECT_DOUBLE_EQ(hoal::dual_norm(e2, make2(3.0, 4.0)), 5.0);  // self-dual

  // Dual of coordinate_power(3) is coordinate_power(3/2).
  const NormedSpaceSpec c3 = NormedSpaceSpec::CoordinatePower(2, 3.0);
  EXPECT_NEAR(hoal::dual_norm(c3, make2(1.0, 1.0)), std::pow(2.0, 2.0 / 3.0), 1e-15);

  // coordinate_power(2) is self-dual.
  const NormedSpaceSpec c2 = NormedSpaceSpec::CoordinatePower(3, 2.0);
  hoal::Rng rng(11);
  const Vec v = rng.uniform_pm1_vector(3);
  EXPECT_DOUBLE_EQ(hoal::dual_norm(c2, v), hoal::norm(c2, v));
}

TEST(DualityMap, ClosedFormValues) {
  const NormedSpaceSpec e2 = NormedSpaceSpec::Euclidean(2);
  // ||v|| * v at p = 3.
  const Vec j3 = hoal::duality_map(e2, make2(0.0, 2.0), 3.0);
  EXPECT_NEAR(j3[0], 0.0, 1e-15);
  EXPECT_NEAR(j3[1], 4.0, 1e-15);

  // p = 2 on a Euclidean space is the identity.
  hoal::Rng rng(12);
  const Vec v = rng.uniform_pm1_vector(2);
  const Vec j2 = hoal::duality_map(e2, v, 2.0);
  EXPECT_NEAR((j2 - v).norm(), 0.0, 1e-15);

  // coordinate_power(3), [1,1], p=3: norm^{p-s} = 1, components sign|.|^2 = 1.
  const NormedSpaceSpec c3 = NormedSpaceSpec::CoordinatePower(2, 3.0);
  const Vec jc = hoal::duality_map(c3, make2(1.0, 1.0), 3.0);
  EXPECT_NEAR(jc[0], 1.0, 1e-15);
  EXPECT_NEAR(jc[1], 1.0, 1e-15);

  // J_p(0) = 0 for all kinds and powers.
  EXPECT_DOUBLE_EQ(hoal::duality_map(e2, Vec::Zero(2), 1.5).norm(), 0.0);
  EXPECT_DOUBLE_EQ(hoal::duality_map(c3, Vec::Zero(2), 4.0).norm(), 0.0);
}

TEST(DualityMap, AlgebraicIdentities) {
  hoal::Rng rng(13);
  for (const double p : {1.5, 2.0, 3.0, 4.0}) {
    for (int kind = 0; kind < 2; ++kind) {
      const NormedSpaceSpec space = kind == 0 ? NormedSpaceSpec::Euclidean(5)
                                              : NormedSpaceSpec::CoordinatePower(5, 3.0);
      for (int trial = 0; trial < 20; ++trial) {
        const Vec v = rng.uniform_pm1_vector(5);
        const Vec j = hoal::duality_map(space, v, p);
        const double n = hoal::norm(space, v);
        // (J_p(v), v) = ||v||^p.
        EXPECT_NEAR(j.dot(v), std::pow(n, p), 1e-12 * (1.0 + std::pow(n, p)));
        // ||J_p(v)||_* = ||v||^{p-1}.
        EXPECT_NEAR(hoal::dual_norm(space, j), std::pow(n, p - 1.0),
                    1e-12 * (1.0 + std::pow(n, p - 1.0)));
      }
    }
  }
}

TEST(DualityMap, GeneralizedCauchySchwarz) {
  hoal::Rng rng(14);
  for (const double p : {1.5, 2.0, 3.0, 4.0}) {
    for (int kind = 0; kind < 2; ++kind) {
      const NormedSpaceSpec space = kind == 0 ? NormedSpaceSpec::Euclidean(6)
                                              : NormedSpaceSpec::CoordinatePower(6, 2.5);
      for (int trial = 0; trial < 50; ++trial) {
        const Vec v = rng.uniform_pm1_vector(6);
        const Vec w = rng.uniform_pm1_vector(6);
        const double lhs = hoal::duality_map(space, v, p).dot(w);
        const double rhs =
            std::pow(hoal::norm(space, v), p - 1.0) * hoal::norm(space, w);
        EXPECT_LE(lhs, rhs + 1e-12);
      }
    }
  }
}

TEST(DualityMap, Homogeneity) {
  hoal::Rng rng(15);
  const NormedSpaceSpec spaces[2] = {NormedSpaceSpec::Euclidean(4),
                                     NormedSpaceSpec::CoordinatePower(4, 3.0)};
  for (const double p : {1.5, 2.0, 3.0, 4.0}) {
    for (const NormedSpaceSpec& space : spaces) {
      const Vec v = rng.uniform_pm1_vector(4);
      for (const double t : {0.25, 2.0, 7.5}) {
        const Vec lhs = hoal::duality_map(space, Vec(t * v), p);
        const Vec rhs = std::pow(t, p - 1.0) * hoal::duality_map(space, v, p);
        EXPECT_LE((lhs - rhs).norm(), 1e-13 * (1.0 + rhs.norm()));
      }
    }
  }
}

TEST(InverseDualityMap, ClosedFormAndZero) {
  const NormedSpaceSpec e2 = NormedSpaceSpec::Euclidean(2);
  const Vec inv = hoal::inverse_duality_map(e2, make2(0.0, 4.0), 3.0);
  EXPECT_NEAR(inv[0], 0.0, 1e-15);
  EXPECT_NEAR(inv[1], 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(hoal::inverse_duality_map(e2, Vec::Zero(2), 2.5).norm(), 0.0);
}

TEST(InverseDualityMap, RoundTripAllKindsDims) {
  hoal::Rng rng(16);
  for (const double p : {1.5, 2.0, 3.0, 4.0}) {
    for (int dim = 1; dim <= 16; ++dim) {
      for (int kind = 0; kind < 2; ++kind) {
        const NormedSpaceSpec space = kind == 0
                                          ? NormedSpaceSpec::Euclidean(dim)
                                          : NormedSpaceSpec::CoordinatePower(dim, 2.5);
        const Vec v = rng.uniform_pm1_vector(dim);
        const Vec w = hoal::duality_map(space, v, p);
        const Vec back = hoal::inverse_duality_map(space, w, p);
        EXPECT_LE((back - v).norm(), 1e-10 * (1.0 + v.norm()))
            << "p=" << p << " dim=" << dim << " kind=" << kind;
        // And the reverse composition.
        const Vec w2 = hoal::duality_map(space, hoal::inverse_duality_map(space, v, p), p);
        EXPECT_LE((w2 - v).norm(), 1e-10 * (1.0 + v.norm()));
      }
    }
  }
}

TEST(DualityMap, MatchesFiniteDifferenceOfPowerNorm) {
  // J_p is the gradient of (1/p)||.||^p; check by central differences at
  // points whose coordinates stay at least 1e-3 away from zero (the power
  // norm is not twice differentiable at coordinate kinks).
  hoal::Rng rng(17);
  const double h = 1e-6;
  for (const double p : {1.5, 2.0, 3.0}) {
    for (int kind = 0; kind < 2; ++kind) {
      const NormedSpaceSpec space = kind == 0 ? NormedSpaceSpec::Euclidean(4)
                                              : NormedSpaceSpec::CoordinatePower(4, 2.5);
      for (int trial = 0; trial < 10; ++trial) {
        Vec v = rng.uniform_pm1_vector(4);
        for (int i = 0; i < 4; ++i)
          if (std::abs(v[i]) < 1e-3) v[i] = v[i] < 0.0 ? -0.5 : 0.5;
        const Vec grad = hoal::duality_map(space, v, p);
        for (int i = 0; i < 4; ++i) {
          Vec vp = v, vm = v;
          vp[i] += h;
          vm[i] -= h;
          const double fd = (std::pow(hoal::norm(space, vp), p) -
                             std::pow(hoal::norm(space, vm), p)) /
                            (p * 2.0 * h);
          EXPECT_NEAR(grad[i], fd, 1e-6 * (1.0 + std::abs(grad[i])));
        }
      }
    }
  }
}

}  // namespace

// Proximal point outer loop: closed-form quadratic recursion, fixed points,
// the per-step descent inequality, and the three energy-gap decay regimes
// (linear for r = p, superlinear for r > p, sublinear envelope for r < p).

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include <hoal/certificates.hpp>
#include <hoal/ppm.hpp>
#include <hoal/problems.hpp>
#include <hoal/rng.hpp>

#include "support/test_util.hpp"

using hoal::Mat;
using hoal::Vec;

namespace {

Mat diag3(double a, double b, double c) {
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = a;
  d(1, 1) = b;
  d(2, 2) = c;
  return d;
}

std::vector<double> gaps_of(const hoal::PpmTrace& trace) {
  std::vector<double> gaps;
  for (const auto& row : trace.rows) gaps.push_back(row.energy_gap);
  return gaps;
}

TEST(Ppm, QuadraticStepClosedForm) {
  // For F(v) = (1/2) v^t A v - (b, v) with r = 2 the proximal step solves
  // (A + eps I) u_next = b + eps u.
  hoal::Rng rng(61);
  const Mat A = testutil::random_spd(6, rng);
  const Vec b = rng.uniform_pm1_vector(6);
  const auto oracle = hoal::make_quadratic_oracle(A, b);
  const auto space = hoal::NormedSpaceSpec::Euclidean(6);

  hoal::PpmConfig cfg;
  cfg.r = 2.0;
  cfg.epsilon = 0.7;
  cfg.n_iters = 10;
  cfg.inner = testutil::tight_newton();
  const Vec u0 = rng.uniform_pm1_vector(6);
  const hoal::PpmTrace trace = hoal::ppm_run(oracle, space, u0, cfg);
  ASSERT_FALSE(trace.failed()) << trace.failure;
  ASSERT_EQ(trace.rows.size(), 11u);

  const hoal::SpdFactorization shifted =
      hoal::cholesky_factor(Mat(A + cfg.epsilon * Mat::Identity(6, 6)));
  Vec expected = u0;
  for (int n = 1; n <= 10; ++n) {
    expected = shifted.solve(b + cfg.epsilon * expected);
    EXPECT_LE((trace.rows[n].iterate - expected).norm(), 1e-9 * (1.0 + expected.norm()))
        << "iteration " << n;
    EXPECT_LE(trace.rows[n].optimality_residual, 1e-8);
  }
}

TEST(Ppm, ScalarHalvingStep) {
  // F(x) = x^2/2, r = 2, eps = 1: each step halves the iterate.
  const auto oracle = hoal::make_quadratic_oracle(Mat::Identity(1, 1), Vec::Zero(1));
  const auto space = hoal::NormedSpaceSpec::Euclidean(1);
  hoal::PpmConfig cfg;
  cfg.n_iters = 1;
  cfg.inner = testutil::tight_newton();
  const hoal::PpmTrace trace = hoal::ppm_run(oracle, space, Vec::Ones(1), cfg);
  ASSERT_EQ(trace.rows.size(), 2u);
  EXPECT_NEAR(trace.rows[1].iterate[0], 0.5, 1e-12);
  EXPECT_NEAR(trace.rows[1].step_norm, 0.5, 1e-12);
}

TEST(Ppm, MinimizerIsFixedPoint) {
  hoal::Rng rng(62);
  const Mat A = testutil::random_spd(4, rng);
  const Vec b = rng.uniform_pm1_vector(4);
  const auto oracle = hoal::make_quadratic_oracle(A, b);
  const auto space = hoal::NormedSpaceSpec::Euclidean(4);
  const Vec ustar = hoal::cholesky_factor(A).solve(b);
  for (const double r : {2.0, 3.0}) {
    hoal::PpmConfig cfg;
    cfg.r = r;
    cfg.n_iters = 3;
    cfg.inner = testutil::tight_newton();
    const hoal::PpmTrace trace = hoal::ppm_run(oracle, space, ustar, cfg);
    ASSERT_FALSE(trace.failed());
    for (const auto& row : trace.rows) {
      EXPECT_LE((row.iterate - ustar).norm(), 1e-10 * (1.0 + ustar.norm()));
      EXPECT_LE(row.step_norm, 1e-10);
    }
  }
}

TEST(Ppm, DescentInequalityPerStep) {
  // Convexity plus step optimality give F(u_n) - F(u_{n+1}) >= eps ||step||^r.
  const auto loc = hoal::make_location(8, 30, 3.0, 54);
  const auto space = hoal::NormedSpaceSpec::Euclidean(8);
  for (const double r : {2.0, 3.0}) {
    hoal::PpmConfig cfg;
    cfg.r = r;
    cfg.epsilon = 0.5;
    cfg.n_iters = 12;
    const hoal::PpmTrace trace = hoal::ppm_run(loc.problem.oracle, space, Vec::Zero(8), cfg);
    ASSERT_FALSE(trace.failed()) << trace.failure;
    const double slack = 1e-8 * (1.0 + std::abs(trace.rows[0].objective));
    for (std::size_t n = 0; n + 1 < trace.rows.size(); ++n) {
      const double decrease = trace.rows[n].objective - trace.rows[n + 1].objective;
      const double required = cfg.epsilon * std::pow(trace.rows[n + 1].step_norm, r);
      EXPECT_GE(decrease, required - slack) << "r=" << r << " step " << n;
    }
  }
}

TEST(Ppm, LinearRegimeMatchesContractionFactor) {
  // Strongly convex quadratic with mu = 1, r = p = 2, eps = 1: gamma = 3, so
  // every gap ratio is bounded by 1/(1+gamma) = 1/4.
  const auto oracle = hoal::make_quadratic_oracle(diag3(1.0, 2.0, 5.0), Vec::Zero(3));
  const auto space = hoal::NormedSpaceSpec::Euclidean(3);
  hoal::PpmConfig cfg;
  cfg.n_iters = 10;
  cfg.inner = testutil::tight_newton();
  Vec u0 = Vec::Zero(3);
  u0[0] = 1.0;  // pure slowest mode, which meets the bound with equality
  const hoal::PpmTrace trace = hoal::ppm_run(oracle, space, u0, cfg, Vec::Zero(3));
  ASSERT_FALSE(trace.failed());
  ASSERT_TRUE(trace.has_reference);

  const double gamma = 2.0 * (1.0 / cfg.epsilon) + std::pow(1.0 / cfg.epsilon, 2.0);
  EXPECT_NEAR(gamma, 3.0, 1e-15);
  const auto gaps = gaps_of(trace);
  for (std::size_t n = 0; n + 1 < gaps.size(); ++n) {
    ASSERT_GT(gaps[n], 0.0);
    EXPECT_LE(gaps[n + 1] / gaps[n], 1.0 / (1.0 + gamma) + 1e-8) << "step " << n;
  }

  const hoal::CertificateReport report =
      hoal::check_linear(gaps, hoal::ConvexityParams{2.0, 1.0, true}, cfg.epsilon);
  EXPECT_TRUE(report.pass);
  EXPECT_NEAR(report.constants.at("gamma"), 3.0, 1e-12);
}

TEST(Ppm, SuperlinearRegimeQuadraticOrder) {
  // r = 3 > p = 2 with mu = eps = 1: zeta_{n+1} <= 2 zeta_n^2.
  const auto oracle = hoal::make_quadratic_oracle(diag3(1.0, 2.0, 5.0), Vec::Zero(3));
  const auto space = hoal::NormedSpaceSpec::Euclidean(3);
  hoal::PpmConfig cfg;
  cfg.r = 3.0;
  cfg.n_iters = 4;
  cfg.inner = testutil::tight_newton();
  Vec u0(3);
  u0 << 0.1, 0.1, 0.1;
  const hoal::PpmTrace trace = hoal::ppm_run(oracle, space, u0, cfg, Vec::Zero(3));
  ASSERT_FALSE(trace.failed());

  const auto gaps = gaps_of(trace);
  int checked = 0;
  for (std::size_t n = 0; n + 1 < gaps.size(); ++n) {
    if (gaps[n] < 1e-12 || gaps[n + 1] < 1e-14) break;  // solver floor
    EXPECT_LE(gaps[n + 1] / (gaps[n] * gaps[n]), 2.0 * (1.0 + 1e-6)) << "step " << n;
    ++checked;
  }
  EXPECT_GE(checked, 2);

  std::vector<double> kept(gaps.begin(), gaps.begin() + checked + 1);
  const hoal::CertificateReport report =
      hoal::check_superlinear(kept, hoal::ConvexityParams{2.0, 1.0, true}, cfg.epsilon, cfg.r);
  EXPECT_TRUE(report.pass);
  EXPECT_NEAR(report.constants.at("constant"), 2.0, 1e-12);
  EXPECT_NEAR(report.constants.at("exponent"), 2.0, 1e-12);
}

TEST(Ppm, SublinearRegimeEnvelope) {
  // r = 1.5 < p = 2: gaps must stay below the sublinear envelope with beta = 2.
  const auto oracle = hoal::make_quadratic_oracle(diag3(1.0, 2.0, 5.0), Vec::Zero(3));
  const auto space = hoal::NormedSpaceSpec::Euclidean(3);
  hoal::PpmConfig cfg;
  cfg.r = 1.5;
  cfg.n_iters = 8;
  Vec u0(3);
  u0 << 0.3, 0.3, 0.3;
  const hoal::PpmTrace trace = hoal::ppm_run(oracle, space, u0, cfg, Vec::Zero(3));
  ASSERT_FALSE(trace.failed());

  std::vector<double> gaps;
  for (const auto& row : trace.rows) {
    if (!gaps.empty() && row.energy_gap < 1e-13) break;
    gaps.push_back(row.energy_gap);
  }
  ASSERT_GE(gaps.size(), 3u);
  const hoal::CertificateReport report =
      hoal::check_sublinear(gaps, hoal::ConvexityParams{2.0, 1.0, true}, cfg.epsilon, cfg.r);
  EXPECT_TRUE(report.pass) << "worst margin at iteration " << report.worst_iteration;
  EXPECT_NEAR(report.constants.at("beta"), 2.0, 1e-12);
}

TEST(Ppm, ZeroIterationsSingleRow) {
  const auto oracle = hoal::make_quadratic_oracle(Mat::Identity(2, 2), Vec::Zero(2));
  const auto space = hoal::NormedSpaceSpec::Euclidean(2);
  hoal::PpmConfig cfg;
  cfg.n_iters = 0;
  Vec u0(2);
  u0 << 3.0, 4.0;
  const hoal::PpmTrace no_ref = hoal::ppm_run(oracle, space, u0, cfg);
  ASSERT_EQ(no_ref.rows.size(), 1u);
  EXPECT_EQ(no_ref.rows[0].step_norm, 0.0);
  EXPECT_NEAR(no_ref.rows[0].objective, 12.5, 1e-12);
  EXPECT_NEAR(no_ref.rows[0].optimality_residual, 5.0, 1e-12);
  EXPECT_FALSE(no_ref.has_reference);
  EXPECT_TRUE(std::isnan(no_ref.rows[0].energy_gap));

  const hoal::PpmTrace with_ref = hoal::ppm_run(oracle, space, u0, cfg, Vec::Zero(2));
  ASSERT_EQ(with_ref.rows.size(), 1u);
  EXPECT_TRUE(with_ref.has_reference);
  EXPECT_NEAR(with_ref.rows[0].energy_gap, 12.5, 1e-12);
}

TEST(Ppm, PartialTraceOnOracleBlowup) {
  // The gradient turns non-finite once the iterate drops below 0.4; the run
  // must stop there, keep the rows it completed, and name the iteration.
  hoal::FunctionalOracle oracle;
  oracle.dim = 1;
  oracle.value = [](const Vec& v) { return 0.5 * v.squaredNorm(); };
  oracle.gradient = [](const Vec& v) {
    Vec g(1);
    g[0] = v[0] >= 0.4 ? v[0] : std::numeric_limits<double>::quiet_NaN();
    return g;
  };
  oracle.hessian = [](const Vec&) { return Mat(Mat::Identity(1, 1)); };
  const auto space = hoal::NormedSpaceSpec::Euclidean(1);
  hoal::PpmConfig cfg;
  cfg.n_iters = 6;
  const hoal::PpmTrace trace = hoal::ppm_run(oracle, space, Vec::Ones(1), cfg);
  EXPECT_TRUE(trace.failed());
  EXPECT_NE(trace.failure.find("iteration 2"), std::string::npos) << trace.failure;
  ASSERT_EQ(trace.rows.size(), 2u);  // starting row plus the one completed step
  EXPECT_NEAR(trace.rows[1].iterate[0], 0.5, 1e-10);
}

TEST(Ppm, ConfigValidation) {
  const auto oracle = hoal::make_quadratic_oracle(Mat::Identity(1, 1), Vec::Zero(1));
  const auto space = hoal::NormedSpaceSpec::Euclidean(1);
  hoal::PpmConfig bad_r;
  bad_r.r = 1.0;
  EXPECT_THROW(hoal::ppm_run(oracle, space, Vec::Zero(1), bad_r), hoal::DomainError);
  hoal::PpmConfig bad_eps;
  bad_eps.epsilon = 0.0;
  EXPECT_THROW(hoal::ppm_run(oracle, space, Vec::Zero(1), bad_eps), hoal::DomainError);
  hoal::PpmConfig bad_iters;
  bad_iters.n_iters = -1;
  EXPECT_THROW(hoal::ppm_run(oracle, space, Vec::Zero(1), bad_iters), hoal::DomainError);
}

}  // namespace

#pragma once

// Closed-form rate constants and per-iteration verification of convergence
// bounds against recorded energy-gap traces.
//
// Conventions: zeta_n denotes the energy gap at outer iteration n (primal
// objective gap for proximal-point runs, dual energy gap for augmented
// Lagrangian runs). A functional is (p, mu)-uniformly convex when
// D_F(v, w) >= (mu/p) ||v - w||^p and (q, L)-weakly smooth when
// D_F(v, w) <= (L/q) ||v - w||^q.

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hoal/alm.hpp"
#include "hoal/core.hpp"
#include "hoal/normed_space.hpp"
#include "hoal/oracle.hpp"

namespace hoal {

struct ConvexityParams {
  double p = 2.0;
  double mu = 1.0;
  bool exact = true;  // true when derived from an exact spectrum, false when empirical

  void validate() const {
    require(p >= 2.0, "ConvexityParams: p must be >= 2");
    require(mu > 0.0, "ConvexityParams: mu must be positive");
  }
};

struct SmoothnessParams {
  double q = 2.0;
  double L = 1.0;

  void validate() const {
    require(q > 1.0 && q <= 2.0, "SmoothnessParams: q must lie in (1, 2]");
    require(L > 0.0, "SmoothnessParams: L must be positive");
  }
};

struct CertificateReport {
  std::string id;  // which bound was checked (e.g. "linear_rate")
  std::map<std::string, double> constants;
  std::vector<double> margins;  // bound + slack - observed, per checked iteration
  bool pass = true;
  int worst_iteration = -1;  // index of the smallest margin
  bool advisory = false;     // true when built on empirical (non-exact) constants
  std::vector<double> empirical_orders;  // log zeta_{n+1} / log zeta_n where defined

  void finalize() {
    pass = true;
    worst_iteration = -1;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < margins.size(); ++i) {
      if (margins[i] < worst) {
        worst = margins[i];
        worst_iteration = static_cast<int>(i);
      }
      if (margins[i] < 0.0) pass = false;
    }
  }
};

// gamma = (p/(p-1)) (mu/eps)^{1/(p-1)} + (1/(p-1)) (mu/eps)^{p/(p-1)}.
// The one-iteration energy-gap contraction factor is 1/(1+gamma); gamma grows
// without bound as eps shrinks.
inline double gamma_constant(double p, double mu, double epsilon) {
  require(p >= 2.0, "gamma_constant: p must be >= 2");
  require(mu > 0.0, "gamma_constant: mu must be positive");
  require(epsilon > 0.0, "gamma_constant: epsilon must be positive");
  const double ratio = mu / epsilon;
  return (p / (p - 1.0)) * std::pow(ratio, 1.0 / (p - 1.0)) +
         (1.0 / (p - 1.0)) * std::pow(ratio, p / (p - 1.0));
}

namespace detail {
inline void validate_gaps(const std::vector<double>& gaps, double slack) {
  require(gaps.size() >= 2, "certificate check: need at least two gap values");
  for (double z : gaps)
    require(z >= -slack, "certificate check: gaps must be nonnegative (up to slack)");
}
inline double clamp0(double x) { return x > 0.0 ? x : 0.0; }
}  // namespace detail

// Linear rate: zeta_{n+1} <= zeta_n / (1 + gamma) + slack for every n, with
// slack = slack_scale * (1 + zeta_0). Applies when the proximal order equals
// the convexity power (r = p).
inline CertificateReport check_linear(const std::vector<double>& gaps,
                                      const ConvexityParams& params, double epsilon,
                                      double slack_scale = 1e-10) {
  params.validate();
  const double slk = slack_scale * (1.0 + (gaps.empty() ? 0.0 : gaps[0]));
  detail::validate_gaps(gaps, slk);
  const double gamma = gamma_constant(params.p, params.mu, epsilon);
  CertificateReport report;
  report.id = "linear_rate";
  report.constants = {{"gamma", gamma},
                      {"contraction", 1.0 / (1.0 + gamma)},
                      {"slack", slk}};
  report.advisory = !params.exact;
  for (std::size_t n = 0; n + 1 < gaps.size(); ++n)
    report.margins.push_back(gaps[n] / (1.0 + gamma) + slk - gaps[n + 1]);
  report.finalize();
  return report;
}

// Superlinear bound for r > p:
//   zeta_{n+1} <= (p-1) (p^{r-p} eps^p / mu^r)^{1/(p-1)} zeta_n^{(r-1)/(p-1)}.
// Also reports the empirical order estimates log zeta_{n+1} / log zeta_n.
inline CertificateReport check_superlinear(const std::vector<double>& gaps,
                                           const ConvexityParams& params, double epsilon,
                                           double r, double slack_scale = 1e-10) {
  params.validate();
  require(r > params.p, "check_superlinear: requires r > p");
  const double slk = slack_scale * (1.0 + (gaps.empty() ? 0.0 : gaps[0]));
  detail::validate_gaps(gaps, slk);
  const double p = params.p;
  const double constant =
      (p - 1.0) *
      std::pow(std::pow(p, r - p) * std::pow(epsilon, p) / std::pow(params.mu, r),
               1.0 / (p - 1.0));
  const double exponent = (r - 1.0) / (p - 1.0);
  CertificateReport report;
  report.id = "superlinear_rate";
  report.constants = {{"constant", constant}, {"exponent", exponent}, {"slack", slk}};
  report.advisory = !params.exact;
  for (std::size_t n = 0; n + 1 < gaps.size(); ++n) {
    const double bound = constant * std::pow(detail::clamp0(gaps[n]), exponent);
    report.margins.push_back(bound + slk - gaps[n + 1]);
    const double zn = gaps[n], zn1 = gaps[n + 1];
    if (zn > 0.0 && zn < 1.0 && zn1 > 0.0 && zn1 < 1.0)
      report.empirical_orders.push_back(std::log(zn1) / std::log(zn));
  }
  report.finalize();
  return report;
}

// Sublinear envelope for 1 < r < p:
//   beta = p (r-1) / (p-r),
//   C_eps = (p/(p-1))^{r(p-1)/(p(r-1))} (mu^{r/p} / eps)^{1/(r-1)},
//   zeta_n <= zeta_0 / (1 + n/(beta+1) * log(1 + C_eps zeta_0^{1/beta}))^beta.
inline CertificateReport check_sublinear(const std::vector<double>& gaps,
                                         const ConvexityParams& params, double epsilon,
                                         double r, double slack_scale = 1e-10) {
  params.validate();
  require(r > 1.0 && r < params.p, "check_sublinear: requires 1 < r < p");
  const double slk = slack_scale * (1.0 + (gaps.empty() ? 0.0 : gaps[0]));
  detail::validate_gaps(gaps, slk);
  const double p = params.p;
  const double beta = p * (r - 1.0) / (p - r);
  const double c_eps = std::pow(p / (p - 1.0), r * (p - 1.0) / (p * (r - 1.0))) *
                       std::pow(std::pow(params.mu, r / p) / epsilon, 1.0 / (r - 1.0));
  const double zeta0 = detail::clamp0(gaps[0]);
  const double log_term = std::log(1.0 + c_eps * std::pow(zeta0, 1.0 / beta));
  CertificateReport report;
  report.id = "sublinear_rate";
  report.constants = {{"beta", beta}, {"c_eps", c_eps}, {"slack", slk}};
  report.advisory = !params.exact;
  for (std::size_t n = 0; n < gaps.size(); ++n) {
    const double envelope =
        zeta0 / std::pow(1.0 + (static_cast<double>(n) / (beta + 1.0)) * log_term, beta);
    report.margins.push_back(envelope + slk - gaps[n]);
  }
  report.finalize();
  return report;
}

// Primal bound from the dual gaps: the symmetrized Bregman distance to the
// constrained minimizer obeys
//   D^sym_{n+1} <= (r-1)(zeta_n - zeta_{n+1}) + (eps/r)(p/mu)^{r/p} zeta_{n+1}^{r/p}.
// dfsym[n] is the distance at outer iteration n+1 (aligned with the gap pair
// (zeta_n, zeta_{n+1})).
inline CertificateReport check_primal_bregman(const std::vector<double>& dfsym,
                                              const std::vector<double>& gaps,
                                              const ConvexityParams& params, double epsilon,
                                              double r, double slack_scale = 1e-10) {
  params.validate();
  require(r > 1.0, "check_primal_bregman: r must exceed 1");
  require(gaps.size() == dfsym.size() + 1,
          "check_primal_bregman: gaps must be one longer than dfsym");
  const double slk = slack_scale * (1.0 + (gaps.empty() ? 0.0 : gaps[0]));
  detail::validate_gaps(gaps, slk);
  const double p = params.p;
  const double coef = (epsilon / r) * std::pow(p / params.mu, r / p);
  CertificateReport report;
  report.id = "primal_bregman_bound";
  report.constants = {{"coef", coef}, {"slack", slk}};
  report.advisory = !params.exact;
  for (std::size_t n = 0; n + 1 < gaps.size(); ++n) {
    const double bound = (r - 1.0) * (gaps[n] - gaps[n + 1]) +
                         coef * std::pow(detail::clamp0(gaps[n + 1]), r / p);
    report.margins.push_back(bound + slk - dfsym[n]);
  }
  report.finalize();
  return report;
}

// Dual descent: E_d(lambda^n) - E_d(lambda^{n+1}) >= (eps/r) ||lambda^{n+1} -
// lambda^n||^r. energies has length N+1, increment_norms length N.
inline CertificateReport check_dual_descent(const std::vector<double>& energies,
                                            const std::vector<double>& increment_norms,
                                            double epsilon, double r,
                                            double slack_scale = 1e-8) {
  require(r > 1.0, "check_dual_descent: r must exceed 1");
  require(energies.size() == increment_norms.size() + 1,
          "check_dual_descent: energies must be one longer than increment_norms");
  require(energies.size() >= 2, "check_dual_descent: need at least two energies");
  const double slk = slack_scale * (1.0 + std::abs(energies[0]));
  CertificateReport report;
  report.id = "dual_descent";
  report.constants = {{"slack", slk}};
  for (std::size_t n = 0; n + 1 < energies.size(); ++n) {
    const double decrease = energies[n] - energies[n + 1];
    const double required = (epsilon / r) * std::pow(increment_norms[n], r);
    report.margins.push_back(decrease + slk - required);
  }
  report.finalize();
  return report;
}

// beta_B = inf_{sigma != 0} ||B^t sigma||_* / ||sigma||. Computed as
// sqrt(lambda_min(B B^t)), valid only when both spaces are Euclidean.
inline double beta_B(const ConstrainedProblem& problem) {
  require(problem.primal_space.kind == NormKind::euclidean &&
              problem.dual_space.kind == NormKind::euclidean,
          "beta_B: only Euclidean primal/dual norm pairs are supported");
  return std::sqrt(problem.BBt_smallest_eigenvalue);
}

// If F is (q, L)-weakly smooth and B surjective with constant beta_b, the
// dual energy is (p, mu)-uniformly convex with p = q* and mu = beta_b^p L^{-(p-1)}.
inline ConvexityParams dual_convexity_from_smoothness(const SmoothnessParams& smooth,
                                                      double beta_b) {
  smooth.validate();
  require(beta_b > 0.0, "dual_convexity_from_smoothness: beta_b must be positive");
  const double p = PowerPair::from_p(smooth.q).p_star;
  ConvexityParams out;
  out.p = p;
  out.mu = std::pow(beta_b, p) * std::pow(smooth.L, -(p - 1.0));
  out.exact = true;
  out.validate();
  return out;
}

// Convexity power of the s-power data-fitting energy: p = max{s*, 2}.
inline double p_for_data_fitting(double s) {
  require(s > 1.0, "p_for_data_fitting: s must exceed 1");
  return std::max(PowerPair::from_p(s).p_star, 2.0);
}

// Empirical lower estimate of the uniform-convexity constant over iterate
// pairs: min over pairs of p D_F(v, w) / ||v - w||^p. Marked non-exact;
// certificates built on it are advisory.
inline ConvexityParams empirical_convexity_mu(const FunctionalOracle& oracle,
                                              const NormedSpaceSpec& space,
                                              const std::vector<Vec>& points, double p) {
  require(p >= 2.0, "empirical_convexity_mu: p must be >= 2");
  require(points.size() >= 2, "empirical_convexity_mu: need at least two points");
  double mu = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double dist = norm(space, points[i] - points[j]);
      if (dist <= 1e-12) continue;
      const double estimate = p * bregman(oracle, points[i], points[j]) / std::pow(dist, p);
      if (estimate < mu) mu = estimate;
    }
  }
  require(std::isfinite(mu), "empirical_convexity_mu: all point pairs coincide");
  ConvexityParams out;
  out.p = p;
  out.mu = std::max(mu, 1e-300);
  out.exact = false;
  return out;
}

}  // namespace hoal

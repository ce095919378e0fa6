#pragma once

// High-order proximal point method: iterates
//   u^{n+1} = argmin_v  F(v) + (epsilon/r) ||v - u^n||^r
// with the norm of the supplied space, solving each subproblem by damped
// Newton warm-started at u^n. The first-order optimality condition of the
// step is  grad F(u^{n+1}) + epsilon J_r(u^{n+1} - u^n) = 0, whose Euclidean
// residual norm is recorded per iteration.

#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hoal/core.hpp"
#include "hoal/newton.hpp"
#include "hoal/normed_space.hpp"
#include "hoal/oracle.hpp"
#include "hoal/penalty.hpp"

namespace hoal {

struct PpmConfig {
  double r = 2.0;
  double epsilon = 1.0;
  int n_iters = 10;
  NewtonConfig inner;

  void validate() const {
    require(r > 1.0, "PpmConfig: order r must exceed 1");
    require(epsilon > 0.0, "PpmConfig: epsilon must be positive");
    require(n_iters >= 0, "PpmConfig: n_iters must be nonnegative");
    inner.validate();
  }
};

struct PpmTraceRow {
  Vec iterate;
  double objective = 0.0;
  double step_norm = 0.0;            // ||u^{n+1} - u^n|| in the space norm (0 in row 0)
  double optimality_residual = 0.0;  // row 0 records the plain gradient norm
  double energy_gap = std::numeric_limits<double>::quiet_NaN();  // F(u^n) - F(reference)
  double wall_ms = 0.0;
};

struct PpmTrace {
  std::vector<PpmTraceRow> rows;
  bool has_reference = false;
  std::string failure;  // nonempty if the run aborted; rows hold the partial trace

  bool failed() const { return !failure.empty(); }
};

// Subproblem oracle F(v) + (epsilon/r) ||v - anchor||^r.
inline FunctionalOracle ppm_subproblem_oracle(const FunctionalOracle& oracle,
                                              const NormedSpaceSpec& space, const Vec& anchor,
                                              double r, double epsilon) {
  const double clamp_floor = 1e-12;
  FunctionalOracle sub;
  sub.dim = oracle.dim;
  sub.value = [oracle, space, anchor, r, epsilon](const Vec& v) {
    return oracle.value(v) + power_term_value(space, v - anchor, r, epsilon);
  };
  sub.gradient = [oracle, space, anchor, r, epsilon](const Vec& v) {
    return Vec(oracle.gradient(v) + power_term_gradient(space, v - anchor, r, epsilon));
  };
  sub.hessian = [oracle, space, anchor, r, epsilon, clamp_floor](const Vec& v) {
    return Mat(oracle.hessian(v) +
               power_term_hessian(space, v - anchor, r, epsilon, clamp_floor));
  };
  return sub;
}

// One proximal step from u_n.
inline Vec ppm_step(const FunctionalOracle& oracle, const NormedSpaceSpec& space, const Vec& u_n,
                    const PpmConfig& cfg) {
  cfg.validate();
  require_dim(u_n.size(), oracle.dim, "ppm_step");
  const FunctionalOracle sub = ppm_subproblem_oracle(oracle, space, u_n, cfg.r, cfg.epsilon);
  KinkResidual kink;
  if (cfg.r < 2.0) kink = [u_n](const Vec& v) { return Vec(v - u_n); };
  const NewtonResult res = minimize_allow_floor(sub, u_n, cfg.inner, kink);
  return res.minimizer;
}

inline PpmTrace ppm_run(const FunctionalOracle& oracle, const NormedSpaceSpec& space,
                        const Vec& u0, const PpmConfig& cfg,
                        const std::optional<Vec>& reference = std::nullopt) {
  cfg.validate();
  require_dim(u0.size(), oracle.dim, "ppm_run");
  PpmTrace trace;
  trace.has_reference = reference.has_value();
  const double f_ref = reference ? oracle.value(*reference) : 0.0;

  PpmTraceRow row0;
  row0.iterate = u0;
  row0.objective = oracle.value(u0);
  row0.step_norm = 0.0;
  row0.optimality_residual = oracle.gradient(u0).norm();
  if (reference) row0.energy_gap = row0.objective - f_ref;
  trace.rows.push_back(std::move(row0));

  Vec u = u0;
  for (int n = 0; n < cfg.n_iters; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    Vec u_next;
    try {
      u_next = ppm_step(oracle, space, u, cfg);
    } catch (const Error& err) {
      trace.failure = "iteration " + std::to_string(n + 1) + ": " + err.what();
      return trace;
    }
    const auto t1 = std::chrono::steady_clock::now();
    PpmTraceRow row;
    row.iterate = u_next;
    row.objective = oracle.value(u_next);
    row.step_norm = norm(space, u_next - u);
    row.optimality_residual =
        (oracle.gradient(u_next) +
         power_term_gradient(space, u_next - u, cfg.r, cfg.epsilon))
            .norm();
    if (reference) row.energy_gap = row.objective - f_ref;
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    trace.rows.push_back(std::move(row));
    u = u_next;
  }
  return trace;
}

}  // namespace hoal

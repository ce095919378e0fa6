#pragma once

// High-order augmented Lagrangian method for
//   minimize F(v)  subject to  B v = g.
//
// Each outer iteration solves the primal subproblem
//   u^{n+1} = argmin_v F(v) + (lambda^n, Bv - g)
//                      + (1/(r* eps^{r*-1})) ||Bv - g||_*^{r*}
// (r* the Holder conjugate of r, ||.||_* the dual norm on the multiplier
// space) and then updates the multiplier by one of:
//   explicit: lambda^{n+1} = lambda^n + eps^{-(r*-1)} J_{r*}(B u^{n+1} - g),
//             which satisfies -(B u^{n+1} - g) + eps J_r(lambda^{n+1} -
//             lambda^n) = 0 exactly, but amplifies inner-solve inexactness
//             when r > 2 (the update scales like the residual to a power
//             below one);
//   stable:   lambda^{n+1} = -(B B^t)^{-1} B grad F(u^{n+1}), the
//             least-squares multiplier, insensitive to residual noise.
//
// The dual energy E_d(sigma) = F*(-B^t sigma) + (g, sigma) decreases along
// the iteration; at any subproblem solution the pair (u, lambda) satisfies
// grad F(u) + B^t lambda ~ 0, so E_d can be evaluated directly as
// -F(u) - (lambda, Bu - g) without a conjugate solve.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hoal/conjugate.hpp"
#include "hoal/core.hpp"
#include "hoal/linalg.hpp"
#include "hoal/newton.hpp"
#include "hoal/normed_space.hpp"
#include "hoal/oracle.hpp"
#include "hoal/penalty.hpp"
#include "hoal/ppm.hpp"

namespace hoal {

struct ConstrainedProblem {
  FunctionalOracle oracle;
  Mat B;
  Vec g;
  NormedSpaceSpec primal_space;
  NormedSpaceSpec dual_space;

  std::shared_ptr<const SpdFactorization> BBt_fact;
  double BBt_smallest_eigenvalue = 0.0;

  ConstrainedProblem(FunctionalOracle oracle_, Mat B_, Vec g_, NormedSpaceSpec primal,
                     NormedSpaceSpec dual)
      : oracle(std::move(oracle_)),
        B(std::move(B_)),
        g(std::move(g_)),
        primal_space(primal),
        dual_space(dual) {
    require_dim(B.cols(), oracle.dim, "ConstrainedProblem: B columns");
    require_dim(B.cols(), primal_space.dim, "ConstrainedProblem: primal space");
    require_dim(B.rows(), dual_space.dim, "ConstrainedProblem: dual space");
    require_dim(g.size(), B.rows(), "ConstrainedProblem: g");
    const Mat BBt = B * B.transpose();
    try {
      BBt_smallest_eigenvalue = smallest_eigenvalue_spd(BBt);
    } catch (const CholeskyError&) {
      throw DomainError("ConstrainedProblem: B B^t is not positive definite (B not surjective)");
    }
    require(BBt_smallest_eigenvalue > 1e-12,
            "ConstrainedProblem: B must have full row rank (smallest eigenvalue of B B^t "
            "must exceed 1e-12)");
    BBt_fact = std::make_shared<const SpdFactorization>(cholesky_factor(BBt));
  }

  // The space whose norm measures the constraint residual Bv - g (the dual
  // norm of the multiplier space; Euclidean spaces are self-dual).
  NormedSpaceSpec residual_space() const { return dual_space.dual(); }
};

enum class DualUpdate { explicit_formula, stable };

struct AlmConfig {
  double r = 2.0;
  double epsilon = 1.0;
  int n_iters = 10;
  DualUpdate dual_update = DualUpdate::stable;
  NewtonConfig inner;

  void validate() const {
    require(r > 1.0, "AlmConfig: order r must exceed 1");
    require(epsilon > 0.0, "AlmConfig: epsilon must be positive");
    require(n_iters >= 0, "AlmConfig: n_iters must be nonnegative");
    inner.validate();
  }
  double r_star() const { return PowerPair::from_p(r).p_star; }
};

struct AlmTraceRow {
  Vec u;
  Vec lambda;
  double feasibility = 0.0;  // ||B u - g||_2
  double dual_energy = std::numeric_limits<double>::quiet_NaN();
  bool dual_energy_fallback = false;  // true when a conjugate solve was needed
  double dual_gap = std::numeric_limits<double>::quiet_NaN();   // E_d(lambda) - E_d(lambda_ref)
  double primal_err = std::numeric_limits<double>::quiet_NaN();  // metric(u, u_ref)
  double dual_err = std::numeric_limits<double>::quiet_NaN();    // ||lambda - lambda_ref||_2
  double dfsym = std::numeric_limits<double>::quiet_NaN();  // symmetrized Bregman vs u_ref
  double wall_ms = 0.0;
};

struct AlmTrace {
  std::vector<AlmTraceRow> rows;
  bool has_reference = false;
  std::string failure;  // nonempty if the run aborted; rows hold the partial trace

  bool failed() const { return !failure.empty(); }
};

struct AlmReference {
  Vec u;
  Vec lambda;
};

// Subproblem oracle F(v) + (lambda, Bv - g) + (1/(r* eps^{r*-1})) ||Bv - g||_*^{r*}.
inline FunctionalOracle alm_subproblem_oracle(const ConstrainedProblem& problem, const Vec& lambda,
                                              double r, double epsilon) {
  const double r_star = PowerPair::from_p(r).p_star;
  const double coef = std::pow(epsilon, -(r_star - 1.0));
  const NormedSpaceSpec res_space = problem.residual_space();
  const double clamp_floor = 1e-12 * (1.0 + problem.g.norm());
  const FunctionalOracle& F = problem.oracle;
  const Mat& B = problem.B;
  const Vec& g = problem.g;
  FunctionalOracle sub;
  sub.dim = F.dim;
  sub.value = [&F, &B, &g, lambda, res_space, r_star, coef](const Vec& v) {
    const Vec res = B * v - g;
    return F.value(v) + lambda.dot(res) + power_term_value(res_space, res, r_star, coef);
  };
  sub.gradient = [&F, &B, &g, lambda, res_space, r_star, coef](const Vec& v) {
    const Vec res = B * v - g;
    return Vec(F.gradient(v) + B.transpose() * lambda +
               B.transpose() * power_term_gradient(res_space, res, r_star, coef));
  };
  sub.hessian = [&F, &B, &g, res_space, r_star, coef, clamp_floor](const Vec& v) {
    const Vec res = B * v - g;
    return Mat(F.hessian(v) +
               B.transpose() * power_term_hessian(res_space, res, r_star, coef, clamp_floor) * B);
  };
  return sub;
}

// Solves the primal subproblem, warm-starting at u_start.
inline Vec primal_step(const ConstrainedProblem& problem, const Vec& lambda, const Vec& u_start,
                       const AlmConfig& cfg) {
  cfg.validate();
  require_dim(lambda.size(), problem.dual_space.dim, "primal_step");
  require_dim(u_start.size(), problem.oracle.dim, "primal_step");
  const FunctionalOracle sub = alm_subproblem_oracle(problem, lambda, cfg.r, cfg.epsilon);
  KinkResidual kink;
  if (cfg.r_star() < 2.0) {
    const Mat& B = problem.B;
    const Vec& g = problem.g;
    kink = [&B, &g](const Vec& v) { return Vec(B * v - g); };
  }
  try {
    return minimize_allow_floor(sub, u_start, cfg.inner, kink).minimizer;
  } catch (const NewtonError& err) {
    throw NewtonError("primal subproblem (r=" + std::to_string(cfg.r) +
                          ", epsilon=" + std::to_string(cfg.epsilon) +
                          ", ||lambda||=" + std::to_string(lambda.norm()) + "): " + err.what(),
                      err.last_iterate, err.last_grad_norm);
  }
}

// Explicit multiplier update lambda + eps^{-(r*-1)} J_{r*}(B u - g), with the
// duality map taken in the residual space (dual norm of the multiplier
// space). A zero residual leaves the multiplier unchanged.
inline Vec dual_update_explicit(const ConstrainedProblem& problem, const Vec& lambda_n,
                                const Vec& u_next, const AlmConfig& cfg) {
  require_dim(lambda_n.size(), problem.dual_space.dim, "dual_update_explicit");
  require_dim(u_next.size(), problem.oracle.dim, "dual_update_explicit");
  const double r_star = cfg.r_star();
  const Vec res = problem.B * u_next - problem.g;
  const Vec jr = duality_map(problem.residual_space(), res, r_star);
  return lambda_n + std::pow(cfg.epsilon, -(r_star - 1.0)) * jr;
}

// Least-squares multiplier lambda = -(B B^t)^{-1} B grad F(u): B^t lambda is
// the projection of -grad F(u) onto range(B^t).
inline Vec dual_update_stable(const ConstrainedProblem& problem, const Vec& u_next) {
  require_dim(u_next.size(), problem.oracle.dim, "dual_update_stable");
  const Vec rhs = -(problem.B * problem.oracle.gradient(u_next));
  return problem.BBt_fact->solve(rhs);
}

struct DualEnergyValue {
  double value = 0.0;
  bool fallback_used = false;
};

namespace detail {
// Conjugate evaluation that tolerates a floor exit (used only for trace
// energies, never for the strict conjugate contract).
inline ConjugateValue conjugate_value_floor(const FunctionalOracle& oracle, const Vec& xi,
                                            const NewtonConfig& cfg) {
  const FunctionalOracle tilted = tilt_oracle(oracle, xi);
  const NewtonResult res = minimize_allow_floor(tilted, Vec::Zero(oracle.dim), cfg);
  ConjugateValue out;
  out.argmax = res.minimizer;
  out.value = xi.dot(res.minimizer) - oracle.value(res.minimizer);
  return out;
}
}  // namespace detail

// Dual energy E_d(lambda) = F*(-B^t lambda) + (g, lambda). When (u, lambda)
// satisfies the primal-dual relation grad F(u) = -B^t lambda (any subproblem
// solution paired with either multiplier update does, up to the inner
// tolerance), this equals -F(u) - (lambda, Bu - g) directly; otherwise the
// conjugate is evaluated numerically and fallback_used is set.
inline DualEnergyValue dual_energy_at_iterate(const ConstrainedProblem& problem, const Vec& u,
                                              const Vec& lambda, const NewtonConfig& inner) {
  require_dim(u.size(), problem.oracle.dim, "dual_energy_at_iterate");
  require_dim(lambda.size(), problem.dual_space.dim, "dual_energy_at_iterate");
  const Vec grad = problem.oracle.gradient(u);
  const Vec mismatch = grad + problem.B.transpose() * lambda;
  DualEnergyValue out;
  if (mismatch.norm() <= 1e-6 * (1.0 + grad.norm())) {
    out.value = -problem.oracle.value(u) - lambda.dot(problem.B * u - problem.g);
    return out;
  }
  out.fallback_used = true;
  const Vec xi = -(problem.B.transpose() * lambda);
  if (problem.oracle.quadratic) {
    out.value = problem.oracle.quadratic->conjugate(xi) + problem.g.dot(lambda);
    return out;
  }
  const ConjugateValue conj = detail::conjugate_value_floor(problem.oracle, xi, inner);
  out.value = conj.value + problem.g.dot(lambda);
  return out;
}

struct AlmRunOptions {
  std::optional<Vec> u0;                        // default: zero vector
  std::function<double(const Vec&, const Vec&)> primal_metric;  // default: Euclidean distance
  bool compute_dual_energy = true;
};

inline AlmTrace alm_run(const ConstrainedProblem& problem, const Vec& lambda0,
                        const AlmConfig& cfg,
                        const std::optional<AlmReference>& reference = std::nullopt,
                        const AlmRunOptions& options = {}) {
  cfg.validate();
  require_dim(lambda0.size(), problem.dual_space.dim, "alm_run");
  AlmTrace trace;
  trace.has_reference = reference.has_value();

  const auto primal_metric =
      options.primal_metric
          ? options.primal_metric
          : [](const Vec& a, const Vec& b) { return (a - b).norm(); };

  double dual_energy_ref = std::numeric_limits<double>::quiet_NaN();
  if (reference && options.compute_dual_energy)
    dual_energy_ref = dual_energy_at_iterate(problem, reference->u, reference->lambda,
                                             cfg.inner)
                          .value;

  Vec u = options.u0 ? *options.u0 : Vec(Vec::Zero(problem.oracle.dim));
  require_dim(u.size(), problem.oracle.dim, "alm_run: u0");
  Vec lambda = lambda0;

  auto record = [&](const Vec& u_row, const Vec& lambda_row, double wall_ms) {
    AlmTraceRow row;
    row.u = u_row;
    row.lambda = lambda_row;
    row.feasibility = (problem.B * u_row - problem.g).norm();
    if (options.compute_dual_energy) {
      const DualEnergyValue e = dual_energy_at_iterate(problem, u_row, lambda_row, cfg.inner);
      row.dual_energy = e.value;
      row.dual_energy_fallback = e.fallback_used;
      if (reference) row.dual_gap = e.value - dual_energy_ref;
    }
    if (reference) {
      row.primal_err = primal_metric(u_row, reference->u);
      row.dual_err = (lambda_row - reference->lambda).norm();
      row.dfsym = bregman_sym(problem.oracle, u_row, reference->u);
    }
    row.wall_ms = wall_ms;
    trace.rows.push_back(std::move(row));
  };

  record(u, lambda, 0.0);

  for (int n = 0; n < cfg.n_iters; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    Vec u_next;
    try {
      u_next = primal_step(problem, lambda, u, cfg);
    } catch (const Error& err) {
      trace.failure = "iteration " + std::to_string(n + 1) + ": " + err.what();
      return trace;
    }
    Vec lambda_next = cfg.dual_update == DualUpdate::explicit_formula
                          ? dual_update_explicit(problem, lambda, u_next, cfg)
                          : dual_update_stable(problem, u_next);
    const auto t1 = std::chrono::steady_clock::now();
    u = std::move(u_next);
    lambda = std::move(lambda_next);
    record(u, lambda, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Dual-side view: the proximal point method applied to the dual energy.
// ---------------------------------------------------------------------------

// Functional oracle for E_d(sigma) = F*(-B^t sigma) + (g, sigma). Uses the
// closed-form conjugate when F is exactly quadratic; otherwise each
// evaluation point solves one conjugate subproblem (cached per point).
inline FunctionalOracle make_dual_energy_oracle(const ConstrainedProblem& problem,
                                                const NewtonConfig& inner) {
  const int m = problem.dual_space.dim;
  const Mat B = problem.B;  // copied so the returned oracle is self-contained
  const Vec g = problem.g;
  if (problem.oracle.quadratic) {
    auto quad = problem.oracle.quadratic;
    // E_d(sigma) = 1/2 (A^{-1}(b - B^t sigma), b - B^t sigma) + (g, sigma);
    // Hessian B A^{-1} B^t is constant.
    auto dual_hess = std::make_shared<Mat>(m, m);
    {
      Mat AinvBt(B.cols(), m);
      for (int j = 0; j < m; ++j) AinvBt.col(j) = quad->A_fact->solve(B.transpose().col(j));
      *dual_hess = B * AinvBt;
    }
    FunctionalOracle o;
    o.dim = m;
    o.value = [quad, B, g](const Vec& sigma) {
      return quad->conjugate(-(B.transpose() * sigma)) + g.dot(sigma);
    };
    o.gradient = [quad, B, g](const Vec& sigma) {
      const Vec vhat = quad->conjugate_argmax(-(B.transpose() * sigma));
      return Vec(-(B * vhat) + g);
    };
    o.hessian = [dual_hess](const Vec&) { return *dual_hess; };
    return o;
  }
  struct Cache {
    bool valid = false;
    Vec sigma;
    Vec vhat;
    double fstar = 0.0;
  };
  auto cache = std::make_shared<Cache>();
  auto primal_oracle = std::make_shared<FunctionalOracle>(problem.oracle);
  auto eval = [cache, primal_oracle, B, inner](const Vec& sigma) {
    if (!cache->valid || cache->sigma != sigma) {
      const Vec xi = -(B.transpose() * sigma);
      const ConjugateValue conj = conjugate_value(*primal_oracle, xi, inner);
      cache->sigma = sigma;
      cache->vhat = conj.argmax;
      cache->fstar = conj.value;
      cache->valid = true;
    }
  };
  FunctionalOracle o;
  o.dim = m;
  o.value = [cache, eval, g](const Vec& sigma) {
    eval(sigma);
    return cache->fstar + g.dot(sigma);
  };
  o.gradient = [cache, eval, B, g](const Vec& sigma) {
    eval(sigma);
    return Vec(-(B * cache->vhat) + g);
  };
  o.hessian = [cache, eval, primal_oracle, B](const Vec& sigma) {
    eval(sigma);
    const SpdFactorization fact = cholesky_factor(primal_oracle->hessian(cache->vhat));
    Mat X(B.cols(), B.rows());
    for (int j = 0; j < B.rows(); ++j) X.col(j) = fact.solve(B.transpose().col(j));
    return Mat(B * X);
  };
  return o;
}

// Runs the proximal point method on the dual energy from sigma0. With exact
// subproblem solves and sigma0 = lambda0, the sigma iterates coincide with
// the multipliers produced by alm_run with the explicit update.
inline PpmTrace ppm_on_dual(const ConstrainedProblem& problem, const Vec& sigma0,
                            const PpmConfig& cfg,
                            const std::optional<Vec>& reference = std::nullopt) {
  require_dim(sigma0.size(), problem.dual_space.dim, "ppm_on_dual");
  const FunctionalOracle dual_oracle = make_dual_energy_oracle(problem, cfg.inner);
  return ppm_run(dual_oracle, problem.dual_space, sigma0, cfg, reference);
}

}  // namespace hoal

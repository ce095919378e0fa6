#pragma once

// Damped Newton minimizer for smooth strictly convex functionals, used for all
// primal subproblems and conjugate evaluations.
//
// Core scheme: Newton direction from a Cholesky factorization of the Hessian
// (with a doubling diagonal regularization fallback), Armijo backtracking line
// search, gradient-norm stopping.
//
// Three refinements matter for objectives containing ||residual||^q terms with
// q < 2 (whose gradient has a cusp where the residual vanishes) and for runs
// that descend to the floating-point floor:
//
//   * noise-tolerant acceptance: a trial step is accepted when it satisfies
//     the Armijo inequality up to an absolute allowance of
//     value_noise_rel * (1 + |f(x)|); genuine decreases near the
//     floating-point floor are smaller than representable relative change, and
//     a strict test would reject them.
//   * kink-crossing trial: a full Newton step across the residual cusp lands
//     on the mirror image of the current point and makes almost no progress.
//     At the first trial the step length t_c at which the affine residual
//     crosses zero is also evaluated, and the better of the two values is
//     taken.
//   * stagnation exit: once several consecutive accepted steps decrease the
//     value by no more than the noise allowance, the iterate has reached the
//     attainable floor and the solve stops there.
//
// Exit semantics: meeting the gradient tolerance is convergence. Stagnation,
// line-search exhaustion, and the iteration cap are floor exits: minimize()
// treats them as failures (strict contract), while minimize_allow_floor()
// returns the reached iterate, which is how the outer solvers consume
// subproblem solves at the floating-point floor (objectives with gradient
// cusps can crawl in tiny accepted steps without ever stagnating formally).
// Encountering a non-finite value or gradient is always a hard failure.

#include <cmath>
#include <functional>
#include <iostream>
#include <string>

#include "hoal/core.hpp"
#include "hoal/linalg.hpp"
#include "hoal/oracle.hpp"

namespace hoal {

struct NewtonStepRecord {
  int iteration = 0;
  double f_before = 0.0;
  double f_after = 0.0;
  double step_length = 0.0;
  double directional_derivative = 0.0;  // (grad, direction) at the iterate
  double grad_norm = 0.0;
  int backtracks = 0;
};

struct NewtonConfig {
  double grad_tol_abs = 1e-11;
  double grad_tol_rel = 1e-9;  // scaled by (1 + initial gradient norm)
  int max_iters = 200;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 60;
  double hess_reg_init = 1e-12;
  // Floor-handling refinements (see header comment).
  double value_noise_rel = 4e-15;
  int stagnation_limit = 8;
  bool verbose = false;
  std::ostream* log_stream = nullptr;  // defaults to std::clog when verbose
  // Invoked after every accepted step; used for logging and invariant checks.
  std::function<void(const NewtonStepRecord&)> step_observer;

  void validate() const {
    require(grad_tol_abs > 0.0, "NewtonConfig: grad_tol_abs must be positive");
    require(grad_tol_rel >= 0.0, "NewtonConfig: grad_tol_rel must be nonnegative");
    require(max_iters >= 1, "NewtonConfig: max_iters must be >= 1");
    require(armijo_c > 0.0 && armijo_c < 0.5, "NewtonConfig: armijo_c must lie in (0, 0.5)");
    require(backtrack_factor > 0.0 && backtrack_factor < 1.0,
            "NewtonConfig: backtrack_factor must lie in (0, 1)");
    require(max_backtracks >= 1, "NewtonConfig: max_backtracks must be >= 1");
    require(hess_reg_init > 0.0, "NewtonConfig: hess_reg_init must be positive");
    require(value_noise_rel >= 0.0, "NewtonConfig: value_noise_rel must be nonnegative");
    require(stagnation_limit >= 1, "NewtonConfig: stagnation_limit must be >= 1");
  }
};

enum class NewtonExit { gradient_tol, stagnation, backtracks_exhausted, iteration_cap };

struct NewtonResult {
  Vec minimizer;
  int iterations = 0;
  double final_grad_norm = 0.0;
  int backtrack_total = 0;
  NewtonExit exit = NewtonExit::gradient_tol;

  bool converged() const { return exit == NewtonExit::gradient_tol; }
};

// Affine map v -> residual(v) whose norm carries a sub-quadratic power in the
// objective; enables the kink-crossing trial step.
using KinkResidual = std::function<Vec(const Vec&)>;

namespace detail {

inline NewtonResult newton_impl(const FunctionalOracle& oracle, const Vec& x0,
                                const NewtonConfig& cfg, const KinkResidual& kink_residual) {
  cfg.validate();
  require_dim(x0.size(), oracle.dim, "newton");
  std::ostream* log = cfg.verbose ? (cfg.log_stream ? cfg.log_stream : &std::clog) : nullptr;

  Vec x = x0;
  double f0 = oracle.value(x);
  if (!std::isfinite(f0))
    throw NewtonError("newton: non-finite objective value at the starting point", x, 0.0);

  double g0_norm = -1.0;
  int backtrack_total = 0;
  int stall = 0;
  NewtonResult res;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Vec g = oracle.gradient(x);
    const double g_norm = g.norm();
    if (!std::isfinite(g_norm))
      throw NewtonError("newton: non-finite gradient at iteration " + std::to_string(iter), x,
                        g_norm);
    if (g0_norm < 0.0) g0_norm = g_norm;
    const double threshold = cfg.grad_tol_abs + cfg.grad_tol_rel * (1.0 + g0_norm);
    if (log)
      (*log) << "newton iter=" << iter << " value=" << f0 << " grad_norm=" << g_norm << "\n";
    if (g_norm <= threshold) {
      res.minimizer = x;
      res.iterations = iter;
      res.final_grad_norm = g_norm;
      res.backtrack_total = backtrack_total;
      res.exit = NewtonExit::gradient_tol;
      return res;
    }

    // Newton direction; regularize the Hessian until it factors and yields a
    // descent direction.
    const Mat H = oracle.hessian(x);
    double tau = 0.0;
    Vec d;
    double gd = 0.0;
    for (;;) {
      try {
        const Mat Hreg = tau == 0.0 ? H : Mat(H + tau * Mat::Identity(H.rows(), H.cols()));
        const SpdFactorization fact = cholesky_factor(Hreg);
        d = -fact.solve(g);
        gd = g.dot(d);
        if (gd < 0.0 && std::isfinite(gd)) break;
      } catch (const CholeskyError&) {
        // fall through to bump tau
      }
      const double base =
          cfg.hess_reg_init * (1.0 + std::abs(H.trace()) / static_cast<double>(H.rows()));
      tau = std::max(2.0 * tau, base);
      if (!std::isfinite(tau) || tau > 1e40)
        throw NewtonError("newton: Hessian regularization diverged at iteration " +
                              std::to_string(iter),
                          x, g_norm);
    }

    const double noise = cfg.value_noise_rel * (1.0 + std::abs(f0));
    double t = 1.0;
    double f1 = 0.0;
    bool accepted = false;
    int bt = 0;
    for (; bt < cfg.max_backtracks; ++bt) {
      if (bt == 0) {
        f1 = oracle.value(x + d);
        if (kink_residual) {
          // Step length at which the affine residual along d crosses zero.
          const Vec r0 = kink_residual(x);
          const Vec dr = kink_residual(x + d) - r0;
          const double dr2 = dr.squaredNorm();
          if (dr2 > 0.0) {
            const double tc = -r0.dot(dr) / dr2;
            if (tc > 1e-12 && tc < 1.0 - 1e-12) {
              const double fc = oracle.value(x + tc * d);
              if (std::isfinite(fc) && (!std::isfinite(f1) || fc < f1)) {
                f1 = fc;
                t = tc;
              }
            }
          }
        }
      } else {
        f1 = oracle.value(x + t * d);
      }
      if (std::isfinite(f1) && f1 <= f0 + cfg.armijo_c * t * gd + noise) {
        accepted = true;
        break;
      }
      t *= cfg.backtrack_factor;
    }
    backtrack_total += bt;

    if (!accepted) {
      res.minimizer = x;
      res.iterations = iter + 1;
      res.final_grad_norm = g_norm;
      res.backtrack_total = backtrack_total;
      res.exit = NewtonExit::backtracks_exhausted;
      return res;
    }

    if (cfg.step_observer) {
      NewtonStepRecord rec;
      rec.iteration = iter;
      rec.f_before = f0;
      rec.f_after = f1;
      rec.step_length = t;
      rec.directional_derivative = gd;
      rec.grad_norm = g_norm;
      rec.backtracks = bt;
      cfg.step_observer(rec);
    }

    x += t * d;
    stall = (f0 - f1 <= noise) ? stall + 1 : 0;
    f0 = f1;
    if (stall >= cfg.stagnation_limit) {
      res.minimizer = x;
      res.iterations = iter + 1;
      res.final_grad_norm = oracle.gradient(x).norm();
      res.backtrack_total = backtrack_total;
      res.exit = NewtonExit::stagnation;
      return res;
    }
  }
  res.minimizer = x;
  res.iterations = cfg.max_iters;
  res.final_grad_norm = oracle.gradient(x).norm();
  res.backtrack_total = backtrack_total;
  res.exit = NewtonExit::iteration_cap;
  return res;
}

}  // namespace detail

// Strict minimization: any exit other than meeting the gradient tolerance is
// reported as a failure.
inline NewtonResult minimize(const FunctionalOracle& oracle, const Vec& x0,
                             const NewtonConfig& cfg, const KinkResidual& kink_residual = {}) {
  NewtonResult res = detail::newton_impl(oracle, x0, cfg, kink_residual);
  if (res.exit == NewtonExit::backtracks_exhausted)
    throw NewtonError("newton: line search exhausted without an acceptable step",
                      res.minimizer, res.final_grad_norm);
  if (res.exit == NewtonExit::stagnation)
    throw NewtonError("newton: stalled at the value-noise floor before meeting the tolerance",
                      res.minimizer, res.final_grad_norm);
  if (res.exit == NewtonExit::iteration_cap)
    throw NewtonError("newton: iteration cap exceeded (max_iters = " +
                          std::to_string(cfg.max_iters) + ")",
                      res.minimizer, res.final_grad_norm);
  return res;
}

// Floor-tolerant minimization: stagnation, line-search exhaustion, and the
// iteration cap return the reached iterate (the attainable floor) instead of
// failing. Non-finite values and gradients still throw.
inline NewtonResult minimize_allow_floor(const FunctionalOracle& oracle, const Vec& x0,
                                         const NewtonConfig& cfg,
                                         const KinkResidual& kink_residual = {}) {
  return detail::newton_impl(oracle, x0, cfg, kink_residual);
}

}  // namespace hoal

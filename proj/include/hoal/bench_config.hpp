#pragma once

// Experiment configuration: JSON schema, validation, canonical problem
// fingerprints, and instantiation of the benchmark problems.
//
// Config schema (schema_version 1), flat keys except the problem block:
//   {
//     "schema_version": 1,
//     "problem": {
//       "kind": "location" | "finite_neuron" | "graph_df" | "quadratic",
//       ... kind-specific keys, see ProblemSpec ...
//     },
//     "r": 2.0,              // penalty exponent, > 1
//     "epsilon": 1.0,        // penalty weight, > 0
//     "n_iters": 30,         // outer iterations, >= 0
//     "dual_update": "stable" | "explicit",
//     "inner": { "grad_tol_abs": ..., "grad_tol_rel": ..., "max_iters": ...,
//                "max_backtracks": ... }          // optional overrides
//   }

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "hoal/alm.hpp"
#include "hoal/core.hpp"
#include "hoal/newton.hpp"
#include "hoal/problems.hpp"

namespace hoal {

using Json = nlohmann::json;

// Formats a double with 17 significant digits (lossless for binary64).
inline std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

// 64-bit FNV-1a hash of a byte string.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Problem specification.
// ---------------------------------------------------------------------------

struct ProblemSpec {
  std::string kind;  // "location" | "finite_neuron" | "graph_df" | "quadratic"

  // location: n (variables), J (anchors), s, seed
  int n = 10;
  int J = 100;
  double s = 3.0;
  std::uint64_t seed = 1;

  // finite_neuron: N (neurons), s
  int N = 64;

  // graph_df: m (cells per side), coefficients, seed
  int m = 4;
  double mu_visc = 1.0, rho = 1.0, K = 1.0, beta_f = 10.0;

  // quadratic: dim, n_constraints, seed
  int dim = 12;
  int n_constraints = 3;

  // Canonical serialization used for fingerprinting: kind-specific keys in a
  // fixed order, floats at 17 significant digits.
  std::string canonical() const {
    std::string out = kind;
    auto add = [&out](const char* key, const std::string& val) {
      out += ';';
      out += key;
      out += '=';
      out += val;
    };
    if (kind == "location") {
      add("n", std::to_string(n));
      add("J", std::to_string(J));
      add("s", fmt17(s));
      add("seed", std::to_string(seed));
    } else if (kind == "finite_neuron") {
      add("N", std::to_string(N));
      add("s", fmt17(s));
    } else if (kind == "graph_df") {
      add("m", std::to_string(m));
      add("mu_visc", fmt17(mu_visc));
      add("rho", fmt17(rho));
      add("K", fmt17(K));
      add("beta_f", fmt17(beta_f));
      add("seed", std::to_string(seed));
    } else if (kind == "quadratic") {
      add("dim", std::to_string(dim));
      add("n_constraints", std::to_string(n_constraints));
      add("seed", std::to_string(seed));
    } else {
      throw ConfigError("unknown problem kind: '" + kind + "'");
    }
    return out;
  }

  std::string fingerprint() const { return to_hex(fnv1a64(canonical())); }
};

inline void to_json(Json& j, const ProblemSpec& p) {
  j = Json{{"kind", p.kind}};
  if (p.kind == "location") {
    j["n"] = p.n;
    j["J"] = p.J;
    j["s"] = p.s;
    j["seed"] = p.seed;
  } else if (p.kind == "finite_neuron") {
    j["N"] = p.N;
    j["s"] = p.s;
  } else if (p.kind == "graph_df") {
    j["m"] = p.m;
    j["mu_visc"] = p.mu_visc;
    j["rho"] = p.rho;
    j["K"] = p.K;
    j["beta_f"] = p.beta_f;
    j["seed"] = p.seed;
  } else if (p.kind == "quadratic") {
    j["dim"] = p.dim;
    j["n_constraints"] = p.n_constraints;
    j["seed"] = p.seed;
  }
}

namespace detail {

template <typename T>
T json_get(const Json& j, const char* key, std::optional<T> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(std::string("missing config key '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline void from_json(const Json& j, ProblemSpec& p) {
  p.kind = detail::json_get<std::string>(j, "kind");
  if (p.kind == "location") {
    p.n = detail::json_get<int>(j, "n");
    p.J = detail::json_get<int>(j, "J");
    p.s = detail::json_get<double>(j, "s");
    p.seed = detail::json_get<std::uint64_t>(j, "seed");
  } else if (p.kind == "finite_neuron") {
    p.N = detail::json_get<int>(j, "N");
    p.s = detail::json_get<double>(j, "s");
  } else if (p.kind == "graph_df") {
    p.m = detail::json_get<int>(j, "m");
    p.mu_visc = detail::json_get<double>(j, "mu_visc", 1.0);
    p.rho = detail::json_get<double>(j, "rho", 1.0);
    p.K = detail::json_get<double>(j, "K", 1.0);
    p.beta_f = detail::json_get<double>(j, "beta_f", 10.0);
    p.seed = detail::json_get<std::uint64_t>(j, "seed");
  } else if (p.kind == "quadratic") {
    p.dim = detail::json_get<int>(j, "dim");
    p.n_constraints = detail::json_get<int>(j, "n_constraints");
    p.seed = detail::json_get<std::uint64_t>(j, "seed");
  } else {
    throw ConfigError("unknown problem kind: '" + p.kind + "'");
  }
}

// ---------------------------------------------------------------------------
// Experiment configuration.
// ---------------------------------------------------------------------------

struct ExperimentConfig {
  ProblemSpec problem;
  double r = 2.0;
  double epsilon = 1.0;
  int n_iters = 30;
  DualUpdate dual_update = DualUpdate::stable;
  NewtonConfig inner;

  void validate() const {
    if (!(r > 1.0)) throw ConfigError("r must exceed 1");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (n_iters < 0) throw ConfigError("n_iters must be nonnegative");
    problem.canonical();  // throws on unknown kind
    try {
      inner.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("inner solver settings: ") + e.what());
    }
  }

  AlmConfig alm_config() const {
    AlmConfig cfg;
    cfg.r = r;
    cfg.epsilon = epsilon;
    cfg.n_iters = n_iters;
    cfg.dual_update = dual_update;
    cfg.inner = inner;
    return cfg;
  }
};

inline const char* dual_update_name(DualUpdate u) {
  return u == DualUpdate::stable ? "stable" : "explicit";
}

inline DualUpdate dual_update_from_name(const std::string& name) {
  if (name == "stable") return DualUpdate::stable;
  if (name == "explicit") return DualUpdate::explicit_formula;
  throw ConfigError("dual_update must be 'stable' or 'explicit', got '" + name + "'");
}

inline void to_json(Json& j, const ExperimentConfig& c) {
  j = Json{{"schema_version", 1},
           {"problem", c.problem},
           {"r", c.r},
           {"epsilon", c.epsilon},
           {"n_iters", c.n_iters},
           {"dual_update", dual_update_name(c.dual_update)}};
  Json inner;
  if (c.inner.grad_tol_abs != NewtonConfig{}.grad_tol_abs)
    inner["grad_tol_abs"] = c.inner.grad_tol_abs;
  if (c.inner.grad_tol_rel != NewtonConfig{}.grad_tol_rel)
    inner["grad_tol_rel"] = c.inner.grad_tol_rel;
  if (c.inner.max_iters != NewtonConfig{}.max_iters) inner["max_iters"] = c.inner.max_iters;
  if (c.inner.max_backtracks != NewtonConfig{}.max_backtracks)
    inner["max_backtracks"] = c.inner.max_backtracks;
  if (!inner.empty()) j["inner"] = inner;
}

inline void from_json(const Json& j, ExperimentConfig& c) {
  const int version = detail::json_get<int>(j, "schema_version", 1);
  if (version != 1)
    throw ConfigError("unsupported config schema_version " + std::to_string(version));
  if (!j.contains("problem")) throw ConfigError("missing config key 'problem'");
  c.problem = j.at("problem").get<ProblemSpec>();
  c.r = detail::json_get<double>(j, "r", 2.0);
  c.epsilon = detail::json_get<double>(j, "epsilon", 1.0);
  c.n_iters = detail::json_get<int>(j, "n_iters", 30);
  c.dual_update =
      dual_update_from_name(detail::json_get<std::string>(j, "dual_update", std::string("stable")));
  c.inner = NewtonConfig{};
  if (j.contains("inner")) {
    const Json& in = j.at("inner");
    c.inner.grad_tol_abs =
        detail::json_get<double>(in, "grad_tol_abs", c.inner.grad_tol_abs);
    c.inner.grad_tol_rel =
        detail::json_get<double>(in, "grad_tol_rel", c.inner.grad_tol_rel);
    c.inner.max_iters = detail::json_get<int>(in, "max_iters", c.inner.max_iters);
    c.inner.max_backtracks =
        detail::json_get<int>(in, "max_backtracks", c.inner.max_backtracks);
  }
  c.validate();
}

inline ExperimentConfig parse_config(const Json& j) {
  try {
    return j.get<ExperimentConfig>();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Problem instantiation.
// ---------------------------------------------------------------------------

using PrimalMetric = std::function<double(const Vec&, const Vec&)>;

struct ProblemInstance {
  ProblemSpec spec;
  ConstrainedProblem problem;
  PrimalMetric primal_metric;                 // metric for the primal error column
  std::optional<std::pair<Vec, Vec>> exact;   // exact (u, lambda) when known
  std::optional<double> exact_smoothness_L;   // largest curvature when known exactly
};

inline ProblemInstance instantiate_problem(const ProblemSpec& spec) {
  const PrimalMetric euclid = [](const Vec& a, const Vec& b) { return (a - b).norm(); };
  if (spec.kind == "location") {
    require(spec.s > 1.0, "location: s must exceed 1");
    LocationProblem lp = make_location(spec.n, spec.J, spec.s, spec.seed);
    return ProblemInstance{spec, std::move(lp.problem), euclid, std::nullopt, std::nullopt};
  }
  if (spec.kind == "finite_neuron") {
    require(spec.s > 1.0, "finite_neuron: s must exceed 1");
    FiniteNeuronProblem fp = make_finite_neuron(spec.N, spec.s);
    const double s = spec.s;
    const int N = spec.N;
    PrimalMetric metric = [s, N](const Vec& a, const Vec& b) {
      return w1s_seminorm_distance(a, b, s, N);
    };
    return ProblemInstance{spec, std::move(fp.problem), std::move(metric), std::nullopt,
                           std::nullopt};
  }
  if (spec.kind == "graph_df") {
    GraphDarcyForchheimer gp =
        make_graph_df(spec.m, spec.mu_visc, spec.rho, spec.K, spec.beta_f, spec.seed);
    return ProblemInstance{spec, std::move(gp.problem), euclid, std::nullopt, std::nullopt};
  }
  if (spec.kind == "quadratic") {
    QuadraticKktFixture fx = make_quadratic_fixture(spec.dim, spec.n_constraints, spec.seed);
    return ProblemInstance{spec, std::move(fx.problem), euclid,
                           std::make_pair(fx.u_exact, fx.lambda_exact), fx.L_primal};
  }
  throw ConfigError("unknown problem kind: '" + spec.kind + "'");
}

}  // namespace hoal

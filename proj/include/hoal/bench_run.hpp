#pragma once

// Experiment execution: reference-solution cache, trace CSV emission,
// empirical rate classification, parameter sweeps, the paired
// explicit-vs-stable dual-update experiment, and certificate reports.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "hoal/bench_config.hpp"
#include "hoal/certificates.hpp"

namespace hoal {

namespace fs = std::filesystem;

inline constexpr const char* kTraceVersionLine = "# hoal-trace-v1";
inline constexpr const char* kTraceHeader =
    "iter,primal_err,dual_err,feasibility,dual_gap,dfsym,wall_ms";

// Reference protocol: zero initial guesses, stable dual update, r=2, eps=1,
// 1000 outer iterations, inner gradient tolerance 1e-13 (absolute).
inline constexpr double kReferenceR = 2.0;
inline constexpr double kReferenceEpsilon = 1.0;
inline constexpr int kReferenceIterations = 1000;
inline constexpr double kReferenceInnerTol = 1e-13;

// ---------------------------------------------------------------------------
// Reference solutions.
// ---------------------------------------------------------------------------

struct ReferenceSolution {
  std::string fingerprint;
  Vec u;
  Vec lambda;
  bool cache_hit = false;   // true when loaded from disk without solving
  int iterations_run = 0;   // 0 on cache hit
  fs::path path;
};

inline fs::path reference_path(const fs::path& dir, const ProblemSpec& spec) {
  return dir / ("ref_" + spec.fingerprint() + ".json");
}

namespace detail {

inline std::string reference_payload_string(const Vec& u, const Vec& lambda) {
  std::string payload;
  for (Eigen::Index i = 0; i < u.size(); ++i) payload += fmt17(u[i]) + ";";
  payload += "|";
  for (Eigen::Index i = 0; i < lambda.size(); ++i) payload += fmt17(lambda[i]) + ";";
  return payload;
}

inline Json vec_to_json(const Vec& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

inline Vec vec_from_json(const Json& arr) {
  Vec v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

// Attempts to load a cached reference; returns nullopt when the file is
// missing, unreadable, has a mismatched fingerprint, or fails its checksum.
inline std::optional<ReferenceSolution> try_load_reference(const fs::path& path,
                                                           const ProblemSpec& spec) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  Json j;
  try {
    in >> j;
    if (j.at("schema_version").get<int>() != 1) return std::nullopt;
    if (j.at("fingerprint").get<std::string>() != spec.fingerprint()) return std::nullopt;
    Vec u = vec_from_json(j.at("u_ref"));
    Vec lambda = vec_from_json(j.at("lambda_ref"));
    const std::string checksum = j.at("checksum").get<std::string>();
    if (checksum != to_hex(fnv1a64(reference_payload_string(u, lambda))))
      return std::nullopt;
    ReferenceSolution ref;
    ref.fingerprint = spec.fingerprint();
    ref.u = std::move(u);
    ref.lambda = std::move(lambda);
    ref.cache_hit = true;
    ref.path = path;
    return ref;
  } catch (...) {
    return std::nullopt;
  }
}

}  // namespace detail

// Computes (or loads from cache) the reference solution for the problem in
// `config`, persisting it as <out_dir>/ref_<fingerprint>.json. A valid cached
// file makes this a no-op; a corrupted or mismatched file is recomputed.
inline ReferenceSolution compute_reference(const ExperimentConfig& config,
                                           const fs::path& out_dir) {
  const ProblemSpec& spec = config.problem;
  const fs::path path = reference_path(out_dir, spec);
  if (auto cached = detail::try_load_reference(path, spec)) return *cached;

  ProblemInstance inst = instantiate_problem(spec);
  AlmConfig alm;
  alm.r = kReferenceR;
  alm.epsilon = kReferenceEpsilon;
  alm.n_iters = kReferenceIterations;
  alm.dual_update = DualUpdate::stable;
  alm.inner = config.inner;
  alm.inner.grad_tol_abs = kReferenceInnerTol;
  alm.inner.grad_tol_rel = 0.0;
  AlmRunOptions opts;
  opts.compute_dual_energy = false;
  AlmTrace trace = alm_run(inst.problem, Vec(Vec::Zero(inst.problem.dual_space.dim)),
                           alm, std::nullopt, opts);
  if (trace.failed())
    throw NewtonError("reference solve failed: " + trace.failure, Vec(), 0.0);

  ReferenceSolution ref;
  ref.fingerprint = spec.fingerprint();
  ref.u = trace.rows.back().u;
  ref.lambda = trace.rows.back().lambda;
  ref.cache_hit = false;
  ref.iterations_run = static_cast<int>(trace.rows.size()) - 1;
  ref.path = path;

  Json j;
  j["schema_version"] = 1;
  j["fingerprint"] = ref.fingerprint;
  j["problem"] = spec;
  j["protocol"] = Json{{"r", kReferenceR},
                       {"epsilon", kReferenceEpsilon},
                       {"iterations", kReferenceIterations},
                       {"inner_tol", kReferenceInnerTol},
                       {"dual_update", "stable"}};
  j["u_ref"] = detail::vec_to_json(ref.u);
  j["lambda_ref"] = detail::vec_to_json(ref.lambda);
  j["checksum"] = to_hex(fnv1a64(detail::reference_payload_string(ref.u, ref.lambda)));
  fs::create_directories(out_dir);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write reference file " + path.string());
  out << j.dump(2) << "\n";
  return ref;
}

// ---------------------------------------------------------------------------
// Trace CSV emission.
// ---------------------------------------------------------------------------

namespace detail {

// A NaN value renders as an empty CSV cell (used for the reference-comparison
// columns when no reference is present).
inline std::string csv_cell(double v) { return std::isnan(v) ? std::string() : fmt17(v); }

}  // namespace detail

inline void write_trace_csv(const AlmTrace& trace, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write trace CSV " + path.string());
  out << kTraceVersionLine << "\n" << kTraceHeader << "\n";
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    const AlmTraceRow& row = trace.rows[i];
    out << i << ',' << detail::csv_cell(row.primal_err) << ','
        << detail::csv_cell(row.dual_err) << ',' << detail::csv_cell(row.feasibility)
        << ',' << detail::csv_cell(row.dual_gap) << ',' << detail::csv_cell(row.dfsym)
        << ',' << detail::csv_cell(row.wall_ms) << "\n";
  }
}

struct RunResult {
  fs::path csv_path;
  AlmTrace trace;
  bool used_reference = false;
  bool solver_failed = false;
  std::string failure;
};

// Runs one ALM experiment and writes <out_dir>/trace.csv plus the serialized
// config (with the reference fingerprint) as <out_dir>/config.json.
// `reference` may be null only when explicitly allowed; the reference-derived
// columns are then empty. A solver failure still writes the partial trace.
inline RunResult run_experiment(const ExperimentConfig& config, const fs::path& out_dir,
                                const ReferenceSolution* reference) {
  config.validate();
  ProblemInstance inst = instantiate_problem(config.problem);

  std::optional<AlmReference> ref;
  if (reference) {
    if (reference->fingerprint != config.problem.fingerprint())
      throw ConfigError("reference fingerprint " + reference->fingerprint +
                        " does not match problem fingerprint " +
                        config.problem.fingerprint());
    ref = AlmReference{reference->u, reference->lambda};
  }

  AlmRunOptions opts;
  opts.primal_metric = inst.primal_metric;
  AlmTrace trace = alm_run(inst.problem, Vec(Vec::Zero(inst.problem.dual_space.dim)),
                           config.alm_config(), ref, opts);

  fs::create_directories(out_dir);
  Json cfg_json = config;
  cfg_json["reference_fingerprint"] = reference ? reference->fingerprint : "";
  {
    std::ofstream out(out_dir / "config.json");
    if (!out) throw ConfigError("cannot write " + (out_dir / "config.json").string());
    out << cfg_json.dump(2) << "\n";
  }
  const fs::path csv_path = out_dir / "trace.csv";
  write_trace_csv(trace, csv_path);

  RunResult res;
  res.csv_path = csv_path;
  res.used_reference = reference != nullptr;
  res.solver_failed = trace.failed();
  res.failure = trace.failure;
  res.trace = std::move(trace);
  return res;
}

// ---------------------------------------------------------------------------
// Empirical rate classification.
// ---------------------------------------------------------------------------

enum class RateClass { linear, superlinear, sublinear, unclassified };

inline const char* rate_class_name(RateClass c) {
  switch (c) {
    case RateClass::linear: return "linear";
    case RateClass::superlinear: return "superlinear";
    case RateClass::sublinear: return "sublinear";
    default: return "unclassified";
  }
}

struct RateClassification {
  RateClass cls = RateClass::unclassified;
  std::vector<double> ratios;  // successive error ratios on the kept prefix
  int kept = 0;                // number of error entries kept after truncation

  // Linear or faster: no ratio ever reaches the sublinear window.
  bool at_least_linear() const {
    if (cls == RateClass::linear || cls == RateClass::superlinear) return true;
    if (ratios.empty()) return false;
    return std::all_of(ratios.begin(), ratios.end(),
                       [](double q) { return q < 0.99; });
  }
};

// Classifies a decreasing error sequence by successive-ratio tests.
// The sequence is truncated at the first entry within 2x of its minimum or
// below 1e-11 of its initial value (either way, the solver floor: entries
// beyond that measure arithmetic noise, not the rate); on the kept prefix
// with ratios q_n = e_{n+1}/e_n:
//   superlinear  iff q_last <= 0.1 * q_first  (ratios collapse),
//   sublinear    iff the mean of the last (up to) 10 ratios is >= 0.99
//                     (ratios approach 1),
//   linear       iff every ratio lies in [1e-3, 0.99).
inline RateClassification classify_rates(const std::vector<double>& errors) {
  RateClassification out;
  if (errors.size() < 3) return out;
  const double floor = std::max(*std::min_element(errors.begin(), errors.end()),
                                1e-11 * errors.front() / 2.0);
  std::size_t kept = errors.size();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] <= 2.0 * floor) {
      kept = i + 1;
      break;
    }
  }
  out.kept = static_cast<int>(kept);
  if (kept < 3) return out;
  for (std::size_t i = 0; i + 1 < kept; ++i) {
    if (!(errors[i] > 0.0)) return out;
    out.ratios.push_back(errors[i + 1] / errors[i]);
  }
  const double q_first = out.ratios.front();
  const double q_last = out.ratios.back();
  const std::size_t tail = std::min<std::size_t>(10, out.ratios.size());
  double tail_mean = 0.0;
  for (std::size_t i = out.ratios.size() - tail; i < out.ratios.size(); ++i)
    tail_mean += out.ratios[i];
  tail_mean /= static_cast<double>(tail);

  if (q_last <= 0.1 * q_first) {
    out.cls = RateClass::superlinear;
  } else if (tail_mean >= 0.99) {
    out.cls = RateClass::sublinear;
  } else if (std::all_of(out.ratios.begin(), out.ratios.end(),
                         [](double q) { return q >= 1e-3 && q < 0.99; })) {
    out.cls = RateClass::linear;
  }
  return out;
}

inline std::vector<double> dual_errors_of(const AlmTrace& trace) {
  std::vector<double> errs;
  errs.reserve(trace.rows.size());
  for (const AlmTraceRow& row : trace.rows) errs.push_back(row.dual_err);
  return errs;
}

// ---------------------------------------------------------------------------
// Parameter sweep.
// ---------------------------------------------------------------------------

inline const std::vector<double>& default_sweep_r() {
  static const std::vector<double> v{1.5, 2.0, 3.0, 4.0};
  return v;
}
inline const std::vector<double>& default_sweep_epsilon() {
  static const std::vector<double> v{1.0, 0.1, 0.01};
  return v;
}

struct SweepEntry {
  double r = 0.0, epsilon = 0.0;
  bool ok = false;
  std::string failure;
  std::string label;
  double final_primal_err = std::numeric_limits<double>::quiet_NaN();
  double final_dual_err = std::numeric_limits<double>::quiet_NaN();
  double final_feasibility = std::numeric_limits<double>::quiet_NaN();
  RateClassification classification;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  fs::path summary_path;
  bool any_failure = false;
};

namespace detail {

inline std::string grid_label(double r, double epsilon) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "r%g_eps%g", r, epsilon);
  return std::string(buf);
}

}  // namespace detail

// Runs the (r, epsilon) grid; each point writes its own subdirectory of
// out_dir. Grid points run concurrently in batches of `jobs`. The summary
// (summary.json) records final errors and the empirical rate class per point.
inline SweepResult sweep(const ExperimentConfig& base, std::vector<double> r_list,
                         std::vector<double> eps_list, const fs::path& out_dir,
                         int jobs = 1, bool grid_is_default = false) {
  base.validate();
  require(jobs >= 1, "sweep: jobs must be >= 1");
  fs::create_directories(out_dir);

  SweepResult result;
  std::vector<std::pair<double, double>> grid;
  for (double r : r_list)
    for (double eps : eps_list) grid.emplace_back(r, eps);
  result.entries.resize(grid.size());

  std::optional<ReferenceSolution> reference;
  if (!grid.empty()) reference = compute_reference(base, out_dir);

  auto run_point = [&](std::size_t idx) {
    SweepEntry& entry = result.entries[idx];
    entry.r = grid[idx].first;
    entry.epsilon = grid[idx].second;
    entry.label = detail::grid_label(entry.r, entry.epsilon);
    ExperimentConfig cfg = base;
    cfg.r = entry.r;
    cfg.epsilon = entry.epsilon;
    try {
      RunResult run = run_experiment(cfg, out_dir / entry.label, &*reference);
      entry.ok = !run.solver_failed;
      entry.failure = run.failure;
      if (!run.trace.rows.empty()) {
        const AlmTraceRow& last = run.trace.rows.back();
        entry.final_primal_err = last.primal_err;
        entry.final_dual_err = last.dual_err;
        entry.final_feasibility = last.feasibility;
      }
      entry.classification = classify_rates(dual_errors_of(run.trace));
    } catch (const Error& e) {
      entry.ok = false;
      entry.failure = e.what();
    }
  };

  for (std::size_t start = 0; start < grid.size(); start += static_cast<std::size_t>(jobs)) {
    std::vector<std::thread> batch;
    const std::size_t end = std::min(grid.size(), start + static_cast<std::size_t>(jobs));
    for (std::size_t i = start; i < end; ++i) batch.emplace_back(run_point, i);
    for (std::thread& t : batch) t.join();
  }

  Json summary;
  summary["schema_version"] = 1;
  summary["problem"] = base.problem;
  summary["grid"] = grid_is_default ? "default" : "custom";
  summary["reference_fingerprint"] = reference ? reference->fingerprint : "";
  Json runs = Json::array();
  for (const SweepEntry& e : result.entries) {
    Json run{{"r", e.r},
             {"epsilon", e.epsilon},
             {"label", e.label},
             {"status", e.ok ? "ok" : "failed"},
             {"classification", rate_class_name(e.classification.cls)}};
    if (!e.ok) run["failure"] = e.failure;
    if (!std::isnan(e.final_primal_err)) run["final_primal_err"] = e.final_primal_err;
    if (!std::isnan(e.final_dual_err)) run["final_dual_err"] = e.final_dual_err;
    if (!std::isnan(e.final_feasibility)) run["final_feasibility"] = e.final_feasibility;
    runs.push_back(std::move(run));
    result.any_failure = result.any_failure || !e.ok;
  }
  summary["runs"] = std::move(runs);
  result.summary_path = out_dir / "summary.json";
  std::ofstream out(result.summary_path);
  if (!out) throw ConfigError("cannot write " + result.summary_path.string());
  out << summary.dump(2) << "\n";
  return result;
}

// ---------------------------------------------------------------------------
// Paired explicit-vs-stable dual-update experiment.
// ---------------------------------------------------------------------------

struct StabilityResult {
  fs::path explicit_csv, stable_csv, comparison_csv;
  AlmTrace explicit_trace, stable_trace;
  std::optional<int> first_divergence;  // first iter with explicit > 10x stable
  bool any_failure = false;
};

// Runs the same configuration twice, differing only in the dual-update kind,
// and records the first iteration (if any) at which the explicit update's
// dual error exceeds the stable update's by a factor of 10.
inline StabilityResult stability_experiment(const ExperimentConfig& base,
                                            const fs::path& out_dir) {
  base.validate();
  fs::create_directories(out_dir);
  ReferenceSolution reference = compute_reference(base, out_dir);

  StabilityResult res;
  for (DualUpdate kind : {DualUpdate::explicit_formula, DualUpdate::stable}) {
    ExperimentConfig cfg = base;
    cfg.dual_update = kind;
    const bool is_stable = kind == DualUpdate::stable;
    RunResult run =
        run_experiment(cfg, out_dir / (is_stable ? "stable" : "explicit"), &reference);
    res.any_failure = res.any_failure || run.solver_failed;
    if (is_stable) {
      res.stable_csv = run.csv_path;
      res.stable_trace = std::move(run.trace);
    } else {
      res.explicit_csv = run.csv_path;
      res.explicit_trace = std::move(run.trace);
    }
  }

  const std::size_t n =
      std::min(res.explicit_trace.rows.size(), res.stable_trace.rows.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double de_e = res.explicit_trace.rows[i].dual_err;
    const double de_s = res.stable_trace.rows[i].dual_err;
    if (!std::isnan(de_e) && !std::isnan(de_s) && de_e > 10.0 * de_s) {
      res.first_divergence = static_cast<int>(i);
      break;
    }
  }

  res.comparison_csv = out_dir / "comparison.csv";
  std::ofstream out(res.comparison_csv);
  if (!out) throw ConfigError("cannot write " + res.comparison_csv.string());
  out << "first_divergence_iter,explicit_final_dual_err,stable_final_dual_err\n";
  out << (res.first_divergence ? std::to_string(*res.first_divergence) : std::string())
      << ',';
  const auto final_de = [](const AlmTrace& t) {
    return t.rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                          : t.rows.back().dual_err;
  };
  out << detail::csv_cell(final_de(res.explicit_trace)) << ','
      << detail::csv_cell(final_de(res.stable_trace)) << "\n";
  return res;
}

// ---------------------------------------------------------------------------
// Certificates over a run.
// ---------------------------------------------------------------------------

struct CertifyResult {
  std::vector<CertificateReport> reports;
  fs::path report_path;
  bool non_advisory_failure = false;
  bool advisory_warning = false;  // an advisory certificate did not pass
};

namespace detail {

// Resolves the dual convexity parameters (p, mu) for a problem. Exact for the
// quadratic fixture (largest primal curvature known by construction);
// otherwise empirical (advisory) from sampled Bregman ratios of the dual
// energy along the trace multipliers.
inline ConvexityParams resolve_dual_convexity(const ProblemInstance& inst,
                                              const AlmTrace& trace) {
  const double beta = beta_B(inst.problem);
  if (inst.exact_smoothness_L) {
    return dual_convexity_from_smoothness(SmoothnessParams{2.0, *inst.exact_smoothness_L},
                                          beta);
  }
  FunctionalOracle dual_energy = make_dual_energy_oracle(inst.problem, NewtonConfig{});
  std::vector<Vec> points;
  for (const AlmTraceRow& row : trace.rows) {
    points.push_back(row.lambda);
    if (points.size() >= 12) break;
  }
  ConvexityParams params =
      empirical_convexity_mu(dual_energy, inst.problem.dual_space, points, 2.0);
  return params;
}

}  // namespace detail

// Runs the configured experiment against its reference and evaluates the
// selected certificates ("linear" | "superlinear" | "sublinear" |
// "primal_bregman" | "dual_descent", or "auto" = rate check picked by r vs p
// plus the Bregman and descent checks).
inline CertifyResult certify(const ExperimentConfig& config,
                             const std::vector<std::string>& selection,
                             const fs::path& out_dir) {
  config.validate();
  ProblemInstance inst = instantiate_problem(config.problem);
  ReferenceSolution reference = compute_reference(config, out_dir);
  RunResult run = run_experiment(config, out_dir / "certify_run", &reference);
  if (run.solver_failed)
    throw NewtonError("certify: solver failed: " + run.failure, Vec(), 0.0);

  const AlmTrace& trace = run.trace;
  ConvexityParams params = detail::resolve_dual_convexity(inst, trace);

  std::vector<double> gaps, dfsym, energies, increments;
  for (std::size_t i = 0; i < trace.rows.size(); ++i) {
    gaps.push_back(trace.rows[i].dual_gap);
    energies.push_back(trace.rows[i].dual_energy);
    if (i > 0) {
      dfsym.push_back(trace.rows[i].dfsym);
      increments.push_back(
          dual_norm(inst.problem.dual_space,
                    Vec(trace.rows[i].lambda - trace.rows[i - 1].lambda)));
    }
  }

  std::vector<std::string> selected = selection;
  if (selected.empty() || (selected.size() == 1 && selected[0] == "auto")) {
    selected.clear();
    if (config.r == params.p)
      selected.push_back("linear");
    else if (config.r > params.p)
      selected.push_back("superlinear");
    else
      selected.push_back("sublinear");
    selected.push_back("primal_bregman");
    selected.push_back("dual_descent");
  }

  CertifyResult res;
  for (const std::string& name : selected) {
    CertificateReport rep;
    if (name == "linear") {
      rep = check_linear(gaps, params, config.epsilon);
    } else if (name == "superlinear") {
      rep = check_superlinear(gaps, params, config.epsilon, config.r);
    } else if (name == "sublinear") {
      rep = check_sublinear(gaps, params, config.epsilon, config.r);
    } else if (name == "primal_bregman") {
      rep = check_primal_bregman(dfsym, gaps, params, config.epsilon, config.r);
    } else if (name == "dual_descent") {
      rep = check_dual_descent(energies, increments, config.epsilon, config.r);
      rep.advisory = false;  // needs no convexity constant
    } else {
      throw ConfigError("unknown certificate '" + name + "'");
    }
    if (name != "dual_descent") rep.advisory = !params.exact;
    res.non_advisory_failure = res.non_advisory_failure || (!rep.pass && !rep.advisory);
    res.advisory_warning = res.advisory_warning || (!rep.pass && rep.advisory);
    res.reports.push_back(std::move(rep));
  }

  Json j;
  j["schema_version"] = 1;
  j["problem"] = config.problem;
  j["r"] = config.r;
  j["epsilon"] = config.epsilon;
  j["p"] = params.p;
  j["mu"] = params.mu;
  j["mu_exact"] = params.exact;
  j["warning"] = res.advisory_warning;
  Json reports = Json::array();
  for (const CertificateReport& rep : res.reports) {
    Json rj{{"id", rep.id},
            {"pass", rep.pass},
            {"advisory", rep.advisory},
            {"worst_iteration", rep.worst_iteration}};
    rj["constants"] = rep.constants;
    rj["margins"] = rep.margins;
    if (!rep.empirical_orders.empty()) rj["empirical_orders"] = rep.empirical_orders;
    reports.push_back(std::move(rj));
  }
  j["reports"] = std::move(reports);
  res.report_path = out_dir / "certificates.json";
  std::ofstream out(res.report_path);
  if (!out) throw ConfigError("cannot write " + res.report_path.string());
  out << j.dump(2) << "\n";
  return res;
}

}  // namespace hoal

#pragma once

// Benchmark problem gallery:
//   * LocationProblem        — anchored l^s data fitting with the first
//                              coordinate pinned to zero.
//   * FiniteNeuronProblem    — one-dimensional s-power diffusion energy over a
//                              span of ReLU ridge functions with a boundary
//                              constraint at x = 1.
//   * GraphDarcyForchheimer  — quadratic-plus-cubic edge-flux energy on a grid
//                              graph with a discrete-divergence constraint.
//   * QuadraticKktFixture    — random quadratic with linear constraints and an
//                              exact saddle point from a dense KKT solve.

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "hoal/alm.hpp"
#include "hoal/core.hpp"
#include "hoal/oracle.hpp"
#include "hoal/rng.hpp"

namespace hoal {

// Magnitudes |t|^{s-2} in Hessians of s-power terms are evaluated with |t|
// floored at this value when s < 2, keeping curvature finite at the kink.
// Gradients are never clamped.
inline constexpr double kOracleHessianClamp = 1e-10;

// ---------------------------------------------------------------------------
// Location problem.
// ---------------------------------------------------------------------------

struct LocationProblem {
  int n = 0;
  int J = 0;
  double s = 2.0;
  std::uint64_t seed = 0;
  Mat anchors;  // J x n, coordinates uniform on [-1, 1)
  ConstrainedProblem problem;
};

// F(v) = (1/s) sum_j sum_i |v_i - a_{j,i}|^s, constraint v_1 = 0.
inline FunctionalOracle make_location_oracle(const Mat& anchors, double s) {
  const int n = static_cast<int>(anchors.cols());
  auto A = std::make_shared<const Mat>(anchors);
  FunctionalOracle o;
  o.dim = n;
  o.value = [A, s, n](const Vec& v) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < A->rows(); ++j)
      for (int i = 0; i < n; ++i) acc += std::pow(std::abs(v[i] - (*A)(j, i)), s);
    return acc / s;
  };
  o.gradient = [A, s, n](const Vec& v) {
    Vec grad = Vec::Zero(n);
    for (Eigen::Index j = 0; j < A->rows(); ++j)
      for (int i = 0; i < n; ++i) grad[i] += sign_power(v[i] - (*A)(j, i), s - 1.0);
    return grad;
  };
  o.hessian = [A, s, n](const Vec& v) {
    Vec diag = Vec::Zero(n);
    for (Eigen::Index j = 0; j < A->rows(); ++j)
      for (int i = 0; i < n; ++i) {
        double mag = std::abs(v[i] - (*A)(j, i));
        if (s < 2.0) mag = std::max(mag, kOracleHessianClamp);
        diag[i] += std::pow(mag, s - 2.0);
      }
    return Mat(((s - 1.0) * diag).asDiagonal());
  };
  return o;
}

inline LocationProblem make_location(int n, int J, double s, std::uint64_t seed) {
  require(n >= 2, "make_location: n must be >= 2");
  require(J >= 1, "make_location: J must be >= 1");
  require(s > 1.0, "make_location: s must exceed 1");
  Rng rng(seed);
  Mat anchors = rng.uniform_pm1_matrix(J, n);
  Mat B = Mat::Zero(1, n);
  B(0, 0) = 1.0;
  return LocationProblem{
      n, J, s, seed, anchors,
      ConstrainedProblem(make_location_oracle(anchors, s), B, Vec::Zero(1),
                         NormedSpaceSpec::Euclidean(n), NormedSpaceSpec::Euclidean(1))};
}

// ---------------------------------------------------------------------------
// Finite-neuron problem.
// ---------------------------------------------------------------------------

struct FiniteNeuronProblem {
  int N = 0;
  double s = 2.0;
  ConstrainedProblem problem;
};

// Decision variable c in R^N; derivative partial sums S_k = sum_{i<=k} c_i;
// F(c) = (1/(sN)) sum_k |S_k|^s - sum_i c_i (1 - t_i)^2 / 2 with knots
// t_i = (i-1)/N and unit load. The represented function is
// v(x) = sum_i c_i relu(x - t_i); the constraint v(1) = 0 is the row
// B_i = 1 - t_i = (N - i + 1)/N.
inline FunctionalOracle make_finite_neuron_oracle(int N, double s) {
  auto load = std::make_shared<Vec>(N);
  for (int i = 0; i < N; ++i) {
    const double t = static_cast<double>(i) / N;  // t_{i+1} = i/N (0-based index)
    (*load)[i] = (1.0 - t) * (1.0 - t) / 2.0;
  }
  FunctionalOracle o;
  o.dim = N;
  auto partial_sums = [N](const Vec& c) {
    Vec S(N);
    double acc = 0.0;
    for (int k = 0; k < N; ++k) {
      acc += c[k];
      S[k] = acc;
    }
    return S;
  };
  o.value = [N, s, load, partial_sums](const Vec& c) {
    const Vec S = partial_sums(c);
    double acc = 0.0;
    for (int k = 0; k < N; ++k) acc += std::pow(std::abs(S[k]), s);
    return acc / (s * N) - load->dot(c);
  };
  o.gradient = [N, s, load, partial_sums](const Vec& c) {
    const Vec S = partial_sums(c);
    Vec grad(N);
    double suffix = 0.0;
    for (int i = N - 1; i >= 0; --i) {
      suffix += sign_power(S[i], s - 1.0);
      grad[i] = suffix / N - (*load)[i];
    }
    return grad;
  };
  o.hessian = [N, s, partial_sums](const Vec& c) {
    const Vec S = partial_sums(c);
    // H = T^t D T with T lower-triangular ones and D_kk = (s-1)|S_k|^{s-2}/N,
    // so H(i,j) = sum_{k >= max(i,j)} D_kk.
    Vec suffix(N + 1);
    suffix[N] = 0.0;
    for (int k = N - 1; k >= 0; --k) {
      double mag = std::abs(S[k]);
      if (s < 2.0) mag = std::max(mag, kOracleHessianClamp);
      suffix[k] = suffix[k + 1] + (s - 1.0) * std::pow(mag, s - 2.0) / N;
    }
    Mat H(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) H(i, j) = suffix[std::max(i, j)];
    return H;
  };
  return o;
}

inline FiniteNeuronProblem make_finite_neuron(int N, double s) {
  require(N >= 2, "make_finite_neuron: N must be >= 2");
  require(s > 1.0, "make_finite_neuron: s must exceed 1");
  Mat B(1, N);
  for (int i = 0; i < N; ++i) B(0, i) = static_cast<double>(N - i) / N;  // 1 - t_{i+1}
  return FiniteNeuronProblem{
      N, s,
      ConstrainedProblem(make_finite_neuron_oracle(N, s), B, Vec::Zero(1),
                         NormedSpaceSpec::Euclidean(N), NormedSpaceSpec::Euclidean(1))};
}

// Exact minimizer of the 1D s-power diffusion problem with unit load and
// homogeneous boundary values: u(x) = (1/s*) [ (1/2)^{s*} - |x - 1/2|^{s*} ].
inline double slap_exact_solution(double s, double x) {
  require(s > 1.0, "slap_exact_solution: s must exceed 1");
  require(x >= 0.0 && x <= 1.0, "slap_exact_solution: x must lie in [0, 1]");
  const double s_star = s / (s - 1.0);
  return (std::pow(0.5, s_star) - std::pow(std::abs(x - 0.5), s_star)) / s_star;
}

// Seminorm distance between two coefficient vectors: the l^s mean of the
// derivative partial-sum differences, ((1/N) sum_k |S_k(c1) - S_k(c2)|^s)^{1/s}.
inline double w1s_seminorm_distance(const Vec& c1, const Vec& c2, double s, int N) {
  require(c1.size() == c2.size(), "w1s_seminorm_distance: length mismatch");
  require(N == c1.size(), "w1s_seminorm_distance: N must match the coefficient length");
  require(s > 1.0, "w1s_seminorm_distance: s must exceed 1");
  double acc = 0.0;
  double S = 0.0;
  for (int k = 0; k < N; ++k) {
    S += c1[k] - c2[k];
    acc += std::pow(std::abs(S), s);
  }
  return std::pow(acc / N, 1.0 / s);
}

// ---------------------------------------------------------------------------
// Grid-graph Darcy-Forchheimer analog.
// ---------------------------------------------------------------------------

struct GraphDarcyForchheimer {
  int m = 0;  // cells per side
  double mu_visc = 1.0, rho = 1.0, K = 1.0, beta_f = 10.0;
  std::uint64_t seed = 0;
  int n_edges = 0;
  ConstrainedProblem problem;
};

// Edge fluxes v on an m x m cell grid; B is the signed cell-edge incidence
// (discrete divergence). Interior edges join adjacent cells; every boundary
// face gets an edge to a ghost exterior cell, which makes B surjective and
// B B^t the five-point Laplacian stencil with Dirichlet-like diagonal 4.
// F(v) = sum_e [ (mu_visc/(2 rho K)) v_e^2 + (beta_f/(3 rho)) |v_e|^3 - f_e v_e ],
// with f_e = 0; cell sources g are seeded uniform on [-1, 1).
inline GraphDarcyForchheimer make_graph_df(int m, double mu_visc, double rho, double K,
                                           double beta_f, std::uint64_t seed) {
  require(m >= 2, "make_graph_df: m must be >= 2");
  require(mu_visc > 0.0 && rho > 0.0 && K > 0.0 && beta_f >= 0.0,
          "make_graph_df: coefficients must be positive (beta_f nonnegative)");
  const int n_cells = m * m;
  const auto cell = [m](int i, int j) { return i * m + j; };
  // Deterministic edge order: horizontal interior (row-major), vertical
  // interior (row-major), then boundary edges (top, bottom, left, right).
  std::vector<std::pair<int, int>> edges;  // (from_cell, to_cell), -1 = ghost
  for (int i = 0; i < m; ++i)
    for (int j = 0; j + 1 < m; ++j) edges.emplace_back(cell(i, j), cell(i, j + 1));
  for (int i = 0; i + 1 < m; ++i)
    for (int j = 0; j < m; ++j) edges.emplace_back(cell(i, j), cell(i + 1, j));
  for (int j = 0; j < m; ++j) edges.emplace_back(cell(0, j), -1);
  for (int j = 0; j < m; ++j) edges.emplace_back(cell(m - 1, j), -1);
  for (int i = 0; i < m; ++i) edges.emplace_back(cell(i, 0), -1);
  for (int i = 0; i < m; ++i) edges.emplace_back(cell(i, m - 1), -1);
  const int n_edges = static_cast<int>(edges.size());

  Mat B = Mat::Zero(n_cells, n_edges);
  for (int e = 0; e < n_edges; ++e) {
    B(edges[e].first, e) = 1.0;
    if (edges[e].second >= 0) B(edges[e].second, e) = -1.0;
  }

  const double lin = mu_visc / (rho * K);
  const double cub = beta_f / rho;
  FunctionalOracle o;
  o.dim = n_edges;
  o.value = [lin, cub, n_edges](const Vec& v) {
    double acc = 0.0;
    for (int e = 0; e < n_edges; ++e) {
      const double a = std::abs(v[e]);
      acc += 0.5 * lin * v[e] * v[e] + (cub / 3.0) * a * a * a;
    }
    return acc;
  };
  o.gradient = [lin, cub, n_edges](const Vec& v) {
    Vec grad(n_edges);
    for (int e = 0; e < n_edges; ++e) grad[e] = lin * v[e] + cub * std::abs(v[e]) * v[e];
    return grad;
  };
  o.hessian = [lin, cub, n_edges](const Vec& v) {
    Vec diag(n_edges);
    for (int e = 0; e < n_edges; ++e) diag[e] = lin + 2.0 * cub * std::abs(v[e]);
    return Mat(diag.asDiagonal());
  };

  Rng rng(seed);
  Vec g = rng.uniform_pm1_vector(n_cells);
  return GraphDarcyForchheimer{
      m,      mu_visc, rho, K, beta_f, seed, n_edges,
      ConstrainedProblem(std::move(o), std::move(B), std::move(g),
                         NormedSpaceSpec::Euclidean(n_edges),
                         NormedSpaceSpec::Euclidean(n_cells))};
}

inline GraphDarcyForchheimer make_graph_df(int m, std::uint64_t seed) {
  return make_graph_df(m, 1.0, 1.0, 1.0, 10.0, seed);
}

// ---------------------------------------------------------------------------
// Quadratic fixture with an exact saddle point.
// ---------------------------------------------------------------------------

struct QuadraticKktFixture {
  int dim = 0;
  int n_constraints = 0;
  std::uint64_t seed = 0;
  Mat A;
  Vec b;
  Mat B;
  Vec g;
  Vec u_exact;
  Vec lambda_exact;
  double mu_primal = 1.0;  // smallest eigenvalue of A (prescribed spectrum)
  double L_primal = 10.0;  // largest eigenvalue of A
  ConstrainedProblem problem;
};

// A = Q^t diag(linspace(1, 10, dim)) Q with a seeded random orthogonal Q;
// b, B, g seeded uniform; the exact (u, lambda) solves the saddle-point
// system [A B^t; B 0] [u; lambda] = [b; g].
inline QuadraticKktFixture make_quadratic_fixture(int dim, int n_constraints,
                                                  std::uint64_t seed) {
  require(dim >= 2, "make_quadratic_fixture: dim must be >= 2");
  require(n_constraints >= 1 && n_constraints < dim,
          "make_quadratic_fixture: need 1 <= n_constraints < dim");
  Rng rng(seed);
  const Mat M = rng.uniform_pm1_matrix(dim, dim);
  const Mat Q = Eigen::HouseholderQR<Mat>(M).householderQ();
  Vec spectrum(dim);
  for (int i = 0; i < dim; ++i)
    spectrum[i] = 1.0 + 9.0 * static_cast<double>(i) / (dim - 1);
  Mat A = Q.transpose() * spectrum.asDiagonal() * Q;
  A = 0.5 * (A + A.transpose());  // enforce exact symmetry
  const Vec b = rng.uniform_pm1_vector(dim);
  const Mat B = rng.uniform_pm1_matrix(n_constraints, dim);
  const Vec g = rng.uniform_pm1_vector(n_constraints);

  Mat kkt = Mat::Zero(dim + n_constraints, dim + n_constraints);
  kkt.topLeftCorner(dim, dim) = A;
  kkt.topRightCorner(dim, n_constraints) = B.transpose();
  kkt.bottomLeftCorner(n_constraints, dim) = B;
  Vec rhs(dim + n_constraints);
  rhs.head(dim) = b;
  rhs.tail(n_constraints) = g;
  const Vec sol = Eigen::PartialPivLU<Mat>(kkt).solve(rhs);

  QuadraticKktFixture fx{dim,
                         n_constraints,
                         seed,
                         A,
                         b,
                         B,
                         g,
                         sol.head(dim),
                         sol.tail(n_constraints),
                         1.0,
                         10.0,
                         ConstrainedProblem(make_quadratic_oracle(A, b), B, g,
                                            NormedSpaceSpec::Euclidean(dim),
                                            NormedSpaceSpec::Euclidean(n_constraints))};
  return fx;
}

}  // namespace hoal

#pragma once

// Common aliases, error types, and scalar helpers shared by the library.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace hoal {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// ---------------------------------------------------------------------------
// Error hierarchy.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& what) : Error(what) {}
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(what) {}
};

// Thrown when a symmetric matrix turns out not to be positive definite; the
// index of the failing pivot is reported.
struct CholeskyError : Error {
  int pivot_index;  // -1 when the failure is not tied to a pivot
  explicit CholeskyError(int pivot)
      : Error("matrix is not positive definite: nonpositive pivot at index " +
              std::to_string(pivot)),
        pivot_index(pivot) {}
  explicit CholeskyError(const std::string& what) : Error(what), pivot_index(-1) {}
};

// Thrown when conjugate gradients fails to reach the requested tolerance; the
// relative residual history of the whole run is attached for diagnosis.
struct CgError : Error {
  std::vector<double> residual_history;
  CgError(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}
};

// Thrown when the damped Newton solver fails hard (iteration cap exceeded or a
// non-finite value/gradient was encountered); carries the last iterate.
struct NewtonError : Error {
  Vec last_iterate;
  double last_grad_norm;
  NewtonError(const std::string& what, Vec iterate, double grad_norm)
      : Error(what), last_iterate(std::move(iterate)), last_grad_norm(grad_norm) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw DomainError(what);
}

inline void require_dim(Eigen::Index got, Eigen::Index want, const std::string& where) {
  if (got != want)
    throw DimensionError(where + ": dimension mismatch, got " + std::to_string(got) +
                         ", expected " + std::to_string(want));
}

// ---------------------------------------------------------------------------
// Scalar helpers.
// ---------------------------------------------------------------------------

// sign(t) * |t|^e, with the continuous extension 0 at t = 0 (valid for e > 0).
inline double sign_power(double t, double e) {
  if (t == 0.0) return 0.0;
  return t > 0.0 ? std::pow(t, e) : -std::pow(-t, e);
}

inline double sign(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

}  // namespace hoal

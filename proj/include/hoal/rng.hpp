#pragma once

// Deterministic pseudo-random number generation. The generator is fully
// specified here (splitmix64) so that seeded problem instances are
// reproducible bit-for-bit across platforms and standard-library versions.

#include <cstdint>

#include "hoal/core.hpp"

namespace hoal {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [-1, 1).
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  Vec uniform_pm1_vector(int dim) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform_pm1();
    return v;
  }

  Mat uniform_pm1_matrix(int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = uniform_pm1();
    return m;
  }

 private:
  std::uint64_t state_;
};

}  // namespace hoal

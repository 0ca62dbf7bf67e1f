#pragma once

// Deterministic helpers shared by the test binaries.  The generator matches
// no library internals; it only has to be reproducible across platforms.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "sdmpdf/sdm.hpp"

namespace testutil {

struct TestRng {
  std::uint64_t state;
  explicit TestRng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t x = (state += 0x9E3779B97F4A7C15ULL);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double normal() {
    // Box-Muller; discard the second value for simplicity.
    double u1 = 0.0;
    while (u1 == 0.0) u1 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * unit());
  }
};

// Random positive definite unit-trace Hermitian matrix (well conditioned).
inline sdmpdf::Sdm random_sdm(int n, std::uint64_t seed) {
  TestRng rng(seed);
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {rng.normal(), rng.normal()};
  Eigen::MatrixXcd s = m * m.adjoint() + 0.1 * double(n) * Eigen::MatrixXcd::Identity(n, n);
  sdmpdf::Sdm out;
  out.matrix = s / s.trace().real();
  return out;
}

// Random Hermitian matrix with unit Frobenius norm (not necessarily PSD).
inline Eigen::MatrixXcd random_hermitian(int n, std::uint64_t seed) {
  TestRng rng(seed);
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {rng.normal(), rng.normal()};
  Eigen::MatrixXcd h = 0.5 * (m + m.adjoint());
  return h / h.norm();
}

}  // namespace testutil

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>

namespace gla {

// All draws below are derived from raw mt19937_64 output rather than the
// standard distribution classes, whose sequences differ between standard
// library implementations. Seeded results are therefore portable.

/// Uniform double in [0, 1) with 53 significant bits.
inline double uniform01(std::mt19937_64 &gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1).
inline double uniform_open01(std::mt19937_64 &gen) {
  double u;
  do {
    u = uniform01(gen);
  } while (u == 0.0);
  return u;
}

/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::size_t uniform_below(std::mt19937_64 &gen, std::size_t n) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x;
  do {
    x = gen();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

/// Standard normal variate (Box-Muller, cosine branch).
inline double gaussian(std::mt19937_64 &gen) {
  constexpr double two_pi = 2.0 * 3.141592653589793238462643383279502884;
  const double u1 = uniform_open01(gen);
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

/// Fills `row` with normalized uniform positives (a random stochastic row).
inline void fill_stochastic_row(std::mt19937_64 &gen, std::span<double> row) {
  double sum = 0.0;
  for (double &v : row) {
    v = uniform_open01(gen);
    sum += v;
  }
  for (double &v : row) v /= sum;
}

}  // namespace gla

#pragma once

#include <cmath>
#include <cstdint>

#include "mib/data_matrix.hpp"
#include "mib/rng.hpp"

namespace synth {

inline double gauss(mib::SplitMix64& rng) {
  // Box-Muller, cosine branch; both uniforms consumed per call.
  double u1 = rng.next_double();
  const double u2 = rng.next_double();
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline mib::DataMatrix normal_matrix(size_t n, size_t d, uint64_t seed) {
  mib::DataMatrix m = mib::make_matrix(n, d);
  mib::SplitMix64 rng(seed);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < d; ++j) m.set(i, j, gauss(rng));
  return m;
}

// Hides cells uniformly at random without recording truth; for tests that
// only need a missingness pattern.
inline void punch_holes(mib::DataMatrix& m, double rate, uint64_t seed,
                        size_t excluded_col = SIZE_MAX) {
  mib::SplitMix64 rng(seed);
  for (size_t i = 0; i < m.rows; ++i)
    for (size_t j = 0; j < m.cols; ++j) {
      if (j == excluded_col) continue;
      if (rng.next_double() < rate) m.set_missing(i, j);
    }
}

// Rank-1 matrix a_j * u_i plus optional noise.
inline mib::DataMatrix rank1_matrix(size_t n, size_t d, uint64_t seed,
                                    double noise = 0.0) {
  mib::DataMatrix m = mib::make_matrix(n, d);
  mib::SplitMix64 rng(seed);
  std::vector<double> a(d);
  for (auto& v : a) v = rng.next_double(0.5, 1.5);
  for (size_t i = 0; i < n; ++i) {
    const double u = gauss(rng);
    for (size_t j = 0; j < d; ++j)
      m.set(i, j, a[j] * u + (noise > 0.0 ? noise * gauss(rng) : 0.0));
  }
  return m;
}

}  // namespace synth

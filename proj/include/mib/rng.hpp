#pragma once

#include <cstdint>
#include <vector>

namespace mib {

/// SplitMix64 (Steele/Lea/Vigna). The whole toolkit draws randomness from
/// this one generator so that every mask, shuffle, and initialization is a
/// pure function of a 64-bit seed and reproduces bit-identically on any
/// platform. The algorithm is restated in the README; tests replay it
/// independently.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0,1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo,hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0,n). Multiply-shift bound, no modulo bias.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

/// One SplitMix64 scramble round; used to derive independent sub-seeds.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return base ^ mix64(tag);
}

/// Seeded Fisher-Yates. Draw order is part of the determinism contract.
template <typename T>
void shuffle_inplace(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace mib

#pragma once

#include <cstdint>
#include <random>

namespace sectore {

// Every randomized component (dataset generation, parameter init, negative
// sampling) draws through this wrapper so outputs are reproducible bit for
// bit across standard libraries. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; the integer/real mappings are fixed
// here instead of delegating to std:: distributions, whose algorithms are
// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(mix(seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). Rejection against the largest multiple of n
  // below 2^64, then a plain modulus; unbiased for every n >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = -n % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t x = engine_();
      if (x >= threshold) return x % n;
    }
  }

  // Uniform double in [0, 1): top 53 bits scaled by 2^-53.
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  bool coin() { return (engine_() >> 63) != 0; }

 private:
  // splitmix64 of seed xor a stream salt; decorrelates sub-streams that
  // share a user-facing seed.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
};

}  // namespace sectore

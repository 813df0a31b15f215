#pragma once

#include <cstdint>
#include <random>

namespace kmer {

// Per-chain random stream. The engine state (19937 bits) is seeded from the
// pair (seed, stream) through std::seed_seq, whose output is fully specified
// by the standard, so trajectories are reproducible across toolchains. The
// engine's raw output is mapped to ranges by hand for the same reason.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n); n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x = engine_();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = -n % n;
      while (low < threshold) {
        x = engine_();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kmer

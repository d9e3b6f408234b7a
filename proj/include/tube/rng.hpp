#pragma once

#include <cmath>
#include <cstdint>

namespace tube {

/// Identifies one reproducible random stream. Distinct (seed, stream) pairs
/// give statistically independent streams; equal pairs replay bit-for-bit.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Counter-based generator (SplitMix64 core). Each stream walks its own
/// odd-stride orbit of the mixer, so an ensemble can hand stream ids
/// 0,1,2,... to its replicas without any coordination.
///
/// All floating-point draws are built from explicit integer arithmetic
/// rather than std::*_distribution, so trajectories are identical across
/// standard libraries, not just across runs.
class RngEngine {
 public:
  explicit RngEngine(RngStream s) {
    counter_ = mix(s.seed + kGolden);
    counter_ = mix(counter_ ^ (s.stream + 0xbf58476d1ce4e5b9ULL));
    gamma_ = mix(counter_ + 0x94d049bb133111ebULL) | 1ULL;
  }

  std::uint64_t next_u64() {
    counter_ += gamma_;
    return mix(counter_);
  }

  /// Uniform on [0,1) with 53 random bits.
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Exponential holding time; rate must be positive.
  double exponential(double rate) { return -std::log1p(-u01()) / rate; }

  /// Uniform integer in {0, ..., n-1}, bias-free (Lemire rejection).
  std::uint64_t below(std::uint64_t n) {
    for (;;) {
      std::uint64_t x = next_u64();
      __uint128_t m = static_cast<__uint128_t>(x) * n;
      auto low = static_cast<std::uint64_t>(m);
      if (low < n) {
        std::uint64_t threshold = -n % n;
        if (low < threshold) continue;
      }
      return static_cast<std::uint64_t>(m >> 64);
    }
  }

  bool bernoulli(double p) { return u01() < p; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t counter_;
  std::uint64_t gamma_;
};

}  // namespace tube

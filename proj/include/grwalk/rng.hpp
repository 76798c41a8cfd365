#pragma once

#include <cstdint>
#include <random>

namespace grwalk {

/// 64-bit Mersenne Twister seeded through std::seed_seq from (seed, stream), so
/// every (seed, stream) pair is an independent, platform-stable substream.
/// Variates are produced without std::*_distribution, whose output is
/// implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  Rng substream(std::uint64_t k) const { return Rng(seed_, stream_ * 0x9E3779B97F4A7C15ULL + k + 1); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace grwalk

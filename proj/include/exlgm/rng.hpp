#pragma once

#include <cstdint>
#include <random>

namespace exlgm {

/// Seeded random stream. Every stochastic routine takes one of these
/// explicitly so that runs are reproducible bit-for-bit for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  /// Uniform on the open interval (0, 1).
  double uniform() {
    double u;
    do {
      u = unif_(engine_);
    } while (u <= 0.0 || u >= 1.0);
    return u;
  }

  double normal() { return norm_(engine_); }

  /// Independent stream derived from this stream's seed and a stream id.
  /// Does not advance this stream.
  static Rng substream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix(seed) ^ mix(stream * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  // splitmix64 finalizer; decorrelates nearby seeds.
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace exlgm

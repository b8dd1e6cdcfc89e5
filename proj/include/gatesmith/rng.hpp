#pragma once

#include <cstdint>
#include <random>

namespace gatesmith {

/// Deterministic random source used throughout the library.
///
/// Wraps std::mt19937_64 but performs all range reductions itself so that a
/// given seed produces the same stream on every platform and standard
/// library. Runs seeded through this class are bit-reproducible.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi], inclusive. Requires lo <= hi.
  int uniform_int(int lo, int hi) {
    const uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    // Multiply-shift reduction; bias is < 2^-64 * span, negligible and
    // deterministic.
    const auto wide = static_cast<unsigned __int128>(next()) * span;
    return lo + static_cast<int>(wide >> 64);
  }

  /// Uniform digit 0-9.
  int digit() { return uniform_int(0, 9); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  bool bernoulli(double p) { return u01() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Child-seed derivation (splitmix64 of master xor golden-ratio stream id).
/// Documented contract: stream k of master seed m is reproducible on its own.
inline uint64_t derive_seed(uint64_t master, uint64_t stream) {
  uint64_t z = master ^ (stream * 0x9e3779b97f4a7c15ULL);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gatesmith

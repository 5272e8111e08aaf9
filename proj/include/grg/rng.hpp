#pragma once

#include <cstdint>

namespace grg {

/// SplitMix64 finalizer. Used both as the stream step and to fold keys into
/// substream seeds, so that every (seed, key...) pair yields an independent
/// deterministic stream on every platform.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t combine_keys(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = mix64(h ^ (c + 0xc2b2ae3d27d4eb4fULL));
  return h;
}

/// Deterministic splitmix64 stream. Not for cryptography; for reproducible
/// experiments. Doubles are drawn as 53-bit mantissas, identical everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * unit(); }

  /// Unbiased uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) return 0;
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  bool coin(double p) { return unit() < p; }

 private:
  std::uint64_t state_;
};

/// Independent substream for (seed, keys...).
inline Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                     std::uint64_t c = 0) {
  return Rng(combine_keys(seed, a, b, c));
}

namespace stream {
// Fixed tags keeping unrelated substreams apart.
inline constexpr std::uint64_t kSamplePoint = 0x5a01;
inline constexpr std::uint64_t kEdgeCoin = 0x5a02;
inline constexpr std::uint64_t kProbe = 0x5a03;
inline constexpr std::uint64_t kGecTrial = 0x5a04;
inline constexpr std::uint64_t kWitness = 0x5a05;
inline constexpr std::uint64_t kGame = 0x5a06;
inline constexpr std::uint64_t kInstance = 0x5a07;
}  // namespace stream

/// Order-independent edge coin keyed by (seed, min(u,v), max(u,v)).
inline bool edge_coin(std::uint64_t seed, std::size_t u, std::size_t v,
                      double p) {
  const std::uint64_t lo = u < v ? u : v;
  const std::uint64_t hi = u < v ? v : u;
  Rng r = substream(seed, stream::kEdgeCoin, lo, hi);
  return r.coin(p);
}

}  // namespace grg

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace maxaffine {

// splitmix64 output mixer (Steele, Lea & Flood; the seeding generator of the
// xoshiro family). Each call advances the Weyl state by the golden-ratio
// increment and scrambles it. 64-bit state, period 2^64 per stream.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent child seed from a root seed and a key path.
/// Used to hand each trial / cell / purpose its own stream so that results
/// do not depend on scheduling order or on how many trials run in total.
inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = root;
  (void)splitmix64_next(s);
  for (std::uint64_t key : path) {
    s ^= key + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
    (void)splitmix64_next(s);
  }
  return splitmix64_next(s);
}

/// Deterministic 64-bit stream generator. All randomness in the library is
/// drawn through this class; given the same seed the exact same sequence is
/// produced regardless of platform or thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::int64_t uniform_index(std::int64_t n) {
    // Rejection-free modulo bias is negligible for n << 2^64; use
    // multiply-shift which is exact for n < 2^53 in practice.
    return static_cast<std::int64_t>(uniform() * static_cast<double>(n)) % n;
  }

  /// Standard normal via Box-Muller; the second variate of each pair is
  /// cached so consecutive calls consume one uniform pair per two draws.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  /// Gamma(shape, 1) by Marsaglia-Tsang squeeze; shape < 1 handled via the
  /// boost identity Gamma(a) = Gamma(a+1) * U^{1/a}.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = gaussian();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace maxaffine

#pragma once

// Deterministic random streams. The engine is std::mt19937_64 (bit-exact by
// the standard); all derived draws (bounded ints, 53-bit uniforms, gaussians)
// are implemented here instead of std::*_distribution so that identical seeds
// reproduce identical samples on every standard library.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace mads {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Collapses (seed, a, b, c) into one substream seed. Distinct tuples give
// independent streams, which keeps parallel and serial generation identical.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                   std::uint64_t c = 0) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s ^= a + 0x632be59bd9b4e019ULL;
  h ^= splitmix64(s);
  s ^= b + 0x2545f4914f6cdd1dULL;
  h ^= splitmix64(s);
  s ^= c + 0x9e6c63d0876a9a35ULL;
  h ^= splitmix64(s);
  return h;
}

class rng {
 public:
  explicit rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n), rejection sampled to remove modulo bias.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double real01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * real01(); }

  // Box-Muller; second deviate cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = real01();
    while (u1 <= 0.0) u1 = real01();
    const double u2 = real01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[below(i)]);
    }
  }

  // First k entries of a random permutation of [0, n); order is draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    const std::size_t m = k < n ? k : n;
    for (std::size_t i = 0; i < m; ++i) {
      std::swap(idx[i], idx[i + below(n - i)]);
    }
    idx.resize(m);
    return idx;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mads

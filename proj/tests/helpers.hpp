#pragma once

// Shared test utilities: random fixtures and independent oracles. Oracles here
// must stay decoupled from the library code paths they check.

#include <cmath>
#include <random>
#include <vector>

#include "mads/embedding.hpp"
#include "mads/matrix.hpp"

namespace test_util {

// Deterministic generator for fixtures; std::mt19937_64 raw draws only.
class fixture_rng {
 public:
  explicit fixture_rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  double gaussian() {
    // Box-Muller, no caching: two draws per deviate keeps it simple.
    double u1 = uniform(0.0, 1.0);
    while (u1 <= 0.0) u1 = uniform(0.0, 1.0);
    const double u2 = uniform(0.0, 1.0);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793238 * u2);
  }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

 private:
  std::mt19937_64 engine_;
};

inline mads::embedding_set random_set(fixture_rng& rng, std::size_t n, std::size_t dim) {
  mads::embedding_set set(dim);
  std::vector<double> v(dim);
  for (std::size_t i = 0; i < n; ++i) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& x : v) {
        x = rng.gaussian();
        norm += x * x;
      }
    } while (norm == 0.0);
    set.add(v);
  }
  return set;
}

inline mads::matrix random_matrix(fixture_rng& rng, std::size_t rows, std::size_t cols,
                                  double scale = 1.0) {
  mads::matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = scale * rng.gaussian();
  }
  return m;
}

// Duplicate every element of a set (S followed by a second copy of S).
inline mads::embedding_set duplicated(const mads::embedding_set& s) {
  mads::embedding_set out(s.dim());
  for (std::size_t i = 0; i < s.size(); ++i) out.add(s.row(i));
  for (std::size_t i = 0; i < s.size(); ++i) out.add(s.row(i));
  return out;
}

// Brute-force mean pairwise cosine dissimilarity straight off the formula,
// independent of the matrix/mirroring implementation.
inline double brute_force_dissimilarity(const mads::embedding_set& s) {
  const std::size_t n = s.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto a = s.row(i);
      const auto b = s.row(j);
      double d = 0.0, na = 0.0, nb = 0.0;
      for (std::size_t k = 0; k < s.dim(); ++k) {
        d += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
      }
      sum += d / (std::sqrt(na) * std::sqrt(nb));
    }
  }
  return 1.0 - sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

// Average-rank Spearman by counting comparisons, O(n^2); the production code
// sorts instead.
inline double brute_force_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const auto rank_of = [n](const std::vector<double>& v, std::size_t i) {
    double below = 0.0, equal = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (v[j] < v[i]) below += 1.0;
      if (j != i && v[j] == v[i]) equal += 1.0;
    }
    return 1.0 + below + 0.5 * equal;
  };
  std::vector<double> rx(n), ry(n);
  for (std::size_t i = 0; i < n; ++i) {
    rx[i] = rank_of(x, i);
    ry[i] = rank_of(y, i);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

// Standard normal CDF by Simpson quadrature over [-10, x]; independent of the
// erfc-based implementation.
inline double normal_cdf_quadrature(double x) {
  const double lo = -10.0;
  const int steps = 20000;  // even
  const double h = (x - lo) / steps;
  const auto density = [](double t) {
    return std::exp(-0.5 * t * t) * 0.39894228040143267794;
  };
  double sum = density(lo) + density(x);
  for (int i = 1; i < steps; ++i) {
    sum += density(lo + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

}  // namespace test_util

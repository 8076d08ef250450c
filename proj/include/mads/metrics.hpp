#pragma once

// Diversity scores over an embedding set: mean pairwise cosine dissimilarity
// and the Vendi score (exponential of the Shannon entropy of the normalized
// cosine-similarity spectrum). Both are scale- and permutation-invariant.

#include <cmath>
#include <string>
#include <vector>

#include "mads/eigensolver.hpp"
#include "mads/embedding.hpp"
#include "mads/error.hpp"
#include "mads/matrix.hpp"
#include "mads/parallel.hpp"

namespace mads {

enum class metric_kind { mean_pairwise_dissimilarity, vendi_score };

inline const char* metric_name(metric_kind m) {
  return m == metric_kind::vendi_score ? "vendi_score" : "mean_pairwise_dissimilarity";
}

struct diversity_score {
  metric_kind metric;
  double value;
};

// Eigenvalues of K/n, non-increasing, clamped into [0, 1].
struct similarity_spectrum {
  std::vector<double> eigenvalues;
  std::size_t n;

  double sum() const {
    double s = 0.0;
    for (double v : eigenvalues) s += v;
    return s;
  }
};

namespace detail {

inline void require_scoreable(const embedding_set& set) {
  if (set.size() < 2) {
    fail(errc::too_few_points,
         "diversity needs n >= 2, got n = " + std::to_string(set.size()));
  }
}

}  // namespace detail

// Pairwise cosine similarities. The diagonal is set to exactly 1 and the lower
// triangle mirrors the upper one, so the result is symmetric by construction.
// Row blocks may be computed in parallel; per-row summation order is fixed.
inline matrix cosine_similarity_matrix(const embedding_set& set) {
  detail::require_scoreable(set);
  const std::size_t n = set.size();
  const std::size_t d = set.dim();

  std::vector<double> inv_norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = set.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(row[j])) {
        fail(errc::non_finite_input, "embedding " + std::to_string(i) + " has a non-finite entry");
      }
      s += row[j] * row[j];
    }
    if (s == 0.0) fail(errc::zero_norm_vector, "embedding " + std::to_string(i) + " has zero norm");
    inv_norm[i] = 1.0 / std::sqrt(s);
  }

  matrix k(n, n);
  parallel_for(n, [&](std::size_t i) {
    k(i, i) = 1.0;
    const auto ri = set.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = dot(ri, set.row(j)) * inv_norm[i] * inv_norm[j];
      k(i, j) = c;
      k(j, i) = c;
    }
  });
  return k;
}

// 1 - mean cosine similarity over distinct pairs (the strict upper triangle
// supplies every unordered pair; ordered and unordered means coincide by
// symmetry).
inline diversity_score mean_pairwise_dissimilarity(const embedding_set& set) {
  const matrix k = cosine_similarity_matrix(set);
  const std::size_t n = k.rows();
  double upper = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) upper += k(i, j);
  }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  double value = 1.0 - upper / pairs;
  constexpr double tol = 1e-9;
  if (value < -tol || value > 2.0 + tol) {
    fail(errc::numerical_bounds_violation,
         "mean dissimilarity " + std::to_string(value) + " outside [0, 2]");
  }
  value = std::min(std::max(value, 0.0), 2.0);
  return {metric_kind::mean_pairwise_dissimilarity, value};
}

// Spectrum of K/n for a symmetric similarity matrix K with unit diagonal.
inline similarity_spectrum eigen_spectrum(const matrix& k, std::size_t n) {
  if (k.rows() != n || k.cols() != n) fail(errc::shape_mismatch, "matrix/size mismatch");
  matrix scaled(n, n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) scaled(i, j) = k(i, j) * inv_n;
  }
  eigen_result eig = sym_eigen(scaled, /*with_vectors=*/false);

  constexpr double tol = 1e-9;
  similarity_spectrum spec;
  spec.n = n;
  spec.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lambda = eig.values[n - 1 - i];  // non-increasing
    if (lambda < -tol || lambda > 1.0 + tol) {
      fail(errc::numerical_bounds_violation,
           "eigenvalue " + std::to_string(lambda) + " outside [0, 1]");
    }
    spec.eigenvalues[i] = std::min(std::max(lambda, 0.0), 1.0);
  }
  return spec;
}

// exp(-sum lambda_i log lambda_i), natural log, with 0 log 0 = 0 applied to
// eigenvalues below 1e-12. Result is pinned into [1, n].
inline diversity_score vendi_score(const embedding_set& set) {
  detail::require_scoreable(set);
  const matrix k = cosine_similarity_matrix(set);
  const similarity_spectrum spec = eigen_spectrum(k, set.size());
  double entropy = 0.0;
  for (double lambda : spec.eigenvalues) {
    if (lambda >= 1e-12) entropy -= lambda * std::log(lambda);
  }
  double value = std::exp(entropy);
  value = std::min(std::max(value, 1.0), static_cast<double>(set.size()));
  return {metric_kind::vendi_score, value};
}

inline diversity_score score_set(const embedding_set& set, metric_kind metric) {
  return metric == metric_kind::vendi_score ? vendi_score(set) : mean_pairwise_dissimilarity(set);
}

}  // namespace mads

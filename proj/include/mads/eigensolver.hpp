#pragma once

// Symmetric eigensolver: Householder reduction to tridiagonal form followed by
// implicit-shift QL iteration (the classical EISPACK tred2/tql2 pair). Only
// symmetric input is accepted, which guarantees real eigenvalues and, when
// requested, orthogonal eigenvectors.
//
// Eigenvector accumulation costs the dominant O(n^3) term in QL, so callers
// that only need the spectrum (the Vendi score path) should leave it off.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "mads/error.hpp"
#include "mads/matrix.hpp"

namespace mads {

struct eigen_result {
  std::vector<double> values;  // ascending
  matrix vectors;              // column j pairs with values[j]; empty unless requested
};

namespace detail {

// Reduce the symmetric matrix held in v to tridiagonal form (d = diagonal,
// e = off-diagonal). With accumulate=true, v ends up holding the orthogonal
// transformation Q with A = Q T Q^T.
inline void householder_tridiagonalize(matrix& v, std::vector<double>& d, std::vector<double>& e,
                                       bool accumulate) {
  const std::size_t n = v.rows();
  for (std::size_t j = 0; j < n; ++j) d[j] = v(n - 1, j);

  for (std::size_t i = n - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (std::size_t k = 0; k < i; ++k) scale += std::fabs(d[k]);
    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (std::size_t j = 0; j < i; ++j) {
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    } else {
      // Householder vector for row i.
      for (std::size_t k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0.0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (std::size_t j = 0; j < i; ++j) e[j] = 0.0;

      // Apply the similarity transform to the remaining submatrix.
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        v(j, i) = f;
        g = e[j] + v(j, j) * f;
        for (std::size_t k = j + 1; k < i; ++k) {
          g += v(k, j) * d[k];
          e[k] += v(k, j) * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (std::size_t j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (std::size_t j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (std::size_t j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (std::size_t k = j; k < i; ++k) v(k, j) -= f * e[k] + g * d[k];
        d[j] = v(i - 1, j);
        v(i, j) = 0.0;
      }
    }
    d[i] = h;
  }

  if (accumulate) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      v(n - 1, i) = v(i, i);
      v(i, i) = 1.0;
      const double h = d[i + 1];
      if (h != 0.0) {
        for (std::size_t k = 0; k <= i; ++k) d[k] = v(k, i + 1) / h;
        for (std::size_t j = 0; j <= i; ++j) {
          double g = 0.0;
          for (std::size_t k = 0; k <= i; ++k) g += v(k, i + 1) * v(k, j);
          for (std::size_t k = 0; k <= i; ++k) v(k, j) -= g * d[k];
        }
      }
      for (std::size_t k = 0; k <= i; ++k) v(k, i + 1) = 0.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      d[j] = v(n - 1, j);
      v(n - 1, j) = 0.0;
    }
    v(n - 1, n - 1) = 1.0;
  } else {
    // Without accumulation the reduced diagonal sits on v's diagonal.
    for (std::size_t j = 0; j < n; ++j) d[j] = v(j, j);
  }
  e[0] = 0.0;
}

// QL iteration with implicit shifts on the tridiagonal (d, e).
inline void ql_implicit_shift(std::vector<double>& d, std::vector<double>& e, matrix& v,
                              bool accumulate, std::size_t max_iter_per_eigenvalue) {
  const std::size_t n = d.size();
  if (n == 1) return;
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  const double eps = 0x1.0p-52;

  for (std::size_t l = 0; l < n; ++l) {
    tst1 = std::max(tst1, std::fabs(d[l]) + std::fabs(e[l]));
    std::size_t m = l;
    while (m < n && std::fabs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      std::size_t iter = 0;
      do {
        if (++iter > max_iter_per_eigenvalue) {
          fail(errc::eigen_failure,
               "QL failed to converge after " + std::to_string(iter - 1) + " iterations");
        }
        // Wilkinson-style shift.
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0.0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (std::size_t i = l + 2; i < n; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0, c2 = 1.0, c3 = 1.0;
        const double el1 = e[l + 1];
        double s = 0.0, s2 = 0.0;
        for (std::size_t i = m; i-- > l;) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          if (accumulate) {
            for (std::size_t k = 0; k < n; ++k) {
              h = v(k, i + 1);
              v(k, i + 1) = s * v(k, i) + c * h;
              v(k, i) = c * v(k, i) - s * h;
            }
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::fabs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

}  // namespace detail

// Decomposes a symmetric matrix. Eigenvalues come back ascending; when
// with_vectors is set, column j of `vectors` is the unit eigenvector for
// values[j]. Throws NotSymmetric when |a - a^T| exceeds symmetry_tol and
// EigenFailure when QL does not converge.
inline eigen_result sym_eigen(const matrix& a, bool with_vectors,
                              double symmetry_tol = 1e-12,
                              std::size_t max_iter_per_eigenvalue = 50) {
  const std::size_t n = a.rows();
  if (n == 0 || a.cols() != n) fail(errc::shape_mismatch, "sym_eigen needs a square matrix");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::fabs(a(i, j) - a(j, i)) > symmetry_tol) {
        fail(errc::not_symmetric, "entry (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") differs from its transpose");
      }
    }
  }

  eigen_result out;
  out.values.resize(n);
  std::vector<double> e(n, 0.0);
  matrix v = a;
  detail::householder_tridiagonalize(v, out.values, e, with_vectors);
  detail::ql_implicit_shift(out.values, e, v, with_vectors, max_iter_per_eigenvalue);

  // Sort ascending, carrying columns along when present.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return out.values[x] < out.values[y]; });
  std::vector<double> sorted(n);
  for (std::size_t j = 0; j < n; ++j) sorted[j] = out.values[order[j]];
  out.values = std::move(sorted);
  if (with_vectors) {
    out.vectors = matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
  }
  return out;
}

}  // namespace mads

#pragma once

// Minimal row-major double matrix. All diversity arithmetic runs in 64-bit
// regardless of how embeddings are stored.

#include <cstddef>
#include <span>
#include <vector>

#include "mads/error.hpp"

namespace mads {

class matrix {
 public:
  matrix() : rows_(0), cols_(0) {}
  matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  bool same_shape(const matrix& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

}  // namespace mads

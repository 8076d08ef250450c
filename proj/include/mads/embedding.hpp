#pragma once

// EmbeddingSet: the ordered sample of utterance embeddings whose diversity is
// measured. Storage is flat row-major double; ids are optional and aligned.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "mads/error.hpp"

namespace mads {

class embedding_set {
 public:
  embedding_set() : dim_(0) {}
  explicit embedding_set(std::size_t dim) : dim_(dim) {
    if (dim == 0) fail(errc::dim_mismatch, "embedding dim must be positive");
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }

  void add(std::span<const double> v, std::string id = {}) {
    if (v.size() != dim_) {
      fail(errc::dim_mismatch, "vector of length " + std::to_string(v.size()) +
                                   " added to a dim-" + std::to_string(dim_) + " set");
    }
    data_.insert(data_.end(), v.begin(), v.end());
    if (!id.empty() || !ids_.empty()) {
      ids_.resize(size() - 1);
      ids_.push_back(std::move(id));
    }
  }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& raw() const { return data_; }

  static embedding_set from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) fail(errc::empty_sequence, "no rows");
    embedding_set s(rows.front().size());
    for (const auto& r : rows) s.add(r);
    return s;
  }

 private:
  std::size_t dim_;
  std::vector<double> data_;
  std::vector<std::string> ids_;
};

// Arithmetic mean across the time axis, per coordinate. This is how frame-level
// embeddings become one vector per utterance.
inline std::vector<double> pool_time_axis(const std::vector<std::vector<double>>& frames) {
  if (frames.empty()) fail(errc::empty_sequence, "cannot pool zero frames");
  const std::size_t dim = frames.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& f : frames) {
    if (f.size() != dim) {
      fail(errc::dim_mismatch, "frame dim " + std::to_string(f.size()) + " != " +
                                   std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      if (!std::isfinite(f[j])) fail(errc::non_finite_input, "non-finite frame entry");
      mean[j] += f[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(frames.size());
  for (double& v : mean) v *= inv;
  return mean;
}

}  // namespace mads

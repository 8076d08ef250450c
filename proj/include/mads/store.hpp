#pragma once

// Embedding container: utterance ids plus a count x dim matrix of f32 rows.
// Layout (little-endian): magic "MADS", version u32 = 1, dim u32, count u64,
// count null-terminated UTF-8 ids, count*dim f32 row-major payload, CRC32 of
// all preceding bytes. Rows are linked to utterances by id, never by order.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mads/binio.hpp"
#include "mads/embedding.hpp"
#include "mads/error.hpp"

namespace mads {

constexpr std::uint32_t kStoreFormatVersion = 1;

class embedding_store {
 public:
  embedding_store() : dim_(0) {}
  explicit embedding_store(std::uint32_t dim) : dim_(dim) {
    if (dim == 0) fail(errc::dim_mismatch, "store dim must be positive");
  }

  std::uint32_t dim() const { return dim_; }
  std::uint64_t count() const { return ids_.size(); }

  void add(const std::string& id, std::span<const float> row) {
    if (row.size() != dim_) {
      fail(errc::dim_mismatch, "row length " + std::to_string(row.size()) + " != dim " +
                                   std::to_string(dim_));
    }
    if (id.empty()) fail(errc::parse_error, "empty utterance id");
    if (index_.contains(id)) fail(errc::duplicate_id, "duplicate utterance id '" + id + "'");
    index_.emplace(id, ids_.size());
    ids_.push_back(id);
    rows_.insert(rows_.end(), row.begin(), row.end());
  }

  void add(const std::string& id, std::span<const double> row) {
    std::vector<float> narrow(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) narrow[i] = static_cast<float>(row[i]);
    add(id, std::span<const float>(narrow));
  }

  bool contains(const std::string& id) const { return index_.contains(id); }

  std::size_t row_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) fail(errc::missing_embedding, "no embedding for id '" + id + "'");
    return it->second;
  }

  std::span<const float> row(std::size_t i) const { return {rows_.data() + i * dim_, dim_}; }
  const std::vector<std::string>& ids() const { return ids_; }

  // Widened copy of one row; scoring math runs in 64-bit.
  std::vector<double> row_f64(std::size_t i) const {
    const auto r = row(i);
    return std::vector<double>(r.begin(), r.end());
  }

  embedding_set gather(const std::vector<std::string>& wanted) const {
    embedding_set set(dim_);
    for (const auto& id : wanted) set.add(row_f64(row_of(id)), id);
    return set;
  }

  embedding_set all() const { return gather(ids_); }

  // Rejects rows a diversity metric cannot consume, naming the offending id.
  void validate_rows() const {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      double norm = 0.0;
      for (float v : row(i)) {
        if (!std::isfinite(v)) {
          fail(errc::non_finite_input, "row '" + ids_[i] + "' has a non-finite entry");
        }
        norm += static_cast<double>(v) * v;
      }
      if (norm == 0.0) fail(errc::zero_norm_vector, "row '" + ids_[i] + "' has zero norm");
    }
  }

 private:
  std::uint32_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline std::vector<std::uint8_t> store_to_bytes(const embedding_store& store) {
  byte_writer w;
  w.bytes("MADS", 4);
  w.u32(kStoreFormatVersion);
  w.u32(store.dim());
  w.u64(store.count());
  for (const auto& id : store.ids()) w.cstr(id);
  for (std::size_t i = 0; i < store.count(); ++i) {
    for (float v : store.row(i)) w.f32(v);
  }
  w.append_crc();
  return w.take();
}

inline embedding_store store_from_bytes(std::span<const std::uint8_t> bytes,
                                        const std::string& source = "<memory>",
                                        bool validate = true) {
  if (bytes.size() < 24) fail(errc::corrupt_header, source + ": file too short for a store");
  byte_reader r(bytes.data(), bytes.size(), source);

  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, "MADS", 4) != 0) fail(errc::corrupt_header, source + ": bad magic");
  const std::uint32_t version = r.u32();
  if (version != kStoreFormatVersion) {
    fail(errc::version_unsupported, source + ": store format version " + std::to_string(version));
  }
  const std::uint32_t dim = r.u32();
  const std::uint64_t count = r.u64();
  if (dim == 0 || dim > (1u << 24)) fail(errc::corrupt_header, source + ": implausible dim");

  // Ids are variable-length, so sizes are checked incrementally against the
  // buffer; the payload bound below guards against corrupted counts.
  embedding_store store(dim);
  std::vector<std::string> ids;
  ids.reserve(std::min<std::uint64_t>(count, bytes.size()));
  for (std::uint64_t i = 0; i < count; ++i) ids.push_back(r.cstr());

  const std::uint64_t payload = count * static_cast<std::uint64_t>(dim) * 4;
  if (r.remaining() != payload + 4) {
    fail(errc::corrupt_header, source + ": payload size mismatch at byte offset " +
                                   std::to_string(r.offset()));
  }
  r.check_crc(bytes.size() - 4);

  std::vector<float> row(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::uint32_t j = 0; j < dim; ++j) row[j] = r.f32();
    store.add(ids[i], std::span<const float>(row));
  }
  if (validate) store.validate_rows();
  return store;
}

inline void store_write(const std::string& path, const embedding_store& store) {
  const auto bytes = store_to_bytes(store);
  write_file_atomic(path, bytes.data(), bytes.size());
}

inline embedding_store store_read(const std::string& path, bool validate = true) {
  const auto bytes = read_file_bytes(path);
  return store_from_bytes(bytes, path, validate);
}

}  // namespace mads

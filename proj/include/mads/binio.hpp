#pragma once

// Little-endian byte encoding, CRC32, and atomic file writes for the binary
// container formats. Readers consume whole buffers with bounds checks so a
// corrupted length field can never trigger an oversized allocation.

#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mads/error.hpp"

namespace mads {

// CRC-32 (IEEE reflected, polynomial 0xEDB88320), same convention as zlib.
inline std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t seed = 0) {
  static const std::array<std::uint32_t, 256> table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  std::uint32_t crc = ~seed;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xFF] ^ (crc >> 8);
  return ~crc;
}

class byte_writer {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  void cstr(const std::string& s) {
    bytes(s.data(), s.size());
    buf_.push_back(0);
  }
  void append_crc() { u32(crc32(buf_.data(), buf_.size())); }

  const std::vector<std::uint8_t>& buffer() const { return buf_; }
  std::vector<std::uint8_t> take() { return std::move(buf_); }

 private:
  std::vector<std::uint8_t> buf_;
};

class byte_reader {
 public:
  byte_reader(const std::uint8_t* data, std::size_t size, std::string source)
      : data_(data), size_(size), source_(std::move(source)) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return size_ - pos_; }

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }

  std::string cstr() {
    const std::uint8_t* nul =
        static_cast<const std::uint8_t*>(std::memchr(data_ + pos_, 0, remaining()));
    if (nul == nullptr) truncated("unterminated string");
    std::string s(reinterpret_cast<const char*>(data_ + pos_), nul - (data_ + pos_));
    pos_ = static_cast<std::size_t>(nul - data_) + 1;
    return s;
  }

  void raw(void* out, std::size_t n) {
    need(n);
    std::memcpy(out, data_ + pos_, n);
    pos_ += n;
  }

  // Verifies the trailing CRC32 over bytes [0, size-4).
  void check_crc(std::size_t trailer_offset) {
    const std::uint32_t stored = [&] {
      std::size_t save = pos_;
      pos_ = trailer_offset;
      std::uint32_t v = u32();
      pos_ = save;
      return v;
    }();
    const std::uint32_t actual = crc32(data_, trailer_offset);
    if (stored != actual) {
      fail(errc::checksum_mismatch, source_ + ": stored crc32 " + std::to_string(stored) +
                                        " != computed " + std::to_string(actual));
    }
  }

  [[noreturn]] void truncated(const std::string& what) {
    fail(errc::corrupt_header,
         source_ + ": " + what + " at byte offset " + std::to_string(pos_));
  }

 private:
  void need(std::size_t n) {
    if (remaining() < n) truncated("unexpected end of data");
  }

  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
  std::string source_;
};

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::io_failure, "cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  std::vector<std::uint8_t> buf(size);
  if (size > 0) in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
  if (!in) fail(errc::io_failure, "short read from " + path);
  return buf;
}

// Temp-file-and-rename so concurrent readers never observe a partial file.
inline void write_file_atomic(const std::string& path, const void* data, std::size_t size) {
  static std::atomic<std::uint64_t> counter{std::random_device{}()};
  const std::string tmp = path + ".tmp." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(errc::io_failure, "cannot open " + tmp + " for writing");
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    out.flush();
    if (!out) fail(errc::io_failure, "short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(errc::io_failure, "rename " + tmp + " -> " + path + ": " + ec.message());
  }
}

inline void write_file_atomic(const std::string& path, const std::string& text) {
  write_file_atomic(path, text.data(), text.size());
}

}  // namespace mads

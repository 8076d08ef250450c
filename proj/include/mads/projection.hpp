#pragma once

// Facet-specialized projection heads: small feed-forward stacks applied on top
// of frozen base embeddings. GELU between layers, nothing after the last one,
// inverted dropout on the input during training only.
//
// Head file format (little-endian): magic "MADH", version u32, facet u8,
// layer count u8, per layer {in u32, out u32, weights f32 row-major, bias f32},
// a length-prefixed UTF-8 descriptor block (length 0 when absent), CRC32 of
// everything before it.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mads/binio.hpp"
#include "mads/error.hpp"
#include "mads/facet.hpp"
#include "mads/matrix.hpp"
#include "mads/rng.hpp"

namespace mads {

// Exact GELU: x * Phi(x) with Phi the standard normal CDF (erfc form, not the
// tanh approximation).
inline double gelu(double x) { return x * 0.5 * std::erfc(-x * 0.7071067811865475244); }

inline double gelu_derivative(double x) {
  const double phi = 0.5 * std::erfc(-x * 0.7071067811865475244);
  const double density = std::exp(-0.5 * x * x) * 0.3989422804014326779;
  return phi + x * density;
}

struct affine_layer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;  // out_dim x in_dim, row-major
  std::vector<double> bias;     // out_dim
};

// Default architectures: 2 layers (256, 128) for every facet except gender,
// which uses 4 layers (256, 256, 128, 128).
inline std::vector<std::size_t> default_head_dims(facet f) {
  if (f == facet::gender) return {256, 256, 128, 128};
  return {256, 128};
}

constexpr std::size_t kDefaultInputDim = 192;
constexpr double kDefaultDropoutRate = 0.1;

class projection_head {
 public:
  projection_head() = default;

  projection_head(facet f, std::size_t input_dim, std::vector<std::size_t> layer_dims,
                  double dropout_rate = kDefaultDropoutRate)
      : facet_(f), input_dim_(input_dim), dropout_rate_(dropout_rate) {
    if (input_dim == 0) fail(errc::dim_mismatch, "input_dim must be positive");
    if (layer_dims.empty()) fail(errc::dim_mismatch, "head needs at least one layer");
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
      fail(errc::numerical_bounds_violation, "dropout rate must lie in [0, 1)");
    }
    std::size_t in = input_dim;
    for (std::size_t out : layer_dims) {
      affine_layer layer;
      layer.in_dim = in;
      layer.out_dim = out;
      layer.weights.assign(out * in, 0.0);
      layer.bias.assign(out, 0.0);
      layers_.push_back(std::move(layer));
      in = out;
    }
  }

  static projection_head with_default_architecture(facet f,
                                                   std::size_t input_dim = kDefaultInputDim) {
    return projection_head(f, input_dim, default_head_dims(f));
  }

  facet head_facet() const { return facet_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return layers_.back().out_dim; }
  double dropout_rate() const { return dropout_rate_; }
  void set_dropout_rate(double r) { dropout_rate_ = r; }

  std::vector<affine_layer>& layers() { return layers_; }
  const std::vector<affine_layer>& layers() const { return layers_; }

  // Free-form JSON descriptor persisted alongside the weights.
  const std::string& descriptor() const { return descriptor_; }
  void set_descriptor(std::string d) { descriptor_ = std::move(d); }

  // Uniform(+-sqrt(6/(in+out))) weights, zero biases.
  void initialize_weights(rng& gen) {
    for (auto& layer : layers_) {
      const double bound =
          std::sqrt(6.0 / static_cast<double>(layer.in_dim + layer.out_dim));
      for (double& w : layer.weights) w = gen.uniform(-bound, bound);
      for (double& b : layer.bias) b = 0.0;
    }
  }

  void validate() const {
    if (layers_.empty()) fail(errc::corrupt_header, "head has no layers");
    std::size_t in = input_dim_;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const auto& layer = layers_[k];
      if (layer.in_dim != in) {
        fail(errc::dim_mismatch, "layer " + std::to_string(k) + " expects in_dim " +
                                     std::to_string(layer.in_dim) + ", chain gives " +
                                     std::to_string(in));
      }
      if (layer.weights.size() != layer.in_dim * layer.out_dim ||
          layer.bias.size() != layer.out_dim) {
        fail(errc::shape_mismatch, "layer " + std::to_string(k) + " storage mismatch");
      }
      for (double w : layer.weights) {
        if (!std::isfinite(w)) fail(errc::non_finite_input, "non-finite weight");
      }
      for (double b : layer.bias) {
        if (!std::isfinite(b)) fail(errc::non_finite_input, "non-finite bias");
      }
      in = layer.out_dim;
    }
  }

 private:
  facet facet_ = facet::voice;
  std::size_t input_dim_ = 0;
  double dropout_rate_ = kDefaultDropoutRate;
  std::vector<affine_layer> layers_;
  std::string descriptor_;
};

namespace detail {

inline void affine_apply(const affine_layer& layer, std::span<const double> in,
                         std::vector<double>& out) {
  out.assign(layer.out_dim, 0.0);
  for (std::size_t r = 0; r < layer.out_dim; ++r) {
    const double* w = layer.weights.data() + r * layer.in_dim;
    double acc = layer.bias[r];
    for (std::size_t c = 0; c < layer.in_dim; ++c) acc += w[c] * in[c];
    out[r] = acc;
  }
}

}  // namespace detail

// Forward pass for one vector. Inference mode is a pure function; training
// mode zeroes input coordinates with probability dropout_rate and rescales
// survivors by 1/(1-rate) so the expectation matches inference.
inline std::vector<double> head_forward(const projection_head& head, std::span<const double> input,
                                        bool training = false, rng* dropout_rng = nullptr) {
  if (input.size() != head.input_dim()) {
    fail(errc::dim_mismatch, "input length " + std::to_string(input.size()) +
                                 " != head input_dim " + std::to_string(head.input_dim()));
  }
  std::vector<double> current(input.begin(), input.end());
  if (training && head.dropout_rate() > 0.0) {
    if (dropout_rng == nullptr) fail(errc::degenerate_batch, "training forward needs an rng");
    const double rate = head.dropout_rate();
    const double scale = 1.0 / (1.0 - rate);
    for (double& v : current) {
      v = dropout_rng->real01() < rate ? 0.0 : v * scale;
    }
  }
  std::vector<double> next;
  const auto& layers = head.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    detail::affine_apply(layers[k], current, next);
    if (k + 1 < layers.size()) {
      for (double& v : next) v = gelu(v);
    }
    current.swap(next);
  }
  return current;
}

// ---------------------------------------------------------------------------
// Serialization

constexpr std::uint32_t kHeadFormatVersion = 1;

inline std::vector<std::uint8_t> head_save(const projection_head& head) {
  head.validate();
  byte_writer w;
  w.bytes("MADH", 4);
  w.u32(kHeadFormatVersion);
  w.u8(static_cast<std::uint8_t>(head.head_facet()));
  if (head.layers().size() > 255) fail(errc::shape_mismatch, "too many layers");
  w.u8(static_cast<std::uint8_t>(head.layers().size()));
  for (const auto& layer : head.layers()) {
    w.u32(static_cast<std::uint32_t>(layer.in_dim));
    w.u32(static_cast<std::uint32_t>(layer.out_dim));
    for (double x : layer.weights) w.f32(static_cast<float>(x));
    for (double x : layer.bias) w.f32(static_cast<float>(x));
  }
  w.u32(static_cast<std::uint32_t>(head.descriptor().size()));
  w.bytes(head.descriptor().data(), head.descriptor().size());
  w.append_crc();
  return w.take();
}

inline projection_head head_load(std::span<const std::uint8_t> bytes,
                                 const std::string& source = "<memory>") {
  if (bytes.size() < 14) fail(errc::corrupt_header, source + ": file too short for a head");
  byte_reader r(bytes.data(), bytes.size(), source);

  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, "MADH", 4) != 0) fail(errc::corrupt_header, source + ": bad magic");
  const std::uint32_t version = r.u32();
  if (version != kHeadFormatVersion) {
    fail(errc::version_unsupported, source + ": head format version " + std::to_string(version));
  }
  const std::uint8_t facet_tag = r.u8();
  if (facet_tag > 4) fail(errc::corrupt_header, source + ": unknown facet tag");
  const std::uint8_t layer_count = r.u8();
  if (layer_count == 0) fail(errc::corrupt_header, source + ": zero layers");

  std::vector<affine_layer> layers;
  for (std::uint8_t k = 0; k < layer_count; ++k) {
    affine_layer layer;
    layer.in_dim = r.u32();
    layer.out_dim = r.u32();
    if (layer.in_dim == 0 || layer.out_dim == 0 || layer.in_dim > (1u << 20) ||
        layer.out_dim > (1u << 20)) {
      fail(errc::corrupt_header, source + ": implausible layer dimension");
    }
    const std::uint64_t weight_count =
        static_cast<std::uint64_t>(layer.in_dim) * layer.out_dim;
    if ((weight_count + layer.out_dim) * 4 > r.remaining()) r.truncated("layer payload");
    layer.weights.resize(weight_count);
    for (auto& x : layer.weights) x = r.f32();
    layer.bias.resize(layer.out_dim);
    for (auto& x : layer.bias) x = r.f32();
    layers.push_back(std::move(layer));
  }

  const std::uint32_t descriptor_len = r.u32();
  if (descriptor_len + 4ull > r.remaining()) r.truncated("descriptor block");
  std::string descriptor(descriptor_len, '\0');
  if (descriptor_len > 0) r.raw(descriptor.data(), descriptor_len);

  if (r.remaining() != 4) fail(errc::corrupt_header, source + ": trailing bytes before crc");
  r.check_crc(r.offset());

  std::vector<std::size_t> dims;
  dims.reserve(layers.size());
  for (const auto& l : layers) dims.push_back(l.out_dim);
  projection_head head(static_cast<facet>(facet_tag), layers.front().in_dim, dims);
  head.layers() = std::move(layers);
  head.set_descriptor(std::move(descriptor));
  head.validate();
  return head;
}

inline void head_save_file(const projection_head& head, const std::string& path) {
  const auto bytes = head_save(head);
  write_file_atomic(path, bytes.data(), bytes.size());
}

inline projection_head head_load_file(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return head_load(bytes, path);
}

}  // namespace mads

#include <catch2/catch.hpp>

#include <cmath>

#include "helpers.hpp"
#include "mads/projection.hpp"
#include "mads/rng.hpp"

using namespace mads;

TEST_CASE("gelu matches the Gaussian-CDF definition", "[projection]") {
  REQUIRE(gelu(0.0) == 0.0);
  REQUIRE(gelu(10.0) == Approx(10.0).margin(1e-9));
  // quadrature oracle for Phi(1)
  const double phi1 = test_util::normal_cdf_quadrature(1.0);
  REQUIRE(gelu(1.0) == Approx(1.0 * phi1).margin(1e-9));
  REQUIRE(gelu(1.0) == Approx(0.841345).margin(5e-7));
}

TEST_CASE("gelu derivative against central differences", "[projection]") {
  const double eps = 1e-6;
  for (double x : {-3.0, -1.0, -0.2, 0.0, 0.4, 1.0, 2.5}) {
    const double fd = (gelu(x + eps) - gelu(x - eps)) / (2.0 * eps);
    REQUIRE(gelu_derivative(x) == Approx(fd).margin(1e-8));
  }
}

TEST_CASE("default architectures", "[projection]") {
  for (facet f : {facet::voice, facet::emotion, facet::accent, facet::noise}) {
    const auto head = projection_head::with_default_architecture(f);
    REQUIRE(head.input_dim() == 192);
    REQUIRE(head.layers().size() == 2);
    REQUIRE(head.layers()[0].out_dim == 256);
    REQUIRE(head.layers()[1].out_dim == 128);
    REQUIRE(head.dropout_rate() == Approx(0.1));
  }
  const auto gender_head = projection_head::with_default_architecture(facet::gender);
  REQUIRE(gender_head.layers().size() == 4);
  REQUIRE(gender_head.layers()[0].out_dim == 256);
  REQUIRE(gender_head.layers()[1].out_dim == 256);
  REQUIRE(gender_head.layers()[2].out_dim == 128);
  REQUIRE(gender_head.layers()[3].out_dim == 128);
  // dimension chaining
  REQUIRE(gender_head.layers()[0].in_dim == 192);
  REQUIRE(gender_head.layers()[1].in_dim == 256);
  REQUIRE(gender_head.layers()[2].in_dim == 256);
  REQUIRE(gender_head.layers()[3].in_dim == 128);
}

TEST_CASE("forward pass on degenerate heads", "[projection]") {
  // identity single square layer, zero bias: no activation after the last layer
  projection_head identity(facet::voice, 2, {2}, 0.0);
  identity.layers()[0].weights = {1, 0, 0, 1};
  const auto out = head_forward(identity, std::vector<double>{1.0, 2.0});
  REQUIRE(out == std::vector<double>{1.0, 2.0});

  // zero weights, bias b
  projection_head biased(facet::voice, 3, {2}, 0.0);
  biased.layers()[0].bias = {4.0, -1.0};
  REQUIRE(head_forward(biased, std::vector<double>{9, 9, 9}) == std::vector<double>{4.0, -1.0});

  try {
    head_forward(identity, std::vector<double>{1.0, 2.0, 3.0});
    FAIL("expected DimMismatch");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::dim_mismatch);
  }
}

TEST_CASE("two-layer forward against straight-line recomputation", "[projection]") {
  projection_head head(facet::emotion, 2, {2, 2}, 0.0);
  head.layers()[0].weights = {0.5, -1.0, 2.0, 0.25};
  head.layers()[0].bias = {0.1, -0.2};
  head.layers()[1].weights = {1.5, 0.5, -0.75, 1.0};
  head.layers()[1].bias = {0.0, 0.3};

  const std::vector<double> x = {0.8, -0.4};
  // second implementation: scalar arithmetic, no shared code
  const double z0 = 0.5 * x[0] + (-1.0) * x[1] + 0.1;
  const double z1 = 2.0 * x[0] + 0.25 * x[1] - 0.2;
  const double a0 = gelu(z0);
  const double a1 = gelu(z1);
  const double y0 = 1.5 * a0 + 0.5 * a1 + 0.0;
  const double y1 = -0.75 * a0 + 1.0 * a1 + 0.3;

  const auto out = head_forward(head, x);
  REQUIRE(out[0] == Approx(y0).margin(1e-15));
  REQUIRE(out[1] == Approx(y1).margin(1e-15));
}

TEST_CASE("inference is deterministic, training dropout is unbiased", "[projection]") {
  rng init(7);
  projection_head head(facet::noise, 6, {4}, 0.25);
  head.initialize_weights(init);
  const std::vector<double> x = {0.5, -1.0, 2.0, 0.1, -0.4, 0.9};

  const auto a = head_forward(head, x);
  const auto b = head_forward(head, x);
  REQUIRE(a == b);  // bitwise

  // inverted-dropout unbiasedness on a linear head, 1e5 passes
  rng drop(99);
  std::vector<double> mean(4, 0.0);
  const int passes = 100000;
  for (int i = 0; i < passes; ++i) {
    const auto y = head_forward(head, x, true, &drop);
    for (int j = 0; j < 4; ++j) mean[j] += y[j];
  }
  for (int j = 0; j < 4; ++j) {
    mean[j] /= passes;
    REQUIRE(mean[j] == Approx(a[j]).epsilon(0.02));
  }
}

TEST_CASE("head save/load round trip", "[projection]") {
  rng init(2718);
  projection_head head(facet::gender, 192, {256, 256, 128, 128});
  head.initialize_weights(init);
  head.set_descriptor(R"({"facet":"gender","seed":2718})");

  const auto bytes = head_save(head);
  const auto loaded = head_load(bytes);
  const auto bytes2 = head_save(loaded);
  REQUIRE(bytes == bytes2);  // save -> load -> save is bit-exact

  REQUIRE(loaded.head_facet() == facet::gender);
  REQUIRE(loaded.input_dim() == 192);
  REQUIRE(loaded.layers().size() == 4);
  REQUIRE(loaded.descriptor() == head.descriptor());
  loaded.validate();

  // f32 quantization happens exactly once
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t i = 0; i < loaded.layers()[k].weights.size(); ++i) {
      REQUIRE(loaded.layers()[k].weights[i] ==
              static_cast<double>(static_cast<float>(head.layers()[k].weights[i])));
    }
  }
}

TEST_CASE("head file corruption is detected", "[projection]") {
  rng init(5);
  projection_head head(facet::voice, 4, {3, 2}, 0.0);
  head.initialize_weights(init);
  auto bytes = head_save(head);

  // truncation
  for (std::size_t cut : {0ul, 3ul, 9ul, bytes.size() / 2, bytes.size() - 1}) {
    std::vector<std::uint8_t> clipped(bytes.begin(), bytes.begin() + cut);
    REQUIRE_THROWS_AS(head_load(clipped), error);
  }

  // flipped payload bit
  auto flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  try {
    head_load(flipped);
    FAIL("expected a corruption error");
  } catch (const error& e) {
    REQUIRE((e.code() == errc::checksum_mismatch || e.code() == errc::corrupt_header));
  }

  // wrong magic
  auto renamed = bytes;
  renamed[0] = 'X';
  try {
    head_load(renamed);
    FAIL("expected CorruptHeader");
  } catch (const error& e) {
    REQUIRE(e.code() == errc::corrupt_header);
  }

  // unsupported version
  auto versioned = bytes;
  versioned[4] = 0x7F;
  try {
    head_load(versioned);
    FAIL("expected VersionUnsupported");
  } catch (const error& e) {
    REQUIRE((e.code() == errc::version_unsupported || e.code() == errc::checksum_mismatch));
  }
}

#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "epsrob/error.hpp"
#include "epsrob/network.hpp"
#include "epsrob/tensor.hpp"
#include "support.hpp"

using namespace epsrob;

namespace {

// Direct (c, y, x) loop with explicit padding, written without the
// library's index arithmetic.
std::vector<double> naive_conv(const Conv2dLayer& l, const std::vector<double>& in, std::size_t h, std::size_t w) {
  const std::size_t ph = h + 2 * l.padding, pw = w + 2 * l.padding;
  std::vector<double> padded(l.in_channels * ph * pw, 0.0);
  for (std::size_t c = 0; c < l.in_channels; ++c)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x)
        padded[(c * ph + y + l.padding) * pw + x + l.padding] = in[(c * h + y) * w + x];
  const std::size_t oh = (ph - l.kernel_h) / l.stride + 1, ow = (pw - l.kernel_w) / l.stride + 1;
  std::vector<double> out;
  for (std::size_t o = 0; o < l.out_channels; ++o)
    for (std::size_t y = 0; y < oh; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        double s = l.bias[o];
        for (std::size_t c = 0; c < l.in_channels; ++c)
          for (std::size_t a = 0; a < l.kernel_h; ++a)
            for (std::size_t b = 0; b < l.kernel_w; ++b)
              s += l.weight[((o * l.in_channels + c) * l.kernel_h + a) * l.kernel_w + b] *
                   padded[(c * ph + y * l.stride + a) * pw + x * l.stride + b];
        out.push_back(s);
      }
  return out;
}

}  // namespace

TEST_CASE("tensor construction validates shape and values") {
  CHECK_NOTHROW(Tensor({2, 3}, std::vector<double>(6, 1.0)));
  CHECK_THROWS_AS(Tensor({2, 3}, std::vector<double>(5, 1.0)), ShapeError);
  CHECK_THROWS_AS(Tensor({0, 3}, {}), ShapeError);
  CHECK_THROWS_AS(Tensor({}, {}), ShapeError);
  CHECK_THROWS_AS(Tensor({1}, {std::nan("")}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor({1}, {std::numeric_limits<double>::infinity()}), std::invalid_argument);

  const Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.rows() == 2);
  CHECK(t.row(1)[0] == 4);
  CHECK_THROWS_AS(t.row(2), std::out_of_range);
  CHECK(t.reshaped({3, 2}).shape() == Shape{3, 2});
  CHECK_THROWS_AS(t.reshaped({4, 2}), ShapeError);
  CHECK(Tensor::zeros({2, 2}).data()[3] == 0.0);
}

TEST_CASE("dense forward matches hand computation") {
  DenseLayer d{2, 2, {1, 2, 3, 4}, {0.5, -1}};
  const NetworkModel m({2}, 2, {d});
  const Tensor out = forward(m, Tensor({1, 2}, {1, -1}));
  CHECK(out.data()[0] == doctest::Approx(-0.5));
  CHECK(out.data()[1] == doctest::Approx(-2.0));
}

TEST_CASE("conv2d agrees with a naive loop") {
  for (std::size_t stride : {1u, 2u})
    for (std::size_t padding : {0u, 1u}) {
      Conv2dLayer conv{2, 3, 3, 2, testing::random_weights(36, 11, 1.0), testing::random_weights(3, 12, 1.0), stride,
                       padding};
      const Shape out_shape = layer_output_shape(conv, {2, 5, 6});
      const std::vector<double> input = testing::random_weights(60, 13, 2.0);
      const std::vector<double> expected = naive_conv(conv, input, 5, 6);
      REQUIRE(expected.size() == shape_size(out_shape));
      const NetworkModel probe({2, 5, 6}, expected.size(), {conv, FlattenLayer{}});
      const Tensor got = forward(probe, Tensor({1, 2, 5, 6}, input));
      for (std::size_t i = 0; i < expected.size(); ++i) CHECK(got.data()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
    }
}

TEST_CASE("maxpool, flatten and normalize") {
  const NetworkModel pool({1, 4, 4}, 4, {MaxPool2dLayer{2, 2}, FlattenLayer{}});
  std::vector<double> in(16);
  for (std::size_t i = 0; i < 16; ++i) in[i] = static_cast<double>((i * 7) % 16);
  const Tensor out = forward(pool, Tensor({1, 1, 4, 4}, in));
  // Blocks: {0,7,12,3}, {14,5,10,1}, {8,15,4,11}, {6,13,2,9}.
  CHECK(std::vector<double>(out.data().begin(), out.data().end()) == std::vector<double>{12, 14, 15, 13});

  const NetworkModel norm({2, 1, 1}, 2, {NormalizeLayer{{1, 2}, {2, 4}}, FlattenLayer{}});
  const Tensor n = forward(norm, Tensor({1, 2, 1, 1}, {3, 10}));
  CHECK(n.data()[0] == doctest::Approx(1.0));
  CHECK(n.data()[1] == doctest::Approx(2.0));
}

TEST_CASE("batched forward equals row-by-row forward bitwise") {
  const NetworkModel m = testing::toy_conv_model();
  const std::vector<double> inputs = testing::random_weights(36 * 9, 5, 1.0);
  const Tensor batch({9, 1, 6, 6}, inputs);
  const Tensor all = forward(m, batch);
  for (std::size_t r = 0; r < 9; ++r) {
    const Tensor one({1, 1, 6, 6}, std::vector<double>(inputs.begin() + r * 36, inputs.begin() + (r + 1) * 36));
    const Tensor single = forward(m, one);
    for (std::size_t j = 0; j < 3; ++j) CHECK(single.data()[j] == all.row(r)[j]);
  }
}

TEST_CASE("argmax ties and indicative") {
  const std::vector<double> tie{1.0, 3.0, 3.0};
  CHECK(argmax(tie) == 1);
  CHECK_THROWS_AS(argmax(std::vector<double>{}), std::invalid_argument);

  const NetworkModel m({2}, 2, {DenseLayer{2, 2, {1, 0, 0, 1}, {0, 0}}});
  const Tensor batch({3, 2}, {1, 0, 0, 1, 2, 2});
  CHECK(predict(m, batch) == std::vector<std::size_t>{0, 1, 0});
  CHECK(indicative(m, batch, LabelSet{1}) == std::vector<std::uint8_t>{0, 1, 0});
  CHECK(indicative(m, batch, LabelSet{0, 1}) == std::vector<std::uint8_t>{1, 1, 1});
}

TEST_CASE("label set validation") {
  const LabelSet s{3, 1, 3};
  CHECK(s.labels() == std::vector<std::size_t>{1, 3});
  CHECK(s.contains(3));
  CHECK_FALSE(s.contains(2));
  CHECK_THROWS_AS(s.validate(3), std::invalid_argument);
  CHECK_NOTHROW(s.validate(4));
  CHECK_THROWS_AS(LabelSet{}.validate(4), std::invalid_argument);
}

TEST_CASE("model validation reports the offending layer") {
  try {
    NetworkModel({3}, 2, {DenseLayer{3, 4, std::vector<double>(12, 0.0), std::vector<double>(4, 0.0)}, ReluLayer{},
                          DenseLayer{5, 2, std::vector<double>(10, 0.0), {0, 0}}});
    FAIL("expected ModelFormatError");
  } catch (const ModelFormatError& e) {
    CHECK(e.layer_index() == 2);
    CHECK(std::string(e.what()).find("shape mismatch") != std::string::npos);
  }
  CHECK_THROWS_AS(NetworkModel({2}, 1, {DenseLayer{2, 1, {0, 0}, {0}}}), ModelFormatError);
  CHECK_THROWS_AS(NetworkModel({2}, 3, {DenseLayer{2, 2, {0, 0, 0, 0}, {0, 0}}}), ModelFormatError);
  CHECK_THROWS_AS(NetworkModel({2}, 2, {DenseLayer{2, 2, {0, 0, 0}, {0, 0}}}), ModelFormatError);
  CHECK_THROWS_AS(NetworkModel({1, 3, 3}, 2, {MaxPool2dLayer{0, 1}}), ModelFormatError);
  CHECK_THROWS_AS(NetworkModel({2}, 2, {NormalizeLayer{{0}, {0}}}), ModelFormatError);
  CHECK_THROWS_AS(NetworkModel({2}, 2, {}), ModelFormatError);
}

TEST_CASE("forward rejects mismatched batch shape") {
  const NetworkModel m({2}, 2, {DenseLayer{2, 2, {1, 0, 0, 1}, {0, 0}}});
  CHECK_THROWS_AS(forward(m, Tensor({1, 3}, {0, 0, 0})), ShapeError);
}

TEST_CASE("overflow is reported with layer index") {
  const double big = 1e300;
  const NetworkModel m({1}, 2, {DenseLayer{1, 2, {big, big}, {0, 0}}, ReluLayer{}, DenseLayer{2, 2, {big, 0, 0, big}, {0, 0}}});
  try {
    forward(m, Tensor({1, 1}, {1e10}));
    FAIL("expected NumericOverflowError");
  } catch (const NumericOverflowError& e) {
    CHECK(e.layer_index() == 0);
  }
}

#include "epsrob/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "epsrob/error.hpp"

namespace epsrob {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::size_t pooled_extent(std::size_t extent, std::size_t window, std::size_t stride, std::size_t pad) {
  if (extent + 2 * pad < window) throw ShapeError("spatial extent smaller than window");
  return (extent + 2 * pad - window) / stride + 1;
}

void check_parameters(const LayerSpec& layer, std::size_t index) {
  std::visit(
      Overloaded{
          [&](const DenseLayer& l) {
            if (l.in == 0 || l.out == 0) throw ModelFormatError("dense layer needs positive in/out", index);
            if (l.weight.size() != l.in * l.out)
              throw ModelFormatError("dense weight has " + std::to_string(l.weight.size()) +
                                         " entries, expected " + std::to_string(l.in * l.out),
                                     index);
            if (l.bias.size() != l.out) throw ModelFormatError("dense bias length differs from output size", index);
            if (!all_finite(l.weight) || !all_finite(l.bias))
              throw ModelFormatError("non-finite dense parameter", index);
          },
          [](const ReluLayer&) {},
          [&](const Conv2dLayer& l) {
            if (l.in_channels == 0 || l.out_channels == 0 || l.kernel_h == 0 || l.kernel_w == 0)
              throw ModelFormatError("conv2d dimensions must be positive", index);
            if (l.stride == 0) throw ModelFormatError("conv2d stride must be >= 1", index);
            if (l.weight.size() != l.out_channels * l.in_channels * l.kernel_h * l.kernel_w)
              throw ModelFormatError("conv2d weight size mismatch", index);
            if (l.bias.size() != l.out_channels) throw ModelFormatError("conv2d bias length mismatch", index);
            if (!all_finite(l.weight) || !all_finite(l.bias))
              throw ModelFormatError("non-finite conv2d parameter", index);
          },
          [&](const MaxPool2dLayer& l) {
            if (l.window == 0 || l.stride == 0) throw ModelFormatError("maxpool2d window and stride must be >= 1", index);
          },
          [](const FlattenLayer&) {},
          [&](const NormalizeLayer& l) {
            if (l.mean.empty() || l.mean.size() != l.scale.size())
              throw ModelFormatError("normalize mean and scale must be non-empty and equal length", index);
            if (!all_finite(l.mean) || !all_finite(l.scale))
              throw ModelFormatError("non-finite normalize parameter", index);
            if (std::any_of(l.scale.begin(), l.scale.end(), [](double s) { return s <= 0.0; }))
              throw ModelFormatError("normalize scale entries must be strictly positive", index);
          },
      },
      layer);
}

void apply_dense(const DenseLayer& l, std::span<const double> in, std::span<double> out) {
  for (std::size_t o = 0; o < l.out; ++o) {
    const double* w = l.weight.data() + o * l.in;
    double acc = l.bias[o];
    for (std::size_t i = 0; i < l.in; ++i) acc += w[i] * in[i];
    out[o] = acc;
  }
}

void apply_conv(const Conv2dLayer& l, const Shape& in_shape, const Shape& out_shape,
                std::span<const double> in, std::span<double> out) {
  const std::size_t in_h = in_shape[1], in_w = in_shape[2];
  const std::size_t out_h = out_shape[1], out_w = out_shape[2];
  const auto pad = static_cast<std::ptrdiff_t>(l.padding);
  for (std::size_t oc = 0; oc < l.out_channels; ++oc) {
    for (std::size_t oy = 0; oy < out_h; ++oy) {
      for (std::size_t ox = 0; ox < out_w; ++ox) {
        double acc = l.bias[oc];
        for (std::size_t ic = 0; ic < l.in_channels; ++ic) {
          const double* w = l.weight.data() + ((oc * l.in_channels + ic) * l.kernel_h) * l.kernel_w;
          const double* plane = in.data() + ic * in_h * in_w;
          for (std::size_t ky = 0; ky < l.kernel_h; ++ky) {
            const auto iy = static_cast<std::ptrdiff_t>(oy * l.stride + ky) - pad;
            if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(in_h)) continue;
            for (std::size_t kx = 0; kx < l.kernel_w; ++kx) {
              const auto ix = static_cast<std::ptrdiff_t>(ox * l.stride + kx) - pad;
              if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(in_w)) continue;
              acc += w[ky * l.kernel_w + kx] * plane[iy * static_cast<std::ptrdiff_t>(in_w) + ix];
            }
          }
        }
        out[(oc * out_h + oy) * out_w + ox] = acc;
      }
    }
  }
}

void apply_maxpool(const MaxPool2dLayer& l, const Shape& in_shape, const Shape& out_shape,
                   std::span<const double> in, std::span<double> out) {
  const std::size_t channels = in_shape[0], in_h = in_shape[1], in_w = in_shape[2];
  const std::size_t out_h = out_shape[1], out_w = out_shape[2];
  for (std::size_t c = 0; c < channels; ++c) {
    const double* plane = in.data() + c * in_h * in_w;
    for (std::size_t oy = 0; oy < out_h; ++oy) {
      for (std::size_t ox = 0; ox < out_w; ++ox) {
        double best = plane[(oy * l.stride) * in_w + ox * l.stride];
        for (std::size_t ky = 0; ky < l.window; ++ky)
          for (std::size_t kx = 0; kx < l.window; ++kx)
            best = std::max(best, plane[(oy * l.stride + ky) * in_w + ox * l.stride + kx]);
        out[(c * out_h + oy) * out_w + ox] = best;
      }
    }
  }
}

void apply_normalize(const NormalizeLayer& l, const Shape& in_shape, std::span<const double> in,
                     std::span<double> out) {
  const std::size_t channels = in_shape[0];
  const std::size_t per_channel = in.size() / channels;
  for (std::size_t c = 0; c < channels; ++c) {
    const std::size_t k = l.mean.size() == 1 ? 0 : c;
    for (std::size_t j = 0; j < per_channel; ++j) {
      const std::size_t idx = c * per_channel + j;
      out[idx] = (in[idx] - l.mean[k]) / l.scale[k];
    }
  }
}

void apply_layer(const LayerSpec& layer, const Shape& in_shape, const Shape& out_shape,
                 std::span<const double> in, std::span<double> out) {
  std::visit(Overloaded{
                 [&](const DenseLayer& l) { apply_dense(l, in, out); },
                 [&](const ReluLayer&) {
                   for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
                 },
                 [&](const Conv2dLayer& l) { apply_conv(l, in_shape, out_shape, in, out); },
                 [&](const MaxPool2dLayer& l) { apply_maxpool(l, in_shape, out_shape, in, out); },
                 [&](const FlattenLayer&) { std::copy(in.begin(), in.end(), out.begin()); },
                 [&](const NormalizeLayer& l) { apply_normalize(l, in_shape, in, out); },
             },
             layer);
}

}  // namespace

std::string_view layer_kind(const LayerSpec& layer) {
  return std::visit(Overloaded{
                        [](const DenseLayer&) { return std::string_view("dense"); },
                        [](const ReluLayer&) { return std::string_view("relu"); },
                        [](const Conv2dLayer&) { return std::string_view("conv2d"); },
                        [](const MaxPool2dLayer&) { return std::string_view("maxpool2d"); },
                        [](const FlattenLayer&) { return std::string_view("flatten"); },
                        [](const NormalizeLayer&) { return std::string_view("normalize"); },
                    },
                    layer);
}

Shape layer_output_shape(const LayerSpec& layer, const Shape& input) {
  return std::visit(
      Overloaded{
          [&](const DenseLayer& l) -> Shape {
            if (input.size() != 1 || input[0] != l.in)
              throw ShapeError("dense expects input [" + std::to_string(l.in) + "], got " + shape_to_string(input));
            return {l.out};
          },
          [&](const ReluLayer&) -> Shape { return input; },
          [&](const Conv2dLayer& l) -> Shape {
            if (input.size() != 3 || input[0] != l.in_channels)
              throw ShapeError("conv2d expects input [" + std::to_string(l.in_channels) + ",H,W], got " +
                               shape_to_string(input));
            return {l.out_channels, pooled_extent(input[1], l.kernel_h, l.stride, l.padding),
                    pooled_extent(input[2], l.kernel_w, l.stride, l.padding)};
          },
          [&](const MaxPool2dLayer& l) -> Shape {
            if (input.size() != 3) throw ShapeError("maxpool2d expects input [C,H,W], got " + shape_to_string(input));
            return {input[0], pooled_extent(input[1], l.window, l.stride, 0),
                    pooled_extent(input[2], l.window, l.stride, 0)};
          },
          [&](const FlattenLayer&) -> Shape { return {shape_size(input)}; },
          [&](const NormalizeLayer& l) -> Shape {
            if (l.mean.size() != 1 && l.mean.size() != input[0])
              throw ShapeError("normalize has " + std::to_string(l.mean.size()) + " channels, input is " +
                               shape_to_string(input));
            return input;
          },
      },
      layer);
}

NetworkModel::NetworkModel(Shape input_shape, std::size_t num_labels, std::vector<LayerSpec> layers)
    : input_shape_(std::move(input_shape)), num_labels_(num_labels), layers_(std::move(layers)) {
  if (input_shape_.empty() || std::find(input_shape_.begin(), input_shape_.end(), 0u) != input_shape_.end())
    throw ModelFormatError("input_shape must be a non-empty list of positive sizes");
  if (num_labels_ < 2) throw ModelFormatError("num_labels must be at least 2");
  if (layers_.empty()) throw ModelFormatError("model has no layers");
  input_size_ = shape_size(input_shape_);

  Shape current = input_shape_;
  layer_shapes_.reserve(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    check_parameters(layers_[i], i);
    try {
      current = layer_output_shape(layers_[i], current);
    } catch (const ShapeError& e) {
      throw ModelFormatError(std::string("shape mismatch: ") + e.what(), i);
    }
    layer_shapes_.push_back(current);
  }
  if (current != Shape{num_labels_})
    throw ModelFormatError("final layer yields " + shape_to_string(current) + ", expected [" +
                               std::to_string(num_labels_) + "]",
                           layers_.size() - 1);
}

LabelSet::LabelSet(std::vector<std::size_t> labels) : labels_(std::move(labels)) {
  std::sort(labels_.begin(), labels_.end());
  labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
}

bool LabelSet::contains(std::size_t label) const {
  return std::binary_search(labels_.begin(), labels_.end(), label);
}

void LabelSet::validate(std::size_t num_labels) const {
  if (labels_.empty()) throw std::invalid_argument("label set is empty");
  if (labels_.back() >= num_labels)
    throw std::invalid_argument("label " + std::to_string(labels_.back()) + " out of range for " +
                                std::to_string(num_labels) + " labels");
}

Tensor forward(const NetworkModel& model, const Tensor& batch) {
  const Shape& in_shape = model.input_shape();
  if (batch.rank() != in_shape.size() + 1 || !std::equal(in_shape.begin(), in_shape.end(), batch.shape().begin() + 1))
    throw ShapeError("batch shape " + shape_to_string(batch.shape()) + " does not match model input " +
                     shape_to_string(in_shape) + " with a leading batch axis");

  std::size_t widest = model.input_size();
  for (const Shape& s : model.layer_shapes()) widest = std::max(widest, shape_size(s));
  std::vector<double> a(widest), b(widest);

  const std::size_t rows = batch.rows();
  const std::size_t m = model.num_labels();
  std::vector<double> logits(rows * m);
  const auto& layers = model.layers();
  const auto& shapes = model.layer_shapes();

  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = batch.row(r);
    std::copy(row.begin(), row.end(), a.begin());
    const Shape* current = &in_shape;
    std::size_t current_size = model.input_size();
    for (std::size_t li = 0; li < layers.size(); ++li) {
      const std::size_t out_size = shape_size(shapes[li]);
      std::span<double> out(b.data(), out_size);
      apply_layer(layers[li], *current, shapes[li], std::span<const double>(a.data(), current_size), out);
      if (!all_finite(out)) throw NumericOverflowError(li, std::string(layer_kind(layers[li])));
      std::swap(a, b);
      current = &shapes[li];
      current_size = out_size;
    }
    std::copy_n(a.begin(), m, logits.begin() + static_cast<std::ptrdiff_t>(r * m));
  }
  return Tensor({rows, m}, std::move(logits));
}

std::size_t argmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("argmax of empty logits");
  std::size_t best = 0;
  for (std::size_t i = 1; i < logits.size(); ++i)
    if (logits[i] > logits[best]) best = i;
  return best;
}

std::vector<std::size_t> predict(const NetworkModel& model, const Tensor& batch) {
  const Tensor logits = forward(model, batch);
  std::vector<std::size_t> labels(logits.rows());
  for (std::size_t r = 0; r < labels.size(); ++r) labels[r] = argmax(logits.row(r));
  return labels;
}

std::vector<std::uint8_t> indicative(const NetworkModel& model, const Tensor& batch, const LabelSet& omega) {
  omega.validate(model.num_labels());
  const auto labels = predict(model, batch);
  std::vector<std::uint8_t> hits(labels.size());
  std::transform(labels.begin(), labels.end(), hits.begin(),
                 [&](std::size_t label) { return static_cast<std::uint8_t>(omega.contains(label)); });
  return hits;
}

}  // namespace epsrob

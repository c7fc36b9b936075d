#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "epsrob/tensor.hpp"

namespace epsrob {

/// Fully connected layer on a rank-1 input. `weight` is out x in, row-major.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

struct ReluLayer {
  bool operator==(const ReluLayer&) const = default;
};

/// 2-D convolution over a (channels, height, width) input with symmetric zero
/// padding. `weight` is out_channels x in_channels x kernel_h x kernel_w.
struct Conv2dLayer {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  std::vector<double> weight;
  std::vector<double> bias;
  std::size_t stride = 1;
  std::size_t padding = 0;

  bool operator==(const Conv2dLayer&) const = default;
};

struct MaxPool2dLayer {
  std::size_t window = 2;
  std::size_t stride = 2;

  bool operator==(const MaxPool2dLayer&) const = default;
};

struct FlattenLayer {
  bool operator==(const FlattenLayer&) const = default;
};

/// (x - mean) / scale per leading-axis channel. A single entry broadcasts.
struct NormalizeLayer {
  std::vector<double> mean;
  std::vector<double> scale;

  bool operator==(const NormalizeLayer&) const = default;
};

using LayerSpec =
    std::variant<DenseLayer, ReluLayer, Conv2dLayer, MaxPool2dLayer, FlattenLayer, NormalizeLayer>;

std::string_view layer_kind(const LayerSpec& layer);

/// Per-sample output shape of `layer` for a per-sample input shape.
/// Throws ShapeError when the layer cannot consume `input`.
Shape layer_output_shape(const LayerSpec& layer, const Shape& input);

/// A validated feed-forward classifier. Immutable once constructed, so one
/// instance can be shared by any number of concurrent forward passes.
class NetworkModel {
 public:
  /// Throws ModelFormatError (with the offending layer index) if the layers
  /// do not chain from `input_shape` to a vector of `num_labels` logits.
  NetworkModel(Shape input_shape, std::size_t num_labels, std::vector<LayerSpec> layers);

  const Shape& input_shape() const noexcept { return input_shape_; }
  std::size_t input_size() const noexcept { return input_size_; }
  std::size_t num_labels() const noexcept { return num_labels_; }
  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  /// Per-sample shape after each layer.
  const std::vector<Shape>& layer_shapes() const noexcept { return layer_shapes_; }

  bool operator==(const NetworkModel& other) const {
    return input_shape_ == other.input_shape_ && num_labels_ == other.num_labels_ &&
           layers_ == other.layers_;
  }

 private:
  Shape input_shape_;
  std::size_t input_size_ = 0;
  std::size_t num_labels_ = 0;
  std::vector<LayerSpec> layers_;
  std::vector<Shape> layer_shapes_;
};

/// Sorted, duplicate-free set of acceptable labels.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::vector<std::size_t> labels);
  LabelSet(std::initializer_list<std::size_t> labels) : LabelSet(std::vector<std::size_t>(labels)) {}

  bool contains(std::size_t label) const;
  bool empty() const noexcept { return labels_.empty(); }
  const std::vector<std::size_t>& labels() const noexcept { return labels_; }

  /// Throws std::invalid_argument when empty or when a label is >= num_labels.
  void validate(std::size_t num_labels) const;

  bool operator==(const LabelSet&) const = default;

 private:
  std::vector<std::size_t> labels_;
};

/// Logits for a batch whose trailing shape equals the model input shape.
/// Returns a (batch x num_labels) tensor. Each row is computed independently
/// of the others, so results are bitwise identical under any batching.
Tensor forward(const NetworkModel& model, const Tensor& batch);

/// Index of the largest logit. Ties resolve to the smallest index.
std::size_t argmax(std::span<const double> logits);

std::vector<std::size_t> predict(const NetworkModel& model, const Tensor& batch);

/// 1 where the predicted label is in `omega`, 0 elsewhere.
std::vector<std::uint8_t> indicative(const NetworkModel& model, const Tensor& batch, const LabelSet& omega);

}  // namespace epsrob

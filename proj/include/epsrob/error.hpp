#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epsrob {

/// Shape incompatibility between a tensor and the layer or model consuming it.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A forward pass produced a NaN or infinity.
class NumericOverflowError : public std::runtime_error {
 public:
  NumericOverflowError(std::size_t layer_index, const std::string& kind)
      : std::runtime_error("numeric overflow: non-finite output at layer " +
                           std::to_string(layer_index) + " (" + kind + ")"),
        layer_index_(layer_index) {}

  std::size_t layer_index() const noexcept { return layer_index_; }

 private:
  std::size_t layer_index_;
};

/// Malformed model document. `layer_index()` is set when the problem is
/// attributable to one layer.
class ModelFormatError : public std::runtime_error {
 public:
  static constexpr std::size_t kNoLayer = static_cast<std::size_t>(-1);

  explicit ModelFormatError(const std::string& what, std::size_t layer_index = kNoLayer)
      : std::runtime_error(layer_index == kNoLayer
                               ? what
                               : "layer " + std::to_string(layer_index) + ": " + what),
        layer_index_(layer_index) {}

  std::size_t layer_index() const noexcept { return layer_index_; }

 private:
  std::size_t layer_index_;
};

/// Text input (DIMACS, dataset CSV, label file) that does not parse.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Radius evaluation requested for a center that fails its own point check.
class NotApplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace epsrob

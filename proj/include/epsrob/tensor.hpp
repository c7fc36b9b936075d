#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace epsrob {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_to_string(const Shape& shape);

/// Dense row-major tensor of doubles. Every dimension is positive and every
/// value is finite; both are checked on construction.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data);

  static Tensor zeros(Shape shape);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> mutable_data() noexcept { return data_; }

  /// Number of entries along the leading axis.
  std::size_t rows() const { return shape_.empty() ? 0 : shape_.front(); }
  /// Slice `i` along the leading axis, flattened.
  std::span<const double> row(std::size_t i) const;

  /// Same data under a different shape with an equal element count.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  bool operator==(const Tensor&) const = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

}  // namespace epsrob

#include "epsrob/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "epsrob/error.hpp"

namespace epsrob {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out << ',';
    out << shape[i];
  }
  out << ']';
  return out.str();
}

Tensor::Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) throw ShapeError("tensor shape must have at least one dimension");
  if (std::find(shape_.begin(), shape_.end(), std::size_t{0}) != shape_.end())
    throw ShapeError("tensor dimensions must be positive, got " + shape_to_string(shape_));
  if (shape_size(shape_) != data_.size())
    throw ShapeError("tensor shape " + shape_to_string(shape_) + " needs " +
                     std::to_string(shape_size(shape_)) + " values, got " + std::to_string(data_.size()));
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); }))
    throw std::invalid_argument("tensor values must be finite");
}

Tensor Tensor::zeros(Shape shape) {
  const std::size_t n = shape_size(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

std::span<const double> Tensor::row(std::size_t i) const {
  if (i >= rows()) throw std::out_of_range("tensor row index out of range");
  const std::size_t stride = data_.size() / rows();
  return std::span<const double>(data_).subspan(i * stride, stride);
}

Tensor Tensor::reshaped(Shape shape) const& { return Tensor(*this).reshaped(std::move(shape)); }

Tensor Tensor::reshaped(Shape shape) && {
  if (shape_size(shape) != data_.size())
    throw ShapeError("cannot reshape " + shape_to_string(shape_) + " to " + shape_to_string(shape));
  return Tensor(std::move(shape), std::move(data_));
}

}  // namespace epsrob

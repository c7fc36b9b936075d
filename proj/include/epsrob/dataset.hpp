#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "epsrob/tensor.hpp"

namespace epsrob {

/// Points under analysis with their gold labels. ids are the 0-based row
/// numbers of the input file.
struct DatasetSlice {
  std::vector<Tensor> inputs;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> ids;

  std::size_t size() const noexcept { return inputs.size(); }
};

/// Rows of comma- or whitespace-separated numbers. Blank lines and lines
/// starting with '#' are skipped, as is a leading non-numeric header line.
std::vector<std::vector<double>> parse_numeric_rows(std::string_view text);

/// One flattened tensor per CSV row, reshaped to `shape`, plus one integer
/// label per line. Throws ParseError on malformed input or count mismatch.
DatasetSlice load_dataset(const std::filesystem::path& inputs_csv, const std::filesystem::path& labels_file,
                          const Shape& shape);

/// Single flattened tensor from a file holding one numeric row.
Tensor load_input_file(const std::filesystem::path& path, const Shape& shape);

std::vector<std::size_t> parse_labels(std::string_view text);

}  // namespace epsrob

#include "epsrob/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "epsrob/error.hpp"

namespace epsrob {
namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ',' || line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
      ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ',' && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    if (end > pos) fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

bool parse_double(std::string_view field, double& value) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  return ec == std::errc() && end == field.data() + field.size() && std::isfinite(value);
}

}  // namespace

std::vector<std::vector<double>> parse_numeric_rows(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  bool first_content = true;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size() && numeric; ++i) numeric = parse_double(fields[i], row[i]);
    const bool header = first_content && !numeric;
    first_content = false;
    if (header) continue;
    if (!numeric) throw ParseError("line " + std::to_string(line_no) + ": non-numeric or non-finite field");
    rows.push_back(std::move(row));
    if (end == text.size()) break;
  }
  return rows;
}

std::vector<std::size_t> parse_labels(std::string_view text) {
  std::vector<std::size_t> labels;
  for (const auto& row : parse_numeric_rows(text)) {
    if (row.size() != 1 || row[0] < 0 || row[0] != std::floor(row[0]))
      throw ParseError("label file rows must each hold one non-negative integer");
    labels.push_back(static_cast<std::size_t>(row[0]));
  }
  return labels;
}

DatasetSlice load_dataset(const std::filesystem::path& inputs_csv, const std::filesystem::path& labels_file,
                          const Shape& shape) {
  auto rows = parse_numeric_rows(read_text(inputs_csv));
  auto labels = parse_labels(read_text(labels_file));
  if (rows.size() != labels.size())
    throw ParseError("dataset has " + std::to_string(rows.size()) + " rows but " + std::to_string(labels.size()) +
                     " labels");
  DatasetSlice slice;
  const std::size_t width = shape_size(shape);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width)
      throw ParseError("dataset row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                       " values, shape " + shape_to_string(shape) + " needs " + std::to_string(width));
    slice.inputs.emplace_back(shape, std::move(rows[i]));
    slice.ids.push_back(i);
  }
  slice.labels = std::move(labels);
  return slice;
}

Tensor load_input_file(const std::filesystem::path& path, const Shape& shape) {
  auto rows = parse_numeric_rows(read_text(path));
  if (rows.size() != 1) throw ParseError(path.string() + " must hold exactly one numeric row");
  if (rows[0].size() != shape_size(shape))
    throw ParseError("input has " + std::to_string(rows[0].size()) + " values, shape " + shape_to_string(shape) +
                     " needs " + std::to_string(shape_size(shape)));
  return Tensor(shape, std::move(rows[0]));
}

}  // namespace epsrob

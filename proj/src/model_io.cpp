#include "epsrob/model_io.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "epsrob/error.hpp"

namespace epsrob {
namespace {

using nlohmann::json;

std::vector<double> flat_numbers(const json& node, std::size_t depth, std::vector<std::size_t>& dims,
                                 std::size_t level = 0) {
  std::vector<double> out;
  if (level == depth) {
    if (!node.is_number()) throw std::invalid_argument("expected a number");
    out.push_back(node.get<double>());
    return out;
  }
  if (!node.is_array()) throw std::invalid_argument("expected an array nested " + std::to_string(depth) + " deep");
  if (dims.size() <= level) dims.push_back(node.size());
  else if (dims[level] != node.size()) throw std::invalid_argument("ragged nested array");
  for (const auto& child : node) {
    auto part = flat_numbers(child, depth, dims, level + 1);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::vector<double> number_list(const json& layer, const char* key) {
  std::vector<std::size_t> dims;
  return flat_numbers(layer.at(key), 1, dims);
}

std::size_t positive_size(const json& node, const char* key) {
  const auto value = node.at(key).get<long long>();
  if (value <= 0) throw std::invalid_argument(std::string(key) + " must be positive");
  return static_cast<std::size_t>(value);
}

LayerSpec parse_layer(const json& layer) {
  const std::string kind = layer.at("kind").get<std::string>();
  if (kind == "dense") {
    std::vector<std::size_t> dims;
    DenseLayer l;
    l.weight = flat_numbers(layer.at("weight"), 2, dims);
    if (dims.size() < 2 || dims[0] == 0 || dims[1] == 0) throw std::invalid_argument("dense weight must be a non-empty matrix");
    l.out = dims[0];
    l.in = dims[1];
    l.bias = number_list(layer, "bias");
    return l;
  }
  if (kind == "relu") return ReluLayer{};
  if (kind == "flatten") return FlattenLayer{};
  if (kind == "conv2d") {
    std::vector<std::size_t> dims;
    Conv2dLayer l;
    l.weight = flat_numbers(layer.at("weight"), 4, dims);
    if (dims.size() < 4) throw std::invalid_argument("conv2d weight must be a 4-D array");
    l.out_channels = dims[0];
    l.in_channels = dims[1];
    l.kernel_h = dims[2];
    l.kernel_w = dims[3];
    l.bias = number_list(layer, "bias");
    l.stride = layer.contains("stride") ? positive_size(layer, "stride") : 1;
    if (layer.contains("padding")) {
      const auto pad = layer.at("padding").get<long long>();
      if (pad < 0) throw std::invalid_argument("padding must be non-negative");
      l.padding = static_cast<std::size_t>(pad);
    }
    return l;
  }
  if (kind == "maxpool2d") {
    MaxPool2dLayer l;
    l.window = positive_size(layer, "window");
    l.stride = layer.contains("stride") ? positive_size(layer, "stride") : l.window;
    return l;
  }
  if (kind == "normalize") {
    return NormalizeLayer{number_list(layer, "mean"), number_list(layer, "scale")};
  }
  throw std::invalid_argument("unknown layer kind '" + kind + "'");
}

json nested(std::span<const double> values, std::span<const std::size_t> dims) {
  if (dims.size() == 1) return json(std::vector<double>(values.begin(), values.end()));
  json out = json::array();
  const std::size_t stride = values.size() / dims[0];
  for (std::size_t i = 0; i < dims[0]; ++i) out.push_back(nested(values.subspan(i * stride, stride), dims.subspan(1)));
  return out;
}

json layer_to_json(const LayerSpec& layer) {
  json out;
  out["kind"] = std::string(layer_kind(layer));
  if (const auto* d = std::get_if<DenseLayer>(&layer)) {
    const std::size_t dims[] = {d->out, d->in};
    out["weight"] = nested(d->weight, dims);
    out["bias"] = d->bias;
  } else if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
    const std::size_t dims[] = {c->out_channels, c->in_channels, c->kernel_h, c->kernel_w};
    out["weight"] = nested(c->weight, dims);
    out["bias"] = c->bias;
    out["stride"] = c->stride;
    out["padding"] = c->padding;
  } else if (const auto* p = std::get_if<MaxPool2dLayer>(&layer)) {
    out["window"] = p->window;
    out["stride"] = p->stride;
  } else if (const auto* n = std::get_if<NormalizeLayer>(&layer)) {
    out["mean"] = n->mean;
    out["scale"] = n->scale;
  }
  return out;
}

}  // namespace

NetworkModel load_model(std::string_view text) {
  if (text.size() > kMaxModelFileBytes) throw ModelFormatError("model document exceeds the desk-scale size limit");
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  }
  if (!doc.is_object()) throw ModelFormatError("model document must be a JSON object");

  Shape input_shape;
  std::size_t num_labels = 0;
  try {
    for (const auto& d : doc.at("input_shape")) {
      const auto v = d.get<long long>();
      if (v <= 0) throw ModelFormatError("input_shape entries must be positive");
      input_shape.push_back(static_cast<std::size_t>(v));
    }
    const auto m = doc.at("num_labels").get<long long>();
    if (m < 0) throw ModelFormatError("num_labels must be positive");
    num_labels = static_cast<std::size_t>(m);
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("bad model header: ") + e.what());
  }

  if (!doc.contains("layers") || !doc["layers"].is_array()) throw ModelFormatError("model needs a \"layers\" array");
  std::vector<LayerSpec> layers;
  const auto& list = doc["layers"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    try {
      layers.push_back(parse_layer(list[i]));
    } catch (const json::exception& e) {
      throw ModelFormatError(e.what(), i);
    } catch (const std::invalid_argument& e) {
      throw ModelFormatError(e.what(), i);
    }
  }
  return NetworkModel(std::move(input_shape), num_labels, std::move(layers));
}

NetworkModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file " + path.string());
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (!ec && size > kMaxModelFileBytes) throw ModelFormatError("model file exceeds the desk-scale size limit");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_model(text);
}

std::string serialize_model(const NetworkModel& model) {
  json doc;
  doc["input_shape"] = model.input_shape();
  doc["num_labels"] = model.num_labels();
  doc["layers"] = json::array();
  for (const auto& layer : model.layers()) doc["layers"].push_back(layer_to_json(layer));
  return doc.dump() + "\n";
}

void save_model_file(const NetworkModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  out << serialize_model(model);
}

}  // namespace epsrob

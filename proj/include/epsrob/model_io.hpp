#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "epsrob/network.hpp"

namespace epsrob {

/// Model files are single JSON documents:
///
///   {"input_shape": [d1, ...], "num_labels": m,
///    "layers": [{"kind": "dense", "weight": [[...], ...], "bias": [...]}, ...]}
///
/// Layer kinds and their fields:
///   dense      weight (out x in nested rows), bias (out)
///   relu       (none)
///   conv2d     weight (out_ch x in_ch x kh x kw nested), bias (out_ch),
///              stride (default 1), padding (default 0)
///   maxpool2d  window, stride (default = window)
///   flatten    (none)
///   normalize  mean, scale (per channel, or one entry broadcast)
///
/// The format targets desk-scale models; files above kMaxModelFileBytes are
/// rejected rather than parsed.
inline constexpr std::size_t kMaxModelFileBytes = std::size_t{256} << 20;

/// Parses and validates a model document. Throws ModelFormatError, which
/// carries the layer index for per-layer problems.
NetworkModel load_model(std::string_view text);
NetworkModel load_model_file(const std::filesystem::path& path);

/// Serializes to the same format. Doubles are written in shortest
/// round-trip form, so load_model(serialize_model(m)) == m.
std::string serialize_model(const NetworkModel& model);
void save_model_file(const NetworkModel& model, const std::filesystem::path& path);

}  // namespace epsrob

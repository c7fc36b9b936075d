#include "epsrob/ball_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epsrob/special_functions.hpp"

namespace epsrob {
namespace {

void require_norm(const BallSpec& spec, Norm expected) {
  if (spec.norm != expected) throw std::invalid_argument("ball norm does not match the requested sampler");
}

void offsets_l1(double radius, DrawSequence& draws, std::span<double> out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = draws.uniform() * radius;
  std::sort(out.begin(), out.end());
  double previous = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double spacing = out[i] - previous;
    previous = out[i];
    out[i] = spacing;
  }
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 32 == 0) bits = draws.next_u32();
    if ((bits >> (i % 32)) & 1u) out[i] = -out[i];
  }
}

void offsets_l2(double radius, const SampleStream& stream, std::uint64_t index, L2RadiusLaw law,
                std::span<double> out) {
  const std::size_t n = out.size();
  // A zero-length Gaussian vector has probability zero; retry once on the next lane.
  for (std::uint32_t lane = 0; lane < 2; ++lane) {
    DrawSequence draws = stream.draws(index, lane);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = draws.normal();
      s += out[i] * out[i];
    }
    if (s == 0.0) continue;
    const double dim = static_cast<double>(n);
    const double u = law == L2RadiusLaw::kIncompleteGamma ? reg_lower_incomplete_gamma(dim / 2.0, s / 2.0)
                                                          : draws.uniform();
    const double scale = radius * std::pow(u, 1.0 / dim) / std::sqrt(s);
    for (std::size_t i = 0; i < n; ++i) out[i] *= scale;
    return;
  }
  throw std::runtime_error("l2 sampler drew a zero Gaussian vector twice");
}

void offsets_linf(double radius, DrawSequence& draws, std::span<double> out) {
  for (double& v : out) v = radius * (2.0 * draws.uniform() - 1.0);
}

Tensor single(const BallSpec& spec, const SampleStream& stream, std::uint64_t index, const SamplerOptions& options) {
  std::vector<double> data(spec.dimension());
  sample_into(spec, stream, index, data, options);
  return Tensor({spec.dimension()}, std::move(data));
}

}  // namespace

Norm parse_norm(std::string_view text) {
  if (text == "1" || text == "l1" || text == "L1") return Norm::kL1;
  if (text == "2" || text == "l2" || text == "L2") return Norm::kL2;
  if (text == "inf" || text == "linf" || text == "Linf" || text == "infinity") return Norm::kLinf;
  throw std::invalid_argument("unsupported norm '" + std::string(text) + "' (expected 1, 2 or inf)");
}

std::string norm_name(Norm norm) {
  switch (norm) {
    case Norm::kL1: return "1";
    case Norm::kL2: return "2";
    case Norm::kLinf: return "inf";
  }
  return "?";
}

void BallSpec::validate() const {
  if (center.empty()) throw std::invalid_argument("ball center is empty");
  if (!std::all_of(center.begin(), center.end(), [](double v) { return std::isfinite(v); }))
    throw std::invalid_argument("ball center must be finite");
  if (!std::isfinite(radius) || radius < 0.0) throw std::invalid_argument("ball radius must be finite and >= 0");
}

void sample_into(const BallSpec& spec, const SampleStream& stream, std::uint64_t index, std::span<double> out,
                 const SamplerOptions& options) {
  if (out.size() != spec.dimension()) throw std::invalid_argument("sample buffer length differs from ball dimension");
  if (spec.radius == 0.0) {
    std::copy(spec.center.begin(), spec.center.end(), out.begin());
  } else {
    switch (spec.norm) {
      case Norm::kL1: {
        DrawSequence draws = stream.draws(index);
        offsets_l1(spec.radius, draws, out);
        break;
      }
      case Norm::kL2:
        offsets_l2(spec.radius, stream, index, options.l2_radius_law, out);
        break;
      case Norm::kLinf: {
        DrawSequence draws = stream.draws(index);
        offsets_linf(spec.radius, draws, out);
        break;
      }
      default:
        throw std::invalid_argument("unsupported norm");
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += spec.center[i];
  }
  if (options.clamp)
    for (double& v : out) v = std::clamp(v, options.clamp->lo, options.clamp->hi);
}

Tensor sample_l1(const BallSpec& spec, const SampleStream& stream, std::uint64_t index) {
  require_norm(spec, Norm::kL1);
  return single(spec, stream, index, {});
}

Tensor sample_l2(const BallSpec& spec, const SampleStream& stream, std::uint64_t index, L2RadiusLaw law) {
  require_norm(spec, Norm::kL2);
  return single(spec, stream, index, SamplerOptions{law, std::nullopt});
}

Tensor sample_linf(const BallSpec& spec, const SampleStream& stream, std::uint64_t index) {
  require_norm(spec, Norm::kLinf);
  return single(spec, stream, index, {});
}

Tensor sample_batch(const BallSpec& spec, const SampleStream& stream, std::uint64_t start, std::size_t count,
                    const SamplerOptions& options) {
  if (count == 0) throw std::invalid_argument("sample_batch needs count >= 1");
  spec.validate();
  if (options.clamp && !(options.clamp->lo <= options.clamp->hi))
    throw std::invalid_argument("clamp range needs lo <= hi");
  const std::size_t n = spec.dimension();
  std::vector<double> data(count * n);
  for (std::size_t k = 0; k < count; ++k)
    sample_into(spec, stream, start + k, std::span<double>(data).subspan(k * n, n), options);
  return Tensor({count, n}, std::move(data));
}

double norm_distance(std::span<const double> a, std::span<const double> b, Norm norm) {
  if (a.size() != b.size()) throw std::invalid_argument("norm_distance needs equal lengths");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    switch (norm) {
      case Norm::kL1: acc += d; break;
      case Norm::kL2: acc += d * d; break;
      case Norm::kLinf: acc = std::max(acc, d); break;
    }
  }
  return norm == Norm::kL2 ? std::sqrt(acc) : acc;
}

}  // namespace epsrob

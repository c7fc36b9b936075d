#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epsrob/philox.hpp"
#include "epsrob/tensor.hpp"

namespace epsrob {

enum class Norm { kL1, kL2, kLinf };

/// Accepts "1", "2", "inf" (also "l1", "l2", "linf"). Throws std::invalid_argument.
Norm parse_norm(std::string_view text);
std::string norm_name(Norm norm);

/// The perturbation region B_p(center, radius).
struct BallSpec {
  std::vector<double> center;
  double radius = 0.0;
  Norm norm = Norm::kLinf;

  /// Throws std::invalid_argument for an empty or non-finite center or a
  /// negative or non-finite radius.
  void validate() const;
  std::size_t dimension() const noexcept { return center.size(); }
};

/// How the l2 sampler draws its radial scale.
enum class L2RadiusLaw {
  /// kappa = P(n/2, s/2)^(1/n), P the regularized lower incomplete gamma.
  kIncompleteGamma,
  /// kappa = U^(1/n) with an independent uniform U. Cross-check only.
  kUniformPower,
};

struct ClampRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct SamplerOptions {
  L2RadiusLaw l2_radius_law = L2RadiusLaw::kIncompleteGamma;
  /// Clipping into [lo, hi] after sampling. Changes the sampled measure, so
  /// it is off unless explicitly requested.
  std::optional<ClampRange> clamp;
};

/// Writes the sample at `index` into `out` (length = dimension). Dispatches on
/// spec.norm. Radius 0 yields the center exactly.
void sample_into(const BallSpec& spec, const SampleStream& stream, std::uint64_t index, std::span<double> out,
                 const SamplerOptions& options = {});

/// Uniform spacings: n sorted uniforms on [0, r], consecutive differences
/// from 0, random signs.
Tensor sample_l1(const BallSpec& spec, const SampleStream& stream, std::uint64_t index);
/// Gaussian direction scaled by the incomplete-gamma radial law.
Tensor sample_l2(const BallSpec& spec, const SampleStream& stream, std::uint64_t index,
                 L2RadiusLaw law = L2RadiusLaw::kIncompleteGamma);
/// Independent Uniform(-r, r) offsets per coordinate.
Tensor sample_linf(const BallSpec& spec, const SampleStream& stream, std::uint64_t index);

/// Rows are the samples at indices start .. start + count - 1, shape
/// (count x n). Identical to concatenating any partition of the range.
Tensor sample_batch(const BallSpec& spec, const SampleStream& stream, std::uint64_t start, std::size_t count,
                    const SamplerOptions& options = {});

/// ||a - b||_p.
double norm_distance(std::span<const double> a, std::span<const double> b, Norm norm);

}  // namespace epsrob

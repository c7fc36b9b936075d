#pragma once

namespace epsrob {

/// Standard normal CDF.
double normal_cdf(double z);

/// Standard normal quantile for q in (0, 1). Acklam's rational approximation
/// followed by one Halley step; |normal_cdf(result) - q| <= 1e-9.
/// Throws std::domain_error outside (0, 1).
double inv_norm_cdf(double q);

/// Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0. Series for
/// x < a + 1, Lentz continued fraction for the complement otherwise.
/// Throws std::domain_error on domain violations.
double reg_lower_incomplete_gamma(double a, double x);

}  // namespace epsrob

#include "epsrob/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace epsrob {
namespace {

constexpr double kAcklamA[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
constexpr double kAcklamB[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
constexpr double kAcklamC[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
constexpr double kAcklamD[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
constexpr double kLowBreak = 0.02425;

double acklam(double q) {
  if (q < kLowBreak) {
    const double t = std::sqrt(-2.0 * std::log(q));
    return (((((kAcklamC[0] * t + kAcklamC[1]) * t + kAcklamC[2]) * t + kAcklamC[3]) * t + kAcklamC[4]) * t +
            kAcklamC[5]) /
           ((((kAcklamD[0] * t + kAcklamD[1]) * t + kAcklamD[2]) * t + kAcklamD[3]) * t + 1.0);
  }
  if (q > 1.0 - kLowBreak) return -acklam(1.0 - q);
  const double t = q - 0.5;
  const double r = t * t;
  return (((((kAcklamA[0] * r + kAcklamA[1]) * r + kAcklamA[2]) * r + kAcklamA[3]) * r + kAcklamA[4]) * r +
          kAcklamA[5]) *
         t /
         (((((kAcklamB[0] * r + kAcklamB[1]) * r + kAcklamB[2]) * r + kAcklamB[3]) * r + kAcklamB[4]) * r + 1.0);
}

constexpr double kTolerance = 1e-16;
constexpr int kMaxIterations = 1'000'000;

double lower_series(double a, double x, double log_prefix) {
  double term = 1.0 / a;
  double sum = term;
  for (int k = 1; k < kMaxIterations; ++k) {
    term *= x / (a + k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * kTolerance) return sum * std::exp(log_prefix);
  }
  throw std::runtime_error("incomplete gamma series did not converge");
}

// Upper tail Q(a, x) by modified Lentz on the continued fraction.
double upper_fraction(double a, double x, double log_prefix) {
  constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kTolerance) return std::exp(log_prefix) * h;
  }
  throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double inv_norm_cdf(double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("inv_norm_cdf needs q in (0, 1)");
  // 1 - q is exact for q >= 0.5, so the upper half reuses the lower tail
  // where the CDF carries full relative precision.
  if (q > 0.5) return -inv_norm_cdf(1.0 - q);
  double x = acklam(q);
  // Halley refinement against the exact CDF.
  const double e = normal_cdf(x) - q;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  x -= u / (1.0 + x * u / 2.0);
  return x;
}

double reg_lower_incomplete_gamma(double a, double x) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::domain_error("incomplete gamma needs a > 0");
  if (std::isnan(x) || x < 0.0) throw std::domain_error("incomplete gamma needs x >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_prefix = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) return std::min(1.0, lower_series(a, x, log_prefix));
  return std::max(0.0, 1.0 - upper_fraction(a, x, log_prefix));
}

}  // namespace epsrob

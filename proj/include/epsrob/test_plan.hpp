#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace epsrob {

/// Type-I (alpha) and type-II (beta) error bounds, each in (0, 0.5).
struct ErrorBudget {
  double alpha = 0.001;
  double beta = 0.001;

  void validate() const;
};

/// Which dispersion term multiplies the normal quantiles when sizing the
/// test. kAsPrinted uses p(1-p), the form the reference sample-size and
/// threshold formulas are written in; kStandardDeviation uses sqrt(p(1-p)),
/// the textbook CLT scale. Both satisfy the same lower-bound inequalities on N
/// and c; they differ in how tightly the nominal alpha/beta are met.
enum class SigmaConvention { kAsPrinted, kStandardDeviation };

std::string sigma_convention_name(SigmaConvention convention);
SigmaConvention parse_sigma_convention(const std::string& text);

/// The statistical contract of one decision: draw up to N samples, accept
/// (SAT) iff the success count reaches c * N.
struct TestPlan {
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
  ErrorBudget budget;
  double z_alpha = 0.0;
  double z_one_minus_beta = 0.0;
  std::uint64_t sample_size = 0;  // N
  double threshold = 0.0;         // c, on the sample mean
  /// ceil(c * N): the smallest success count with S >= c * N.
  std::uint64_t success_threshold = 0;
  SigmaConvention sigma = SigmaConvention::kAsPrinted;
};

/// Successes S among the first i draws.
struct RunningCount {
  std::uint64_t successes = 0;
  std::uint64_t drawn = 0;
};

/// eps - min(eps (1 - eps), 0.005).
double choose_epsilon_prime(double epsilon);

/// Sample size N = ceil(max{((s(eps) z_{1-beta} - s(eps') z_alpha) / (eps - eps'))^2,
/// 9 (1 - eps) / eps}) and threshold c = s(eps) z_{1-beta} / sqrt(N) + (1 - eps),
/// where s(p) = p(1-p) under kAsPrinted. eps' defaults to
/// choose_epsilon_prime(eps). Throws std::invalid_argument on a bad budget,
/// eps outside (0, 1) or eps' outside (0, eps).
TestPlan plan_test(double epsilon, const ErrorBudget& budget, std::optional<double> epsilon_prime = std::nullopt,
                   SigmaConvention sigma = SigmaConvention::kAsPrinted);

/// S >= c * N. Once true, the full-N verdict is SAT whatever the remaining
/// draws are.
bool early_accept(const TestPlan& plan, const RunningCount& count);

/// S < (c - 1) * N + i, i.e. even all remaining draws succeeding cannot reach
/// c * N. Once true, the full-N verdict is UNSAT.
bool early_reject(const TestPlan& plan, const RunningCount& count);

}  // namespace epsrob

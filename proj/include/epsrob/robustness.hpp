#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "epsrob/ball_sampler.hpp"
#include "epsrob/network.hpp"
#include "epsrob/test_plan.hpp"

namespace epsrob {

enum class Decision { kSat, kUnsat };

enum class StopReason {
  kEarlyAccept,
  kEarlyReject,
  /// Radius 0: the ball is the center, so one evaluation decides.
  kPointCheck,
};

std::string decision_name(Decision decision);
std::string stop_reason_name(StopReason reason);

struct Verdict {
  Decision decision = Decision::kUnsat;
  std::uint64_t successes = 0;
  std::uint64_t samples_drawn = 0;
  TestPlan plan;
  StopReason stop_reason = StopReason::kEarlyReject;
};

/// A deterministic 0/1 outcome per sample index.
class IndicativeSource {
 public:
  virtual ~IndicativeSource() = default;

  /// Number of indices in [start, start + count) whose outcome is 1.
  virtual std::uint64_t count_successes(std::uint64_t start, std::uint64_t count) const = 0;
};

/// Draws outcomes in index order, `batch_size` at a time, and checks
/// early_accept then early_reject on the prefix count after every batch.
/// Both rules are conclusive, so the verdict equals the one a full N-sample
/// run would give regardless of batch size.
Verdict decide_with_source(const TestPlan& plan, const IndicativeSource& source, std::uint64_t batch_size);

/// Everything except the model needed for one decision.
struct RobustnessQuery {
  std::vector<double> center;
  double radius = 0.0;
  Norm norm = Norm::kLinf;
  double epsilon = 0.01;
  std::optional<double> epsilon_prime;
  LabelSet omega;
  ErrorBudget budget;
  SigmaConvention sigma = SigmaConvention::kAsPrinted;
  std::uint64_t seed = 0;
  std::uint64_t batch_size = 256;
  SamplerOptions sampler;

  TestPlan plan() const;
  BallSpec ball() const { return BallSpec{center, radius, norm}; }
};

/// Indicative outcomes of `model` on uniform samples from a ball. Within one
/// call the index range is split across the current TBB arena's workers; the
/// count is an integer sum, so the result does not depend on worker count.
class BallIndicativeSource final : public IndicativeSource {
 public:
  BallIndicativeSource(const NetworkModel& model, BallSpec ball, SampleStream stream, LabelSet omega,
                       SamplerOptions options = {});

  std::uint64_t count_successes(std::uint64_t start, std::uint64_t count) const override;

 private:
  const NetworkModel& model_;
  BallSpec ball_;
  SampleStream stream_;
  LabelSet omega_;
  SamplerOptions options_;
};

/// True iff the model's prediction at the center lies in omega.
bool point_check(const NetworkModel& model, const std::vector<double>& center, const LabelSet& omega);

/// Is the model epsilon-weakened robust on the query ball? Radius 0 reduces
/// to point_check.
Verdict decide(const NetworkModel& model, const RobustnessQuery& query);

struct RadiusProbe {
  double radius = 0.0;
  Verdict verdict;
};

struct RadiusResult {
  double r_star = 0.0;
  std::vector<RadiusProbe> probes;
  double precision = 0.0;
  double upper_bound = 0.0;
};

/// Decision oracle for bisection: verdict at `radius` for the
/// `probe_index`-th probe.
using RadiusOracle = std::function<Verdict(double radius, std::uint64_t probe_index)>;

/// Bisection on [0, upper]: probe the midpoint, SAT raises the lower end,
/// UNSAT lowers the upper end, stop once the bracket is within `precision`.
/// Issues ceil(log2(upper / precision)) probes and returns the lower end.
RadiusResult bisect_radius(const RadiusOracle& oracle, double upper, double precision);

/// Largest radius with a SAT verdict, by bisection over decide(). Probe k
/// uses seed derive_seed(query.seed, k); query.radius is ignored. Throws
/// NotApplicableError when the center itself fails point_check, since the
/// search presupposes robustness near radius 0.
RadiusResult evaluate(const NetworkModel& model, const RobustnessQuery& query, double upper, double precision);

}  // namespace epsrob

#include "epsrob/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <tbb/blocked_range.h>
#include <tbb/parallel_reduce.h>

#include "epsrob/error.hpp"

namespace epsrob {
namespace {

// Rows per task; large enough to amortize the forward-pass setup.
constexpr std::uint64_t kRowsPerTask = 64;

}  // namespace

std::string decision_name(Decision decision) { return decision == Decision::kSat ? "SAT" : "UNSAT"; }

std::string stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::kEarlyAccept: return "early_accept";
    case StopReason::kEarlyReject: return "early_reject";
    case StopReason::kPointCheck: return "point_check";
  }
  return "?";
}

Verdict decide_with_source(const TestPlan& plan, const IndicativeSource& source, std::uint64_t batch_size) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  RunningCount count;
  while (count.drawn < plan.sample_size) {
    const std::uint64_t take = std::min(batch_size, plan.sample_size - count.drawn);
    count.successes += source.count_successes(count.drawn, take);
    count.drawn += take;
    if (early_accept(plan, count))
      return Verdict{Decision::kSat, count.successes, count.drawn, plan, StopReason::kEarlyAccept};
    if (early_reject(plan, count))
      return Verdict{Decision::kUnsat, count.successes, count.drawn, plan, StopReason::kEarlyReject};
  }
  // At i = N one of the two rules always fires.
  throw std::logic_error("decision loop ended without a verdict");
}

TestPlan RobustnessQuery::plan() const { return plan_test(epsilon, budget, epsilon_prime, sigma); }

BallIndicativeSource::BallIndicativeSource(const NetworkModel& model, BallSpec ball, SampleStream stream,
                                           LabelSet omega, SamplerOptions options)
    : model_(model), ball_(std::move(ball)), stream_(stream), omega_(std::move(omega)), options_(options) {
  ball_.validate();
  omega_.validate(model_.num_labels());
  if (ball_.dimension() != model_.input_size())
    throw ShapeError("ball dimension " + std::to_string(ball_.dimension()) + " differs from model input size " +
                     std::to_string(model_.input_size()));
}

std::uint64_t BallIndicativeSource::count_successes(std::uint64_t start, std::uint64_t count) const {
  if (count == 0) return 0;
  Shape batch_shape{0};
  batch_shape.insert(batch_shape.end(), model_.input_shape().begin(), model_.input_shape().end());
  return tbb::parallel_reduce(
      tbb::blocked_range<std::uint64_t>(0, count, kRowsPerTask), std::uint64_t{0},
      [&](const tbb::blocked_range<std::uint64_t>& range, std::uint64_t acc) {
        Shape shape = batch_shape;
        shape[0] = range.size();
        const Tensor rows =
            sample_batch(ball_, stream_, start + range.begin(), range.size(), options_).reshaped(std::move(shape));
        for (const std::uint8_t hit : indicative(model_, rows, omega_)) acc += hit;
        return acc;
      },
      [](std::uint64_t a, std::uint64_t b) { return a + b; });
}

bool point_check(const NetworkModel& model, const std::vector<double>& center, const LabelSet& omega) {
  Shape shape{1};
  shape.insert(shape.end(), model.input_shape().begin(), model.input_shape().end());
  return indicative(model, Tensor(std::move(shape), center), omega).front() == 1;
}

Verdict decide(const NetworkModel& model, const RobustnessQuery& query) {
  const TestPlan plan = query.plan();
  BallSpec ball = query.ball();
  ball.validate();
  if (ball.radius == 0.0) {
    const bool hit = point_check(model, ball.center, query.omega);
    return Verdict{hit ? Decision::kSat : Decision::kUnsat, hit ? 1u : 0u, 1, plan, StopReason::kPointCheck};
  }
  const BallIndicativeSource source(model, std::move(ball), SampleStream{query.seed}, query.omega, query.sampler);
  return decide_with_source(plan, source, query.batch_size);
}

RadiusResult bisect_radius(const RadiusOracle& oracle, double upper, double precision) {
  if (!(upper > 0.0) || !std::isfinite(upper)) throw std::invalid_argument("radius upper bound must be positive");
  if (!(precision > 0.0)) throw std::invalid_argument("precision must be positive");
  RadiusResult result;
  result.precision = precision;
  result.upper_bound = upper;
  double lo = 0.0;
  double hi = upper;
  std::uint64_t probe = 0;
  while (hi - lo > precision) {
    const double mid = (lo + hi) / 2.0;
    Verdict verdict = oracle(mid, probe++);
    if (verdict.decision == Decision::kSat) lo = mid;
    else hi = mid;
    result.probes.push_back(RadiusProbe{mid, std::move(verdict)});
  }
  result.r_star = lo;
  return result;
}

RadiusResult evaluate(const NetworkModel& model, const RobustnessQuery& query, double upper, double precision) {
  if (!point_check(model, query.center, query.omega))
    throw NotApplicableError(
        "center is not classified inside omega, so bisection has no robust radius to start from; "
        "decide at a fixed, pre-set radius instead");
  return bisect_radius(
      [&](double radius, std::uint64_t probe_index) {
        RobustnessQuery probe = query;
        probe.radius = radius;
        probe.seed = derive_seed(query.seed, probe_index);
        return decide(model, probe);
      },
      upper, precision);
}

}  // namespace epsrob

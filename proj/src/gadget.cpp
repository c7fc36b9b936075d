#include "epsrob/gadget.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include <tbb/blocked_range.h>
#include <tbb/parallel_reduce.h>

#include "epsrob/philox.hpp"

namespace epsrob {

void CnfFormula::validate() const {
  if (num_variables == 0) throw std::invalid_argument("formula needs at least one variable");
  for (std::size_t c = 0; c < clauses.size(); ++c) {
    if (clauses[c].empty()) throw std::invalid_argument("clause " + std::to_string(c) + " is empty");
    for (const Literal& lit : clauses[c])
      if (lit.variable >= num_variables)
        throw std::invalid_argument("clause " + std::to_string(c) + " uses variable " +
                                    std::to_string(lit.variable + 1) + " beyond n");
  }
}

bool CnfFormula::satisfied_by(std::uint64_t assignment) const {
  return std::all_of(clauses.begin(), clauses.end(), [&](const Clause& clause) {
    return std::any_of(clause.begin(), clause.end(), [&](const Literal& lit) {
      const bool value = (assignment >> lit.variable) & 1u;
      return value != lit.negated;
    });
  });
}

GadgetNetwork build_gadget(const CnfFormula& cnf) {
  cnf.validate();
  const std::size_t n = cnf.num_variables;
  const std::size_t m = cnf.clauses.size();

  if (m == 0) {
    // Vacuously satisfied: o1 = 0 > o2 = -0.5 everywhere.
    DenseLayer out{n, 2, std::vector<double>(2 * n, 0.0), {0.0, -0.5}};
    return GadgetNetwork{NetworkModel({n}, 2, {out}), 0};
  }

  std::size_t literal_count = 0;
  for (const Clause& clause : cnf.clauses) literal_count += clause.size();

  DenseLayer literals{n, literal_count, std::vector<double>(literal_count * n, 0.0),
                      std::vector<double>(literal_count, 0.0)};
  DenseLayer clause_sums{literal_count, m, std::vector<double>(m * literal_count, 0.0), std::vector<double>(m, 1.0)};
  std::size_t row = 0;
  for (std::size_t c = 0; c < m; ++c) {
    for (const Literal& lit : cnf.clauses[c]) {
      literals.weight[row * n + lit.variable] = lit.negated ? -1.0 : 1.0;
      literals.bias[row] = lit.negated ? 1.0 : 0.0;
      clause_sums.weight[c * literal_count + row] = -1.0;
      ++row;
    }
  }

  const double clauses = static_cast<double>(m);
  DenseLayer output{m, 2, std::vector<double>(2 * m, 0.0), {clauses, clauses - 0.5}};
  std::fill_n(output.weight.begin(), m, -1.0);

  return GadgetNetwork{NetworkModel({n}, 2, {literals, clause_sums, ReluLayer{}, output}), m};
}

std::uint64_t count_satisfying(const CnfFormula& cnf) {
  cnf.validate();
  if (cnf.num_variables > kMaxEnumerationVariables)
    throw std::invalid_argument("exhaustive enumeration is limited to " + std::to_string(kMaxEnumerationVariables) +
                                " variables");
  std::uint64_t count = 0;
  const std::uint64_t corners = std::uint64_t{1} << cnf.num_variables;
  for (std::uint64_t a = 0; a < corners; ++a) count += cnf.satisfied_by(a);
  return count;
}

CornerSource::CornerSource(NetworkModel model, std::uint64_t seed) : model_(std::move(model)), seed_(seed) {
  if (model_.input_size() > 64) throw std::invalid_argument("corner sampling supports at most 64 inputs");
}

std::uint64_t CornerSource::corner(std::uint64_t index) const {
  DrawSequence draws(seed_, index);
  std::uint64_t bits = draws.next_u64();
  const std::size_t n = model_.input_size();
  return n == 64 ? bits : bits & ((std::uint64_t{1} << n) - 1);
}

std::uint64_t CornerSource::count_successes(std::uint64_t start, std::uint64_t count) const {
  if (count == 0) return 0;
  const std::size_t n = model_.input_size();
  const LabelSet omega{kSatisfiedLabel};
  return tbb::parallel_reduce(
      tbb::blocked_range<std::uint64_t>(0, count, 256), std::uint64_t{0},
      [&](const tbb::blocked_range<std::uint64_t>& range, std::uint64_t acc) {
        std::vector<double> data(range.size() * n);
        for (std::size_t k = 0; k < range.size(); ++k) {
          const std::uint64_t bits = corner(start + range.begin() + k);
          for (std::size_t v = 0; v < n; ++v) data[k * n + v] = static_cast<double>((bits >> v) & 1u);
        }
        Shape shape{range.size()};
        shape.insert(shape.end(), model_.input_shape().begin(), model_.input_shape().end());
        for (const std::uint8_t hit : indicative(model_, Tensor(std::move(shape), std::move(data)), omega)) acc += hit;
        return acc;
      },
      [](std::uint64_t a, std::uint64_t b) { return a + b; });
}

CornerSource corner_source(const CnfFormula& cnf, std::uint64_t seed) {
  return CornerSource(build_gadget(cnf).model, seed);
}

CornerSource corner_source(const NetworkModel& model, std::uint64_t seed) { return CornerSource(model, seed); }

NetworkModel threshold_classifier(std::size_t n, std::size_t coordinate, double threshold) {
  if (coordinate >= n) throw std::invalid_argument("threshold coordinate out of range");
  // o0 = t - x_j, o1 = 0: label 0 iff x_j <= t.
  DenseLayer layer{n, 2, std::vector<double>(2 * n, 0.0), {threshold, 0.0}};
  layer.weight[coordinate] = -1.0;
  return NetworkModel({n}, 2, {layer});
}

double threshold_fraction_linf(double center_coordinate, double radius, double threshold) {
  if (radius == 0.0) return center_coordinate <= threshold ? 1.0 : 0.0;
  return std::clamp((threshold - (center_coordinate - radius)) / (2.0 * radius), 0.0, 1.0);
}

}  // namespace epsrob

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "epsrob/network.hpp"
#include "epsrob/robustness.hpp"

namespace epsrob {

struct Literal {
  std::size_t variable = 0;  // 0-based
  bool negated = false;

  bool operator==(const Literal&) const = default;
};

using Clause = std::vector<Literal>;

/// Conjunction of clauses over variables 0 .. num_variables - 1.
struct CnfFormula {
  std::size_t num_variables = 0;
  std::vector<Clause> clauses;

  /// Throws std::invalid_argument for empty clauses or out-of-range variables.
  void validate() const;
  /// Bit v of `assignment` is the value of variable v.
  bool satisfied_by(std::uint64_t assignment) const;

  bool operator==(const CnfFormula&) const = default;
};

/// Label of a satisfying assignment in a gadget network (l1); l2 is 1.
inline constexpr std::size_t kSatisfiedLabel = 0;

struct GadgetNetwork {
  NetworkModel model;
  std::size_t clause_count = 0;
};

/// ReLU encoding of a CNF formula:
///   literal layer   x for positive literals, 1 - x (the Not gadget) for negated
///   clause layer    t_j = 1 - sum of clause j's literals, then ReLU
///   output layer    o1 = sum_j (1 - ReLU(t_j)),  o2 = m - 0.5 (bias only)
/// On {0,1}^n inputs, o1 > o2 exactly when every clause is satisfied.
GadgetNetwork build_gadget(const CnfFormula& cnf);

inline constexpr std::size_t kMaxEnumerationVariables = 20;

/// Exact count over all 2^n assignments. Throws std::invalid_argument when
/// n > kMaxEnumerationVariables.
std::uint64_t count_satisfying(const CnfFormula& cnf);

/// Outcome i: a uniformly random corner of {0,1}^n keyed by (seed, i), fed to
/// the model; 1 iff it is classified kSatisfiedLabel.
class CornerSource final : public IndicativeSource {
 public:
  CornerSource(NetworkModel model, std::uint64_t seed);

  std::uint64_t count_successes(std::uint64_t start, std::uint64_t count) const override;
  /// The corner drawn for sample `index`, bit v = coordinate v.
  std::uint64_t corner(std::uint64_t index) const;

 private:
  NetworkModel model_;
  std::uint64_t seed_;
};

CornerSource corner_source(const CnfFormula& cnf, std::uint64_t seed);
CornerSource corner_source(const NetworkModel& model, std::uint64_t seed);

/// Two-label model predicting label 0 iff x_j <= t (equality goes to label 0
/// through the argmax tie-break).
NetworkModel threshold_classifier(std::size_t n, std::size_t coordinate, double threshold);

/// Exact fraction of B_inf(center, r) that threshold_classifier labels 0:
/// clip((t - (c_j - r)) / (2 r), 0, 1).
double threshold_fraction_linf(double center_coordinate, double radius, double threshold);

}  // namespace epsrob

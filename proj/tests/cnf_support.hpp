#pragma once

#include "epsrob/gadget.hpp"
#include "epsrob/philox.hpp"

namespace testing {

// Random k-CNF with clause widths in [1, max_width] and distinct variables
// per clause.
inline epsrob::CnfFormula random_cnf(std::size_t n, std::size_t clauses, std::size_t max_width, std::uint64_t seed) {
  epsrob::DrawSequence draws(seed, 0);
  epsrob::CnfFormula f;
  f.num_variables = n;
  for (std::size_t c = 0; c < clauses; ++c) {
    const std::size_t width = 1 + draws.next_u32() % std::min(max_width, n);
    epsrob::Clause clause;
    while (clause.size() < width) {
      const std::size_t v = draws.next_u32() % n;
      bool seen = false;
      for (const auto& lit : clause) seen = seen || lit.variable == v;
      if (!seen) clause.push_back({v, (draws.next_u32() & 1u) != 0});
    }
    f.clauses.push_back(clause);
  }
  return f;
}

// phi' over variables (p, x_1..x_n) with p at index n:
// (p or C) for C in phi, (not p or D) for D in psi, psi = AND_{i>=2} (x_1 or x_i).
// #phi' = #phi + 2^(n-1) + 1.
inline epsrob::CnfFormula majsat_prime(const epsrob::CnfFormula& phi) {
  const std::size_t n = phi.num_variables;
  epsrob::CnfFormula out;
  out.num_variables = n + 1;
  for (auto clause : phi.clauses) {
    clause.push_back({n, false});
    out.clauses.push_back(clause);
  }
  for (std::size_t i = 1; i < n; ++i) out.clauses.push_back({{0, false}, {i, false}, {n, true}});
  return out;
}

}  // namespace testing

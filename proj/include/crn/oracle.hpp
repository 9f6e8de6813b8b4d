#pragma once

// Exact references for validating the BP solvers on small instances.

#include <cstddef>
#include <vector>

#include "crn/model.hpp"

namespace crn {

struct OracleLimits {
  double max_search_space = 1e7;   // Π_i (1 + channel degree of i)
  double max_configurations = 1e6;  // feasible configurations enumerated by boltzmann_marginals
};

struct OracleResult {
  Assignment assignment;  // lexicographically smallest σ among the optima
  CostBreakdown cost;
  std::size_t nodes = 0;
};

/// Branch and bound over per-SU choices {off} ∪ accessible channels.
/// Throws SearchSpaceTooLarge beyond limits.max_search_space.
OracleResult solve_exact(const ProblemInstance& inst, Model model, const OracleLimits& limits = {});

struct BoltzmannTable {
  double beta = 0.0;
  double log_z = 0.0;
  double z = 0.0;  // may overflow to inf; log_z is always finite
  std::vector<double> su_marginals;  // P(s_i = 1)
  Matrix<double> link_marginals;     // P(σ(i,a) = 1)
  std::size_t configurations = 0;
};

/// Exact marginals of p ∝ e^{-βH} over all matchings (Model A: only those
/// meeting every budget). Throws SearchSpaceTooLarge beyond
/// limits.max_configurations.
BoltzmannTable boltzmann_marginals(const ProblemInstance& inst, Model model, double beta,
                                   const OracleLimits& limits = {});

}  // namespace crn

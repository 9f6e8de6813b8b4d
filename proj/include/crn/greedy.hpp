#pragma once

#include <string>
#include <vector>

#include "crn/model.hpp"

namespace crn {

enum class GreedyVerdict { accepted, su_taken, channel_taken, budget_exceeded, nonpositive_weight };

std::string to_string(GreedyVerdict v);

struct GreedyStep {
  std::size_t su;
  std::size_t channel;
  double weight;
  GreedyVerdict verdict;
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;
  Assignment assignment;
  CostBreakdown cost;
};

/// Largest-priority link first (ties: smaller i, then smaller a); a link is
/// kept if the kept set stays a matching and every budget holds.
GreedyTrace greedy_model_a(const ProblemInstance& inst);

/// Same loop on weights c_i - Σ_b G(i,b)²/θ_b without budget checks; links of
/// non-positive weight are never kept.
GreedyTrace greedy_model_b(const ProblemInstance& inst);

inline GreedyTrace greedy(const ProblemInstance& inst, Model model) {
  return model == Model::A ? greedy_model_a(inst) : greedy_model_b(inst);
}

/// Rebuilds the assignment from the accepted steps of a trace.
Assignment replay(const GreedyTrace& trace, const ProblemInstance& inst);

nlohmann::json trace_to_json(const GreedyTrace& trace);

}  // namespace crn

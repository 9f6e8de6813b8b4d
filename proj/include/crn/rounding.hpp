#pragma once

#include "crn/bp_config.hpp"
#include "crn/factor_graph.hpp"

namespace crn {

/// Turns BP beliefs into one assignment that is feasible for `model`.
///
/// Edges are visited by link log-odds, descending (ties: ascending edge id,
/// i.e. (i, a)). An edge is taken when both endpoints are free, the configured
/// gate passes and, for Model A, every interference budget still holds. Model A
/// then adds remaining feasible edges by descending priority, since connecting
/// a feasible SU always lowers its cost. Model B makes the same pass but adds an
/// edge only if that strictly lowers the cost.
Assignment round_to_assignment(const Beliefs& beliefs, const FactorGraph& fg, const ProblemInstance& inst,
                               Model model, const BpConfig& cfg);

}  // namespace crn

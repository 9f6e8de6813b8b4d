#pragma once

// Sum-product BP with explicit two-state messages.
//
//   A_{i->a}(σ)  SU -> free channel     B_{a->i}(σ)  free channel -> SU
//   C_{i->b}(s)  SU -> active PU        D_{b->i}(s)  active PU -> SU
//
// A and B live on channel edges, C and D on active edges (ids from
// FactorGraph). Every message is a normalised pair over {0, 1}.

#include <random>
#include <vector>

#include "crn/bp_config.hpp"
#include "crn/factor_graph.hpp"

namespace crn {

struct Msg {
  double p0 = 0.5;
  double p1 = 0.5;

  /// ln(p1 / p0) with both components floored at kProbFloor.
  double log_ratio() const;
  static Msg from_log_ratio(double x);
};

struct MessageSet {
  std::vector<Msg> a;  // per channel edge
  std::vector<Msg> b;  // per channel edge
  std::vector<Msg> c;  // per active edge
  std::vector<Msg> d;  // per active edge
};

MessageSet init_messages(const FactorGraph& fg);

// Single-message updates. `edge` is a channel-edge id for A/B and an
// active-edge id for C/D. `cfg.beta` is used as given.
Msg update_A(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst,
             Model model, const BpConfig& cfg);
Msg update_B(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const BpConfig& cfg);
Msg update_C(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst,
             Model model, const BpConfig& cfg);
/// Throws DegreeTooHigh when the PU has more than cfg.d_max other neighbours.
Msg update_D_model_a(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst,
                     const BpConfig& cfg);
Msg update_D_model_b(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst,
                     const BpConfig& cfg);

/// Link and SU log-odds implied by a message set.
Beliefs compute_beliefs(const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst, Model model,
                        const BpConfig& cfg);

/// Stateful solver: one instance owns its messages; `sweep` performs one full
/// pass under the configured schedule and returns the max component change.
class FullBpSolver {
public:
  FullBpSolver(const FactorGraph& fg, const ProblemInstance& inst, Model model, BpConfig cfg);

  double sweep();
  BpResult run();
  BpResult finish(bool converged, std::size_t iterations, double residual) const;

  const MessageSet& messages() const { return ms_; }
  const BpConfig& config() const { return cfg_; }

private:
  Msg compute(int family, std::size_t edge, const MessageSet& from) const;
  double apply(int family, std::size_t edge, const Msg& computed);

  const FactorGraph& fg_;
  const ProblemInstance& inst_;
  Model model_;
  BpConfig cfg_;
  MessageSet ms_;
  std::mt19937_64 rng_;
};

/// Runs the solver to a fixed point (or max_iter) and rounds the result.
BpResult iterate(const FactorGraph& fg, const ProblemInstance& inst, Model model, const BpConfig& cfg);

}  // namespace crn

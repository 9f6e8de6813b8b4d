#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "crn/model.hpp"

namespace crn {

enum class Schedule { synchronous, random_sequential };

/// Column constraint inside the channel -> SU message.
enum class ChannelConstraint {
  at_most_one,  // Σ_j σ(j,a) <= 1
  exact_one,    // Σ_j σ(j,a) == 1
};

/// Row sum inside the SU -> active-PU message.
enum class ActivitySum {
  at_most_one,    // s_i = 1 via exactly one channel
  unconstrained,  // any non-empty channel subset
};

/// How an active PU couples SUs in Model B.
enum class PuCoupling {
  product,   // Π_j [C_j(0) + C_j(1) e^{-(β/θ) G_i G_j s_i}]
  pairwise,  // same product with the symmetric pair weight 2 G_i G_j / θ
  exact,     // enumerated cavity sum of the full quadratic factor (degree-capped)
};

/// Which quantity licenses an edge in the first rounding pass.
enum class RoundingGate {
  link,      // link belief b(1) > b(0)
  activity,  // SU marginal P(s_i = 1) > 1/2
};

/// Full-message mode never runs with a larger β than this.
inline constexpr double kMaxFullBeta = 50.0;

struct BpConfig {
  double beta = 10.0;
  double damping = 0.5;
  std::size_t max_iter = 1000;
  double tol = 1e-8;
  Schedule schedule = Schedule::synchronous;
  std::size_t d_max = 25;
  bool include_diagonal = true;
  std::uint64_t seed = 0;
  ChannelConstraint channel_constraint = ChannelConstraint::at_most_one;
  ActivitySum activity_sum = ActivitySum::at_most_one;
  PuCoupling pu_coupling = PuCoupling::product;
  bool negate_q = false;  // field solver only: flips the overall sign of both q updates
  RoundingGate rounding_gate = RoundingGate::activity;

  void validate() const;
};

nlohmann::json bp_config_to_json(const BpConfig& cfg);
/// Missing keys keep the values of `base`.
BpConfig bp_config_from_json(const nlohmann::json& doc, BpConfig base = {});

std::string to_string(Schedule s);
std::string to_string(PuCoupling c);
std::string to_string(RoundingGate g);
Schedule schedule_from_string(const std::string& s);
PuCoupling pu_coupling_from_string(const std::string& s);
RoundingGate rounding_gate_from_string(const std::string& s);

/// Log-odds of every channel edge (link variable) and every SU (activity).
struct Beliefs {
  std::vector<double> link_log_odds;  // per channel edge: ln b(1)/b(0)
  std::vector<double> su_log_odds;    // per SU: ln P(s=1)/P(s=0)
};

struct BpResult {
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
  double beta_used = 0.0;
  std::vector<double> link_beliefs;  // per channel edge: P(σ=1)
  std::vector<double> su_marginals;  // per SU: P(s=1)
  Beliefs beliefs;
  Assignment assignment;
  CostBreakdown cost;
};

}  // namespace crn

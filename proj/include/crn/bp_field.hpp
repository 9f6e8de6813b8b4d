#pragma once

// Log-ratio ("field") form of Model-B BP. Each field is (1/β) times the log
// ratio of the corresponding full message:
//
//   h_su[e] = (1/β) ln A(1)/A(0)     h_ch[e] = (1/β) ln B(1)/B(0)    (channel edges)
//   q_su[f] = (1/β) ln C(1)/C(0)     q_pu[f] = (1/β) ln D(1)/D(0)    (active edges)
//
// Fields stay finite at any β; kForcedZero / kForcedOne stand in for ∓∞.

#include <random>
#include <vector>

#include "crn/bp_config.hpp"
#include "crn/factor_graph.hpp"

namespace crn {

struct FieldMessages {
  std::vector<double> h_su;
  std::vector<double> h_ch;
  std::vector<double> q_su;
  std::vector<double> q_pu;
};

FieldMessages init_fields(const FactorGraph& fg);

double update_field_h_su(std::size_t edge, const FieldMessages& fm, const FactorGraph& fg,
                         const ProblemInstance& inst, const BpConfig& cfg);
double update_field_h_ch(std::size_t edge, const FieldMessages& fm, const FactorGraph& fg, const BpConfig& cfg);
double update_field_q_su(std::size_t edge, const FieldMessages& fm, const FactorGraph& fg,
                         const ProblemInstance& inst, const BpConfig& cfg);
double update_field_q_pu(std::size_t edge, const FieldMessages& fm, const FactorGraph& fg,
                         const ProblemInstance& inst, const BpConfig& cfg);

/// Damps in probability space, evaluated in the log domain:
/// p = λ p_old + (1-λ) p_new with p = logistic(β·field). Matches the
/// full-message damping exactly and stays finite at large β.
double damp_field(double old_value, double new_value, double beta, double damping);

Beliefs compute_field_beliefs(const FieldMessages& fm, const FactorGraph& fg, const ProblemInstance& inst,
                              const BpConfig& cfg);

class FieldBpSolver {
public:
  /// Throws std::invalid_argument for PuCoupling::exact (no field form).
  FieldBpSolver(const FactorGraph& fg, const ProblemInstance& inst, BpConfig cfg);

  double sweep();
  BpResult run();
  BpResult finish(bool converged, std::size_t iterations, double residual) const;

  const FieldMessages& fields() const { return fm_; }

private:
  double compute(int family, std::size_t edge, const FieldMessages& from) const;
  double apply(int family, std::size_t edge, double computed);

  const FactorGraph& fg_;
  const ProblemInstance& inst_;
  BpConfig cfg_;
  FieldMessages fm_;
  std::mt19937_64 rng_;
};

/// Model-B solve in field form.
BpResult iterate_field(const FactorGraph& fg, const ProblemInstance& inst, const BpConfig& cfg);

}  // namespace crn

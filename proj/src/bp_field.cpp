#include "crn/bp_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "crn/numeric.hpp"
#include "crn/rounding.hpp"

namespace crn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum Family : int { kHsu = 0, kHch = 1, kQsu = 2, kQpu = 3 };

bool is_sentinel(double v) { return v <= kForcedZero || v >= kForcedOne; }

double clamp_field(double v) { return std::clamp(v, kForcedZero, kForcedOne); }

// ln of the channel-availability sum, given β·h_{b->i} for every channel of i.
double availability(const std::vector<double>& scaled, ActivitySum mode) {
  if (scaled.empty()) return kNegInf;
  if (mode == ActivitySum::at_most_one) return log_sum_exp(scaled);
  double acc = 0.0;
  for (double x : scaled) acc += softplus(x);
  return acc > 0.0 ? log_expm1(acc) : kNegInf;
}

double effective_c(const ProblemInstance& inst, std::size_t i, const BpConfig& cfg) {
  return inst.effective_priority(i, Model::B, cfg.include_diagonal);
}

}  // namespace

FieldMessages init_fields(const FactorGraph& fg) {
  FieldMessages fm;
  fm.h_su.assign(fg.channel_edges().size(), 0.0);
  fm.h_ch.assign(fg.channel_edges().size(), 0.0);
  fm.q_su.assign(fg.active_edges().size(), 0.0);
  fm.q_pu.assign(fg.active_edges().size(), 0.0);
  return fm;
}

double update_field_h_su(std::size_t edge, const FieldMessages& fm, const FactorGraph& fg,
                         const ProblemInstance& inst, const BpConfig& cfg) {
  const double beta = cfg.beta;
  const std::size_t i = fg.channel_edges()[edge].su;
  double field = effective_c(inst, i, cfg);
  for (auto f : fg.su_active_edges(i)) field += fm.q_pu[f];
  std::vector<double> terms{-beta * field};
  for (auto b : fg.su_channel_edges(i))
    if (b != edge) terms.push_back(beta * fm.h_ch[b]);
  return clamp_field(-log_sum_exp(terms) / beta);
}

double update_field_h_ch(std::size_t edge, const FieldMessages& fm, const FactorGraph& fg, const BpConfig& cfg) {
  const double beta = cfg.beta;
  const std::size_t a = fg.channel_edges()[edge].channel;
  std::vector<double> terms;
  for (auto j : fg.channel_su_edges(a))
    if (j != edge) terms.push_back(beta * fm.h_su[j]);
  if (cfg.channel_constraint == ChannelConstraint::exact_one) {
    if (terms.empty()) return kForcedOne;
  } else {
    terms.push_back(0.0);
  }
  return clamp_field(-log_sum_exp(terms) / beta);
}

double update_field_q_su(std::size_t edge, const FieldMessages& fm, const FactorGraph& fg,
                         const ProblemInstance& inst, const BpConfig& cfg) {
  const double beta = cfg.beta;
  const std::size_t i = fg.active_edges()[edge].su;
  std::vector<double> scaled;
  for (auto b : fg.su_channel_edges(i)) scaled.push_back(beta * fm.h_ch[b]);
  const double avail = availability(scaled, cfg.activity_sum);
  if (avail == kNegInf) return kForcedZero;

  double q = effective_c(inst, i, cfg) + avail / beta;
  for (auto f : fg.su_active_edges(i))
    if (f != edge) q += fm.q_pu[f];
  return clamp_field(cfg.negate_q ? -q : q);
}

double update_field_q_pu(std::size_t edge, const FieldMessages& fm, const FactorGraph& fg,
                         const ProblemInstance& inst, const BpConfig& cfg) {
  if (cfg.pu_coupling == PuCoupling::exact)
    throw std::invalid_argument("field BP has no form for the exact PU coupling");
  const double beta = cfg.beta;
  const auto& e = fg.active_edges()[edge];
  const double weight = cfg.pu_coupling == PuCoupling::pairwise ? 2.0 : 1.0;
  const double kappa = weight * e.gain / inst.threshold(e.pu);

  double q = 0.0;
  for (auto f : fg.pu_su_edges(e.pu)) {
    if (f == edge) continue;
    const double x = beta * fm.q_su[f];
    q += softplus(x - beta * kappa * fg.active_edges()[f].gain) - softplus(x);
  }
  q /= beta;
  return clamp_field(cfg.negate_q ? -q : q);
}

double damp_field(double old_value, double new_value, double beta, double damping) {
  if (damping <= 0.0 || is_sentinel(new_value)) return new_value;
  const double x = beta * old_value, y = beta * new_value;
  const double log_lam = std::log(damping), log_rest = std::log1p(-damping);
  const double log_p = log_add_exp(log_lam - softplus(-x), log_rest - softplus(-y));
  const double log_q = log_add_exp(log_lam - softplus(x), log_rest - softplus(y));
  return clamp_field((log_p - log_q) / beta);
}

Beliefs compute_field_beliefs(const FieldMessages& fm, const FactorGraph& fg, const ProblemInstance& inst,
                              const BpConfig& cfg) {
  const double beta = cfg.beta;
  Beliefs out;
  out.link_log_odds.resize(fg.channel_edges().size());
  for (std::size_t e = 0; e < out.link_log_odds.size(); ++e) out.link_log_odds[e] = beta * (fm.h_su[e] + fm.h_ch[e]);

  out.su_log_odds.resize(fg.n_su());
  for (std::size_t i = 0; i < fg.n_su(); ++i) {
    std::vector<double> scaled;
    for (auto b : fg.su_channel_edges(i)) scaled.push_back(beta * fm.h_ch[b]);
    const double avail = availability(scaled, cfg.activity_sum);
    if (avail == kNegInf) {
      out.su_log_odds[i] = kForcedZero;
      continue;
    }
    double field = effective_c(inst, i, cfg);
    for (auto f : fg.su_active_edges(i)) field += fm.q_pu[f];
    out.su_log_odds[i] = beta * field + avail;
  }
  return out;
}

FieldBpSolver::FieldBpSolver(const FactorGraph& fg, const ProblemInstance& inst, BpConfig cfg)
    : fg_(fg), inst_(inst), cfg_(cfg), fm_(init_fields(fg)), rng_(cfg.seed) {
  cfg_.validate();
  if (cfg_.pu_coupling == PuCoupling::exact)
    throw std::invalid_argument("field BP has no form for the exact PU coupling");
}

double FieldBpSolver::compute(int family, std::size_t edge, const FieldMessages& from) const {
  switch (family) {
    case kHsu: return update_field_h_su(edge, from, fg_, inst_, cfg_);
    case kHch: return update_field_h_ch(edge, from, fg_, cfg_);
    case kQsu: return update_field_q_su(edge, from, fg_, inst_, cfg_);
    default: return update_field_q_pu(edge, from, fg_, inst_, cfg_);
  }
}

double FieldBpSolver::apply(int family, std::size_t edge, double computed) {
  auto& slot = family == kHsu   ? fm_.h_su[edge]
               : family == kHch ? fm_.h_ch[edge]
               : family == kQsu ? fm_.q_su[edge]
                                : fm_.q_pu[edge];
  const double next = damp_field(slot, computed, cfg_.beta, cfg_.damping);
  // Residual in probability units, as for the full messages.
  const double delta = std::abs(logistic(cfg_.beta * next) - logistic(cfg_.beta * slot));
  slot = next;
  return delta;
}

double FieldBpSolver::sweep() {
  const std::size_t sizes[4] = {fm_.h_su.size(), fm_.h_ch.size(), fm_.q_su.size(), fm_.q_pu.size()};
  double residual = 0.0;

  if (cfg_.schedule == Schedule::synchronous) {
    std::vector<double> fresh[4];
    for (int fam = 0; fam < 4; ++fam) {
      fresh[fam].resize(sizes[fam]);
      for (std::size_t e = 0; e < sizes[fam]; ++e) fresh[fam][e] = compute(fam, e, fm_);
    }
    for (int fam = 0; fam < 4; ++fam)
      for (std::size_t e = 0; e < sizes[fam]; ++e) residual = std::max(residual, apply(fam, e, fresh[fam][e]));
    return residual;
  }

  std::vector<std::pair<int, std::size_t>> order;
  for (int fam = 0; fam < 4; ++fam)
    for (std::size_t e = 0; e < sizes[fam]; ++e) order.emplace_back(fam, e);
  std::shuffle(order.begin(), order.end(), rng_);
  for (const auto& [fam, e] : order) residual = std::max(residual, apply(fam, e, compute(fam, e, fm_)));
  return residual;
}

BpResult FieldBpSolver::finish(bool converged, std::size_t iterations, double residual) const {
  BpResult out;
  out.converged = converged;
  out.iterations = iterations;
  out.residual = residual;
  out.beta_used = cfg_.beta;
  out.beliefs = compute_field_beliefs(fm_, fg_, inst_, cfg_);
  for (double x : out.beliefs.link_log_odds) out.link_beliefs.push_back(logistic(x));
  for (double x : out.beliefs.su_log_odds) out.su_marginals.push_back(logistic(x));
  out.assignment = round_to_assignment(out.beliefs, fg_, inst_, Model::B, cfg_);
  out.cost = evaluate(out.assignment, inst_, Model::B);
  return out;
}

BpResult FieldBpSolver::run() {
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= cfg_.max_iter; ++it) {
    residual = sweep();
    if (residual < cfg_.tol) return finish(true, it, residual);
  }
  return finish(false, cfg_.max_iter, residual);
}

BpResult iterate_field(const FactorGraph& fg, const ProblemInstance& inst, const BpConfig& cfg) {
  FieldBpSolver solver(fg, inst, cfg);
  return solver.run();
}

}  // namespace crn

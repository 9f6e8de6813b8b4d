#include "crn/bp_full.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crn/errors.hpp"
#include "crn/numeric.hpp"
#include "crn/rounding.hpp"

namespace crn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum Family : int { kA = 0, kB = 1, kC = 2, kD = 3 };

struct CavityItem {
  double gain;
  double log_c0;
  double log_c1;
};

// Other neighbours of an active PU, sorted by descending gain (stable in edge id).
std::vector<CavityItem> cavity_items(std::size_t edge, const MessageSet& ms, const FactorGraph& fg,
                                     std::size_t d_max) {
  const auto& e = fg.active_edges()[edge];
  const auto& incident = fg.pu_su_edges(e.pu);
  if (incident.size() - 1 > d_max)
    throw DegreeTooHigh("active PU " + std::to_string(e.pu) + " has " + std::to_string(incident.size()) +
                        " interfering SUs, above d_max = " + std::to_string(d_max) +
                        "; use Model B or raise d_max");
  std::vector<CavityItem> items;
  items.reserve(incident.size());
  for (auto f : incident) {
    if (f == edge) continue;
    items.push_back({fg.active_edges()[f].gain, safe_log(ms.c[f].p0), safe_log(ms.c[f].p1)});
  }
  std::stable_sort(items.begin(), items.end(),
                   [](const CavityItem& x, const CavityItem& y) { return x.gain > y.gain; });
  return items;
}

// log Σ over subsets S of items[k..] with Σ_S gain <= residual of Π C(s_j).
class BudgetedSum {
public:
  explicit BudgetedSum(const std::vector<CavityItem>& items) : items_(items) {
    const auto n = items.size();
    suffix_gain_.assign(n + 1, 0.0);
    suffix_free_.assign(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) {
      suffix_gain_[k] = suffix_gain_[k + 1] + items[k].gain;
      suffix_free_[k] = suffix_free_[k + 1] + log_add_exp(items[k].log_c0, items[k].log_c1);
    }
  }

  double operator()(std::size_t k, double residual) const {
    if (k == items_.size()) return 0.0;
    // Everything left fits: the remaining choices are unconstrained.
    if (suffix_gain_[k] <= residual) return suffix_free_[k];
    double v = items_[k].log_c0 + (*this)(k + 1, residual);
    if (items_[k].gain <= residual) v = log_add_exp(v, items_[k].log_c1 + (*this)(k + 1, residual - items_[k].gain));
    return v;
  }

private:
  const std::vector<CavityItem>& items_;
  std::vector<double> suffix_gain_;
  std::vector<double> suffix_free_;
};

// Full quadratic PU factor, diagonal removed (it lives in the effective priority).
void enumerate_quadratic(const std::vector<CavityItem>& items, std::size_t k, double log_w, double load,
                         double squares, double gain_i, double scale, double& l0, double& l1) {
  if (k == items.size()) {
    const double cross = load * load - squares;
    l0 = log_add_exp(l0, log_w - scale * cross);
    l1 = log_add_exp(l1, log_w - scale * (cross + 2.0 * gain_i * load));
    return;
  }
  const auto& it = items[k];
  enumerate_quadratic(items, k + 1, log_w + it.log_c0, load, squares, gain_i, scale, l0, l1);
  enumerate_quadratic(items, k + 1, log_w + it.log_c1, load + it.gain, squares + it.gain * it.gain, gain_i, scale,
                      l0, l1);
}

double channel_sum(const std::vector<double>& ratios, ActivitySum mode) {
  if (ratios.empty()) return kNegInf;
  if (mode == ActivitySum::at_most_one) return log_sum_exp(ratios);
  double acc = 0.0;
  for (double r : ratios) acc += softplus(r);
  return acc > 0.0 ? log_expm1(acc) : kNegInf;
}

}  // namespace

double Msg::log_ratio() const { return safe_log(p1) - safe_log(p0); }

Msg Msg::from_log_ratio(double x) { return {logistic(-x), logistic(x)}; }

MessageSet init_messages(const FactorGraph& fg) {
  MessageSet ms;
  ms.a.assign(fg.channel_edges().size(), Msg{});
  ms.b.assign(fg.channel_edges().size(), Msg{});
  ms.c.assign(fg.active_edges().size(), Msg{});
  ms.d.assign(fg.active_edges().size(), Msg{});
  return ms;
}

Msg update_A(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst,
             Model model, const BpConfig& cfg) {
  const std::size_t i = fg.channel_edges()[edge].su;
  const double bc = cfg.beta * inst.effective_priority(i, model, cfg.include_diagonal);

  double log_d0 = 0.0, log_d1 = 0.0;
  for (auto f : fg.su_active_edges(i)) {
    log_d0 += safe_log(ms.d[f].p0);
    log_d1 += safe_log(ms.d[f].p1);
  }
  // Common factor Π_{b≠a} B_b(0) dropped. σ=1: connect via a. σ=0: stay off,
  // or connect via exactly one other channel b.
  std::vector<double> off{log_d0};
  for (auto b : fg.su_channel_edges(i))
    if (b != edge) off.push_back(bc + log_d1 + ms.b[b].log_ratio());
  return Msg::from_log_ratio(bc + log_d1 - log_sum_exp(off));
}

Msg update_B(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const BpConfig& cfg) {
  const std::size_t a = fg.channel_edges()[edge].channel;
  std::vector<double> ratios;
  for (auto j : fg.channel_su_edges(a))
    if (j != edge) ratios.push_back(ms.a[j].log_ratio());
  if (cfg.channel_constraint == ChannelConstraint::exact_one) {
    if (ratios.empty()) return {0.0, 1.0};
    return Msg::from_log_ratio(-log_sum_exp(ratios));
  }
  ratios.push_back(0.0);  // channel left empty
  return Msg::from_log_ratio(-log_sum_exp(ratios));
}

Msg update_C(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst,
             Model model, const BpConfig& cfg) {
  const std::size_t i = fg.active_edges()[edge].su;
  std::vector<double> ratios;
  for (auto b : fg.su_channel_edges(i)) ratios.push_back(ms.b[b].log_ratio());
  const double avail = channel_sum(ratios, cfg.activity_sum);
  if (avail == kNegInf) return {1.0, 0.0};

  double x = cfg.beta * inst.effective_priority(i, model, cfg.include_diagonal) + avail;
  for (auto f : fg.su_active_edges(i))
    if (f != edge) x += ms.d[f].log_ratio();
  return Msg::from_log_ratio(x);
}

Msg update_D_model_a(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst,
                     const BpConfig& cfg) {
  const auto& e = fg.active_edges()[edge];
  const auto items = cavity_items(edge, ms, fg, cfg.d_max);
  const BudgetedSum sum(items);
  const double budget = inst.threshold(e.pu) + 1e-12;
  const double l0 = sum(0, budget);
  const double l1 = e.gain <= budget ? sum(0, budget - e.gain) : kNegInf;
  if (l1 == kNegInf) return {1.0, 0.0};
  return Msg::from_log_ratio(l1 - l0);
}

Msg update_D_model_b(std::size_t edge, const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst,
                     const BpConfig& cfg) {
  const auto& e = fg.active_edges()[edge];
  const double scale = cfg.beta / inst.threshold(e.pu);

  if (cfg.pu_coupling == PuCoupling::exact) {
    const auto items = cavity_items(edge, ms, fg, cfg.d_max);
    double l0 = kNegInf, l1 = kNegInf;
    enumerate_quadratic(items, 0, 0.0, 0.0, 0.0, e.gain, scale, l0, l1);
    return Msg::from_log_ratio(l1 - l0);
  }

  const double weight = cfg.pu_coupling == PuCoupling::pairwise ? 2.0 : 1.0;
  double x = 0.0;
  for (auto f : fg.pu_su_edges(e.pu)) {
    if (f == edge) continue;
    const double lc0 = safe_log(ms.c[f].p0), lc1 = safe_log(ms.c[f].p1);
    const double penalty = weight * scale * e.gain * fg.active_edges()[f].gain;
    x += log_add_exp(lc0, lc1 - penalty) - log_add_exp(lc0, lc1);
  }
  return Msg::from_log_ratio(x);
}

Beliefs compute_beliefs(const MessageSet& ms, const FactorGraph& fg, const ProblemInstance& inst, Model model,
                        const BpConfig& cfg) {
  Beliefs out;
  out.link_log_odds.resize(fg.channel_edges().size());
  for (std::size_t e = 0; e < out.link_log_odds.size(); ++e)
    out.link_log_odds[e] = ms.a[e].log_ratio() + ms.b[e].log_ratio();

  out.su_log_odds.resize(fg.n_su());
  for (std::size_t i = 0; i < fg.n_su(); ++i) {
    std::vector<double> ratios;
    for (auto b : fg.su_channel_edges(i)) ratios.push_back(ms.b[b].log_ratio());
    const double avail = channel_sum(ratios, cfg.activity_sum);
    if (avail == kNegInf) {
      out.su_log_odds[i] = kForcedZero;
      continue;
    }
    double x = cfg.beta * inst.effective_priority(i, model, cfg.include_diagonal) + avail;
    for (auto f : fg.su_active_edges(i)) x += ms.d[f].log_ratio();
    out.su_log_odds[i] = x;
  }
  return out;
}

FullBpSolver::FullBpSolver(const FactorGraph& fg, const ProblemInstance& inst, Model model, BpConfig cfg)
    : fg_(fg), inst_(inst), model_(model), cfg_(cfg), ms_(init_messages(fg)), rng_(cfg.seed) {
  cfg_.validate();
  cfg_.beta = std::min(cfg_.beta, kMaxFullBeta);
}

Msg FullBpSolver::compute(int family, std::size_t edge, const MessageSet& from) const {
  switch (family) {
    case kA: return update_A(edge, from, fg_, inst_, model_, cfg_);
    case kB: return update_B(edge, from, fg_, cfg_);
    case kC: return update_C(edge, from, fg_, inst_, model_, cfg_);
    default:
      return model_ == Model::A ? update_D_model_a(edge, from, fg_, inst_, cfg_)
                                : update_D_model_b(edge, from, fg_, inst_, cfg_);
  }
}

double FullBpSolver::apply(int family, std::size_t edge, const Msg& computed) {
  auto& slot = family == kA ? ms_.a[edge] : family == kB ? ms_.b[edge] : family == kC ? ms_.c[edge] : ms_.d[edge];
  Msg next = computed;
  // A message that rules a state out is taken as is; damping would only
  // approach the zero geometrically.
  const bool forced = computed.p0 == 0.0 || computed.p1 == 0.0;
  if (!forced && cfg_.damping > 0.0) {
    const double lam = cfg_.damping;
    next.p0 = lam * slot.p0 + (1.0 - lam) * computed.p0;
    next.p1 = lam * slot.p1 + (1.0 - lam) * computed.p1;
    const double z = next.p0 + next.p1;
    next.p0 /= z;
    next.p1 /= z;
  }
  const double delta = std::max(std::abs(next.p0 - slot.p0), std::abs(next.p1 - slot.p1));
  slot = next;
  return delta;
}

double FullBpSolver::sweep() {
  const std::size_t sizes[4] = {ms_.a.size(), ms_.b.size(), ms_.c.size(), ms_.d.size()};
  double residual = 0.0;

  if (cfg_.schedule == Schedule::synchronous) {
    std::vector<Msg> fresh[4];
    for (int fam = 0; fam < 4; ++fam) {
      fresh[fam].resize(sizes[fam]);
      for (std::size_t e = 0; e < sizes[fam]; ++e) fresh[fam][e] = compute(fam, e, ms_);
    }
    for (int fam = 0; fam < 4; ++fam)
      for (std::size_t e = 0; e < sizes[fam]; ++e) residual = std::max(residual, apply(fam, e, fresh[fam][e]));
    return residual;
  }

  std::vector<std::pair<int, std::size_t>> order;
  for (int fam = 0; fam < 4; ++fam)
    for (std::size_t e = 0; e < sizes[fam]; ++e) order.emplace_back(fam, e);
  std::shuffle(order.begin(), order.end(), rng_);
  for (const auto& [fam, e] : order) residual = std::max(residual, apply(fam, e, compute(fam, e, ms_)));
  return residual;
}

BpResult FullBpSolver::finish(bool converged, std::size_t iterations, double residual) const {
  BpResult out;
  out.converged = converged;
  out.iterations = iterations;
  out.residual = residual;
  out.beta_used = cfg_.beta;
  out.beliefs = compute_beliefs(ms_, fg_, inst_, model_, cfg_);
  for (double x : out.beliefs.link_log_odds) out.link_beliefs.push_back(logistic(x));
  for (double x : out.beliefs.su_log_odds) out.su_marginals.push_back(logistic(x));
  out.assignment = round_to_assignment(out.beliefs, fg_, inst_, model_, cfg_);
  out.cost = evaluate(out.assignment, inst_, model_);
  return out;
}

BpResult FullBpSolver::run() {
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= cfg_.max_iter; ++it) {
    residual = sweep();
    if (residual < cfg_.tol) return finish(true, it, residual);
  }
  return finish(false, cfg_.max_iter, residual);
}

BpResult iterate(const FactorGraph& fg, const ProblemInstance& inst, Model model, const BpConfig& cfg) {
  FullBpSolver solver(fg, inst, model, cfg);
  return solver.run();
}

}  // namespace crn

#include "crn/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "crn/errors.hpp"

namespace crn {

namespace {

constexpr double kTieTol = 1e-12;
constexpr long kOff = -1;

std::vector<std::vector<std::size_t>> channel_lists(const ProblemInstance& inst) {
  std::vector<std::vector<std::size_t>> out(inst.n_su());
  for (std::size_t i = 0; i < inst.n_su(); ++i)
    for (std::size_t a = 0; a < inst.n_free(); ++a)
      if (inst.accessible(i, a)) out[i].push_back(a);
  return out;
}

// Shared DFS state: SU-by-SU choices with incremental loads and cost.
class Enumerator {
public:
  Enumerator(const ProblemInstance& inst, Model model)
      : inst_(inst),
        model_(model),
        channels_(channel_lists(inst)),
        choice_(inst.n_su(), kOff),
        channel_used_(inst.n_free(), 0),
        load_(inst.n_active(), 0.0) {}

  const std::vector<std::vector<std::size_t>>& channels() const { return channels_; }
  const std::vector<long>& choice() const { return choice_; }

  // Cost change of switching SU i on; false when a Model-A budget breaks.
  bool activation_delta(std::size_t i, double& delta) const {
    delta = -inst_.priority(i);
    for (std::size_t b = 0; b < inst_.n_active(); ++b) {
      const double g = inst_.interference(i, b);
      if (g == 0.0) continue;
      if (model_ == Model::A) {
        if (!within_budget(load_[b] + g, inst_.threshold(b))) return false;
      } else {
        delta += ((load_[b] + g) * (load_[b] + g) - load_[b] * load_[b]) / inst_.threshold(b);
      }
    }
    return true;
  }

  void push(std::size_t i, std::size_t a) {
    choice_[i] = static_cast<long>(a);
    channel_used_[a] = 1;
    for (std::size_t b = 0; b < inst_.n_active(); ++b) load_[b] += inst_.interference(i, b);
  }

  void pop(std::size_t i) {
    channel_used_[static_cast<std::size_t>(choice_[i])] = 0;
    choice_[i] = kOff;
    for (std::size_t b = 0; b < inst_.n_active(); ++b) load_[b] -= inst_.interference(i, b);
  }

  bool channel_free(std::size_t a) const { return !channel_used_[a]; }

  Assignment to_assignment() const {
    Assignment out(inst_);
    for (std::size_t i = 0; i < inst_.n_su(); ++i)
      if (choice_[i] != kOff) out.set(inst_, i, static_cast<std::size_t>(choice_[i]), true);
    return out;
  }

private:
  const ProblemInstance& inst_;
  Model model_;
  std::vector<std::vector<std::size_t>> channels_;
  std::vector<long> choice_;
  std::vector<std::uint8_t> channel_used_;
  std::vector<double> load_;
};

class BranchAndBound {
public:
  BranchAndBound(const ProblemInstance& inst, Model model) : inst_(inst), model_(model), state_(inst, model) {
    const auto n = inst.n_su();
    // Optimistic remaining gain: cross-interference terms are never negative.
    optimistic_.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
      double best = 0.0;
      if (!state_.channels()[i].empty()) {
        const double solo = model == Model::A ? -inst.priority(i) : -inst.priority(i) + inst.self_interference(i);
        best = std::min(0.0, solo);
      }
      optimistic_[i] = optimistic_[i + 1] + best;
    }
  }

  OracleResult solve() {
    descend(0, 0.0);
    OracleResult out;
    out.assignment = std::move(best_);
    out.cost = evaluate(out.assignment, inst_, model_);
    out.nodes = nodes_;
    return out;
  }

private:
  void descend(std::size_t i, double cost) {
    ++nodes_;
    if (i == inst_.n_su()) {
      if (cost < best_cost_ - kTieTol) {
        best_cost_ = cost;
        best_ = state_.to_assignment();
      }
      return;
    }
    if (cost + optimistic_[i] >= best_cost_ - kTieTol) return;

    // Lexicographic order on σ: off first, then channels from high to low.
    descend(i + 1, cost);
    const auto& chans = state_.channels()[i];
    double delta = 0.0;
    if (chans.empty() || !state_.activation_delta(i, delta)) return;
    for (auto it = chans.rbegin(); it != chans.rend(); ++it) {
      if (!state_.channel_free(*it)) continue;
      state_.push(i, *it);
      descend(i + 1, cost + delta);
      state_.pop(i);
    }
  }

  const ProblemInstance& inst_;
  Model model_;
  Enumerator state_;
  std::vector<double> optimistic_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  Assignment best_;
  std::size_t nodes_ = 0;
};

class BoltzmannSum {
public:
  BoltzmannSum(const ProblemInstance& inst, Model model, double beta, double max_configs)
      : inst_(inst),
        model_(model),
        beta_(beta),
        max_configs_(max_configs),
        state_(inst, model),
        su_(inst.n_su(), 0.0),
        link_(inst.n_su(), inst.n_free(), 0.0) {}

  BoltzmannTable run() {
    descend(0, 0.0);
    BoltzmannTable out;
    out.beta = beta_;
    out.configurations = configs_;
    out.log_z = shift_ + std::log(z_);
    out.z = std::exp(out.log_z);
    out.su_marginals.resize(inst_.n_su());
    for (std::size_t i = 0; i < inst_.n_su(); ++i) out.su_marginals[i] = su_[i] / z_;
    out.link_marginals = Matrix<double>(inst_.n_su(), inst_.n_free(), 0.0);
    for (std::size_t i = 0; i < inst_.n_su(); ++i)
      for (std::size_t a = 0; a < inst_.n_free(); ++a) out.link_marginals(i, a) = link_(i, a) / z_;
    return out;
  }

private:
  void descend(std::size_t i, double cost) {
    if (i == inst_.n_su()) {
      accumulate(-beta_ * cost);
      return;
    }
    descend(i + 1, cost);
    const auto& chans = state_.channels()[i];
    double delta = 0.0;
    if (chans.empty() || !state_.activation_delta(i, delta)) return;
    for (auto a : chans) {
      if (!state_.channel_free(a)) continue;
      state_.push(i, a);
      descend(i + 1, cost + delta);
      state_.pop(i);
    }
  }

  void accumulate(double log_w) {
    if (++configs_ > static_cast<std::size_t>(max_configs_))
      throw SearchSpaceTooLarge("boltzmann_marginals: more than " + std::to_string(max_configs_) +
                                " configurations");
    if (log_w > shift_) {
      // Rescale accumulators to the new reference weight.
      const double factor = std::exp(shift_ - log_w);
      z_ *= factor;
      for (auto& v : su_) v *= factor;
      for (auto& v : link_.data()) v *= factor;
      shift_ = log_w;
    }
    const double w = std::exp(log_w - shift_);
    z_ += w;
    const auto& choice = state_.choice();
    for (std::size_t i = 0; i < inst_.n_su(); ++i) {
      if (choice[i] == kOff) continue;
      su_[i] += w;
      link_(i, static_cast<std::size_t>(choice[i])) += w;
    }
  }

  const ProblemInstance& inst_;
  Model model_;
  double beta_;
  double max_configs_;
  Enumerator state_;
  double shift_ = -std::numeric_limits<double>::infinity();
  double z_ = 0.0;
  std::vector<double> su_;
  Matrix<double> link_;
  std::size_t configs_ = 0;
};

void check_search_space(const ProblemInstance& inst, double limit) {
  double space = 1.0;
  for (std::size_t i = 0; i < inst.n_su(); ++i) {
    double deg = 0.0;
    for (std::size_t a = 0; a < inst.n_free(); ++a) deg += inst.accessible(i, a) ? 1.0 : 0.0;
    space *= 1.0 + deg;
    if (space > limit)
      throw SearchSpaceTooLarge("solve_exact: search space exceeds " + std::to_string(limit));
  }
}

}  // namespace

OracleResult solve_exact(const ProblemInstance& inst, Model model, const OracleLimits& limits) {
  check_search_space(inst, limits.max_search_space);
  return BranchAndBound(inst, model).solve();
}

BoltzmannTable boltzmann_marginals(const ProblemInstance& inst, Model model, double beta,
                                   const OracleLimits& limits) {
  if (!(beta >= 0.0)) throw std::invalid_argument("boltzmann_marginals: beta must be >= 0");
  return BoltzmannSum(inst, model, beta, limits.max_configurations).run();
}

}  // namespace crn

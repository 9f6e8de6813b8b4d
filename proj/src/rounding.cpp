#include "crn/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace crn {

namespace {

double sortable(double x) { return std::isnan(x) ? -std::numeric_limits<double>::infinity() : x; }

class Builder {
public:
  Builder(const FactorGraph& fg, const ProblemInstance& inst, Model model)
      : fg_(fg),
        inst_(inst),
        model_(model),
        assign_(inst),
        su_used_(inst.n_su(), 0),
        channel_used_(inst.n_free(), 0),
        load_(inst.n_active(), 0.0) {}

  // Model B only: accept the edge when switching its SU on lowers the cost.
  bool try_add_if_cheaper(std::size_t edge) {
    const auto& e = fg_.channel_edges()[edge];
    if (su_used_[e.su] || channel_used_[e.channel]) return false;
    double delta = -inst_.priority(e.su);
    for (auto f : fg_.su_active_edges(e.su)) {
      const auto& ae = fg_.active_edges()[f];
      delta += ae.gain * (2.0 * load_[ae.pu] + ae.gain) / inst_.threshold(ae.pu);
    }
    return delta < 0.0 && try_add(edge);
  }

  bool try_add(std::size_t edge) {
    const auto& e = fg_.channel_edges()[edge];
    if (su_used_[e.su] || channel_used_[e.channel]) return false;
    if (model_ == Model::A) {
      for (auto f : fg_.su_active_edges(e.su)) {
        const auto& ae = fg_.active_edges()[f];
        if (!within_budget(load_[ae.pu] + ae.gain, inst_.threshold(ae.pu))) return false;
      }
    }
    for (auto f : fg_.su_active_edges(e.su)) {
      const auto& ae = fg_.active_edges()[f];
      load_[ae.pu] += ae.gain;
    }
    su_used_[e.su] = 1;
    channel_used_[e.channel] = 1;
    assign_.set(inst_, e.su, e.channel, true);
    return true;
  }

  Assignment take() { return std::move(assign_); }

private:
  const FactorGraph& fg_;
  const ProblemInstance& inst_;
  Model model_;
  Assignment assign_;
  std::vector<std::uint8_t> su_used_;
  std::vector<std::uint8_t> channel_used_;
  std::vector<double> load_;
};

}  // namespace

Assignment round_to_assignment(const Beliefs& beliefs, const FactorGraph& fg, const ProblemInstance& inst,
                               Model model, const BpConfig& cfg) {
  const auto& edges = fg.channel_edges();
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  const auto& odds = beliefs.link_log_odds;
  std::stable_sort(order.begin(), order.end(),
                   [&odds](std::size_t x, std::size_t y) { return sortable(odds[x]) > sortable(odds[y]); });

  Builder builder(fg, inst, model);
  for (auto id : order) {
    const bool gate = cfg.rounding_gate == RoundingGate::link ? odds[id] > 0.0
                                                              : beliefs.su_log_odds[edges[id].su] > 0.0;
    if (gate) builder.try_add(id);
  }

  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const double cx = inst.priority(edges[x].su), cy = inst.priority(edges[y].su);
    if (cx != cy) return cx > cy;
    return sortable(odds[x]) > sortable(odds[y]);
  });
  for (auto id : order) {
    if (model == Model::A) {
      builder.try_add(id);
    } else {
      builder.try_add_if_cheaper(id);
    }
  }
  return builder.take();
}

}  // namespace crn

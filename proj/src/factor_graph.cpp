#include "crn/factor_graph.hpp"

#include <algorithm>
#include <numeric>

namespace crn {

FactorGraph::FactorGraph(const ProblemInstance& inst)
    : su_channel_(inst.n_su()),
      su_active_(inst.n_su()),
      channel_su_(inst.n_free()),
      pu_su_(inst.n_active()) {
  for (std::size_t i = 0; i < inst.n_su(); ++i) {
    for (std::size_t a = 0; a < inst.n_free(); ++a) {
      if (!inst.accessible(i, a)) continue;
      const auto id = channel_edges_.size();
      channel_edges_.push_back({i, a});
      su_channel_[i].push_back(id);
      channel_su_[a].push_back(id);
    }
    for (std::size_t b = 0; b < inst.n_active(); ++b) {
      const double g = inst.interference(i, b);
      if (!(g > 0.0)) continue;
      const auto id = active_edges_.size();
      active_edges_.push_back({i, b, g});
      su_active_[i].push_back(id);
      pu_su_[b].push_back(id);
    }
  }
}

std::vector<std::size_t> FactorGraph::channels_of(std::size_t i) const {
  std::vector<std::size_t> out;
  for (auto e : su_channel_[i]) out.push_back(channel_edges_[e].channel);
  return out;
}

std::vector<std::size_t> FactorGraph::active_pus_of(std::size_t i) const {
  std::vector<std::size_t> out;
  for (auto e : su_active_[i]) out.push_back(active_edges_[e].pu);
  return out;
}

std::vector<std::size_t> FactorGraph::sus_of_channel(std::size_t a) const {
  std::vector<std::size_t> out;
  for (auto e : channel_su_[a]) out.push_back(channel_edges_[e].su);
  return out;
}

std::vector<std::size_t> FactorGraph::sus_of_active_pu(std::size_t b) const {
  std::vector<std::size_t> out;
  for (auto e : pu_su_[b]) out.push_back(active_edges_[e].su);
  return out;
}

namespace {

template <typename Lists>
void accumulate_degrees(const Lists& lists, std::size_t& max_deg, double& mean_deg) {
  std::size_t total = 0;
  for (const auto& l : lists) {
    max_deg = std::max(max_deg, l.size());
    total += l.size();
  }
  mean_deg = lists.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(lists.size());
}

}  // namespace

DegreeStats degree_stats(const FactorGraph& fg) {
  DegreeStats s;
  std::vector<std::size_t> su_deg(fg.n_su());
  for (std::size_t i = 0; i < fg.n_su(); ++i)
    su_deg[i] = fg.su_channel_edges(i).size() + fg.su_active_edges(i).size();
  for (auto d : su_deg) s.max_su_degree = std::max(s.max_su_degree, d);
  s.mean_su_degree = su_deg.empty() ? 0.0
                                    : static_cast<double>(std::accumulate(su_deg.begin(), su_deg.end(), 0ul)) /
                                          static_cast<double>(su_deg.size());

  std::vector<std::vector<std::size_t>> channel(fg.n_free()), active(fg.n_active());
  for (std::size_t a = 0; a < fg.n_free(); ++a) channel[a] = fg.channel_su_edges(a);
  for (std::size_t b = 0; b < fg.n_active(); ++b) active[b] = fg.pu_su_edges(b);
  accumulate_degrees(channel, s.max_channel_degree, s.mean_channel_degree);
  accumulate_degrees(active, s.max_active_degree, s.mean_active_degree);
  return s;
}

bool is_acyclic(const FactorGraph& fg) {
  // Union-find over SUs, then channels, then active PUs.
  const std::size_t n = fg.n_su() + fg.n_free() + fg.n_active();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto unite = [&](std::size_t x, std::size_t y) {
    const auto rx = find(x), ry = find(y);
    if (rx == ry) return false;
    parent[rx] = ry;
    return true;
  };
  for (const auto& e : fg.channel_edges())
    if (!unite(e.su, fg.n_su() + e.channel)) return false;
  for (const auto& e : fg.active_edges())
    if (!unite(e.su, fg.n_su() + fg.n_free() + e.pu)) return false;
  return true;
}

}  // namespace crn

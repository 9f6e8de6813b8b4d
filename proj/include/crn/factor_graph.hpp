#pragma once

#include <cstddef>
#include <vector>

#include "crn/model.hpp"

namespace crn {

/// SU <-> free-channel edge (I(i,a) = 1).
struct ChannelEdge {
  std::size_t su;
  std::size_t channel;
};

/// SU <-> active-PU edge (G(i,b) > 0).
struct ActiveEdge {
  std::size_t su;
  std::size_t pu;
  double gain;
};

/// Bipartite factor graph with dense edge ids. Channel edges are ordered by
/// (su, channel), active edges by (su, pu); every adjacency list is ascending
/// in the neighbour index.
class FactorGraph {
public:
  explicit FactorGraph(const ProblemInstance& inst);

  std::size_t n_su() const { return su_channel_.size(); }
  std::size_t n_free() const { return channel_su_.size(); }
  std::size_t n_active() const { return pu_su_.size(); }

  const std::vector<ChannelEdge>& channel_edges() const { return channel_edges_; }
  const std::vector<ActiveEdge>& active_edges() const { return active_edges_; }

  /// Channel-edge ids incident to SU i.
  const std::vector<std::size_t>& su_channel_edges(std::size_t i) const { return su_channel_[i]; }
  /// Active-edge ids incident to SU i.
  const std::vector<std::size_t>& su_active_edges(std::size_t i) const { return su_active_[i]; }
  /// Channel-edge ids incident to free channel a.
  const std::vector<std::size_t>& channel_su_edges(std::size_t a) const { return channel_su_[a]; }
  /// Active-edge ids incident to active PU b.
  const std::vector<std::size_t>& pu_su_edges(std::size_t b) const { return pu_su_[b]; }

  std::vector<std::size_t> channels_of(std::size_t i) const;
  std::vector<std::size_t> active_pus_of(std::size_t i) const;
  std::vector<std::size_t> sus_of_channel(std::size_t a) const;
  std::vector<std::size_t> sus_of_active_pu(std::size_t b) const;

  std::size_t edge_count() const { return channel_edges_.size() + active_edges_.size(); }

private:
  std::vector<ChannelEdge> channel_edges_;
  std::vector<ActiveEdge> active_edges_;
  std::vector<std::vector<std::size_t>> su_channel_;
  std::vector<std::vector<std::size_t>> su_active_;
  std::vector<std::vector<std::size_t>> channel_su_;
  std::vector<std::vector<std::size_t>> pu_su_;
};

inline FactorGraph build_factor_graph(const ProblemInstance& inst) { return FactorGraph(inst); }

struct DegreeStats {
  std::size_t max_su_degree = 0;
  double mean_su_degree = 0.0;
  std::size_t max_channel_degree = 0;
  double mean_channel_degree = 0.0;
  std::size_t max_active_degree = 0;
  double mean_active_degree = 0.0;  // K
};

DegreeStats degree_stats(const FactorGraph& fg);

/// True iff the undirected graph SUs vs (channels ∪ active PUs) has no cycle.
bool is_acyclic(const FactorGraph& fg);

}  // namespace crn

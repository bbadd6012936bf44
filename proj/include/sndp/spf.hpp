#pragma once

// Shortest-path forest rooted at a source set, built from the APSP state
// already held by every node.
//
// Each node picks its nearest source locally from its distance row, ties
// broken by hop count and then by the smaller source id, and takes the first
// hop of its routing table towards that source as parent. One round of child
// notifications registers children at the parents.

#include <tuple>
#include <vector>

#include "sndp/congest.hpp"
#include "sndp/node_state.hpp"

namespace sndp {

struct ShortestPathForest {
  std::vector<NodeIndex> source_of;
  std::vector<NodeIndex> parent_of;  // kNoNode for sources
  std::vector<std::vector<NodeIndex>> children_of;
  std::vector<EdgeKey> tree_edges;  // sorted
};

namespace detail {

inline NodeIndex nearest_source(const NodeState& st) {
  NodeIndex best = kNoNode;
  for (NodeIndex z = 0; z < st.n; ++z) {
    if (!st.is_source[z] || st.dist_row[z].is_inf()) continue;
    if (best == kNoNode || std::tie(st.dist_row[z], z) < std::tie(st.dist_row[best], best))
      best = z;
  }
  return best;
}

}  // namespace detail

// `sources` is public knowledge (derived from the broadcast requirements).
inline std::pair<ShortestPathForest, RoundStats> build_spf(Network<NodeState>& net,
                                                           const std::vector<bool>& sources) {
  const auto n = net.size();
  if (sources.size() != n) throw Error("source mask has the wrong size");
  const RoundStats mark = net.stats();

  net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope>) {
    st.is_source = sources;
    st.children.clear();
    st.source = detail::nearest_source(st);
    if (st.source == kNoNode) throw UnreachableSource(self);
    st.parent = st.source == self ? kNoNode : st.next_hop[st.source];
  });

  net.run_round([&](NodeIndex, NodeState& st, std::span<const Envelope>, Outbox& out) {
    if (st.parent != kNoNode) {
      BitString child;
      child.push_bit(true);
      out.send(st.parent, child);
    }
  });
  net.local_step([&](NodeIndex, NodeState& st, std::span<const Envelope> inbox) {
    for (const auto& env : inbox) st.children.push_back(env.from);
  });

  ShortestPathForest f;
  f.source_of.resize(n);
  f.parent_of.resize(n);
  f.children_of.resize(n);
  for (NodeIndex v = 0; v < n; ++v) {
    const auto& st = net.state(v);
    f.source_of[v] = st.source;
    f.parent_of[v] = st.parent;
    f.children_of[v] = st.children;
    if (st.parent != kNoNode) f.tree_edges.push_back(edge_key(v, st.parent));
  }
  std::sort(f.tree_edges.begin(), f.tree_edges.end());
  return {std::move(f), net.stats_since(mark)};
}

}  // namespace sndp

#pragma once

// Local memory of one simulated processor in the SNDP pipeline, and the
// initial distribution of an instance over the network.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "sndp/bits.hpp"
#include "sndp/congest.hpp"
#include "sndp/graph.hpp"
#include "sndp/tropical.hpp"

namespace sndp {

struct LocalEdge {
  NodeIndex neighbor;
  Weight weight;
};

enum class EdgeClass { kTree, kIntra, kInter };

inline const char* to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::kTree: return "tree";
    case EdgeClass::kIntra: return "intra";
    case EdgeClass::kInter: return "inter";
  }
  return "?";
}

// An edge of the weight-modified MST as known network-wide.
struct MstEdge {
  NodeIndex u;  // u < v
  NodeIndex v;
  std::int64_t modified_weight;

  friend bool operator==(const MstEdge&, const MstEdge&) = default;
};

// One edge of the current solution as known to a node.
struct KnownSolutionEdge {
  std::uint32_t copies = 0;
  Weight weight = 0;
};

using EdgeKey = std::pair<NodeIndex, NodeIndex>;  // (min, max)

inline EdgeKey edge_key(NodeIndex a, NodeIndex b) { return {std::min(a, b), std::max(a, b)}; }

struct NodeState {
  // Initial knowledge: own id, n, incident edges with weights, own r_v and
  // the public weight bound M.
  NodeIndex id = 0;
  std::size_t n = 0;
  std::vector<LocalEdge> incident;  // sorted by neighbor id
  Requirement requirement = 0;
  Weight max_weight = kDefaultMaxWeight;

  // APSP: own distance row, routing table R_v, and the full matrix as
  // received in the last row exchange.
  std::vector<PathCost> dist_row;
  std::vector<NodeIndex> next_hop;
  Matrix<PathCost> dist_all;

  // Connectivity levels (after the requirement broadcast).
  std::vector<Requirement> all_requirements;
  std::vector<Requirement> levels;

  // Current iteration: shortest-path forest.
  std::vector<bool> is_source;
  NodeIndex source = kNoNode;
  NodeIndex parent = kNoNode;
  std::vector<NodeIndex> children;

  // Current iteration: classification and modified weights, aligned with
  // `incident`. kIntra edges carry an infinite modified weight.
  std::vector<NodeIndex> neighbor_source;
  std::vector<EdgeClass> edge_class;
  std::vector<Dist> modified_weight;

  // Current iteration: MST as known to this node (global after Borůvka).
  std::vector<NodeIndex> component;
  std::vector<MstEdge> mst_edges;
  NodeIndex mst_parent = kNoNode;

  // Current iteration: pruning.
  std::vector<NodeIndex> mst_parent_of;  // reconstructed from broadcasts
  std::vector<bool> pruned;
  std::vector<NodeIndex> steiner_neighbors;

  // Solution as known to this node.
  std::map<EdgeKey, KnownSolutionEdge> solution;

  bool halted = false;

  Weight incident_weight(NodeIndex nb) const {
    for (const auto& e : incident)
      if (e.neighbor == nb) return e.weight;
    throw Error("not a neighbor");
  }
  std::optional<std::size_t> incident_slot(NodeIndex nb) const {
    for (std::size_t i = 0; i < incident.size(); ++i)
      if (incident[i].neighbor == nb) return i;
    return std::nullopt;
  }
};

inline Network<NodeState> init_network(const Instance& inst, EngineConfig cfg = {}) {
  std::vector<NodeState> states(inst.node_count());
  for (NodeIndex v = 0; v < inst.node_count(); ++v) {
    auto& s = states[v];
    s.id = v;
    s.n = inst.node_count();
    s.requirement = inst.requirement(v);
    s.max_weight = inst.max_weight();
    for (const auto& inc : inst.incident(v))
      s.incident.push_back({inc.neighbor, inst.edge(inc.edge).w});
  }
  return Network<NodeState>(std::move(states), cfg);
}

// Fixed-width encoding of path costs. Lengths are bounded by (n-1) * M and
// hop counts by n-1; one leading flag bit marks finite entries.
struct PathCostCodec {
  unsigned length_bits;
  unsigned hop_bits;

  static PathCostCodec for_network(std::size_t n, Weight max_weight) {
    const auto span = static_cast<std::uint64_t>(n > 0 ? n - 1 : 0);
    return {bits_for(span * static_cast<std::uint64_t>(max_weight)), bits_for(span)};
  }
  unsigned entry_bits() const { return 1 + length_bits + hop_bits; }

  void put(BitString& s, const PathCost& c) const {
    s.push_bit(!c.is_inf());
    s.push(c.is_inf() ? 0 : static_cast<std::uint64_t>(c.length.value()), length_bits);
    s.push(c.is_inf() ? 0 : c.hops, hop_bits);
  }
  PathCost get(BitReader& r) const {
    const bool finite = r.take_bit();
    const auto len = r.take(length_bits);
    const auto hops = r.take(hop_bits);
    if (!finite) return PathCost::infinity();
    return {Dist(static_cast<std::int64_t>(len)), static_cast<std::uint32_t>(hops)};
  }
};

// Reference program: every node streams all of its incident edges to every
// other node (degree field followed by (neighbor, weight) records), after
// which each node knows the whole graph. The layout is sized for degree
// n-1, so the round count depends only on n, M and b.
struct NaiveKnowledge {
  std::vector<Edge> edges;  // as reconstructed by node 0
  RoundStats stats;
  bool all_nodes_agree = false;
};

inline NaiveKnowledge naive_dissemination(Network<NodeState>& net) {
  const auto n = net.size();
  const unsigned idb = id_bits(n);
  const unsigned degb = bits_for(n - 1);
  const unsigned wb = bits_for(static_cast<std::uint64_t>(net.state(0).max_weight));
  const std::uint64_t layout_bits = degb + static_cast<std::uint64_t>(n - 1) * (idb + wb);
  const auto rounds = n == 1 ? 0 : ceil_div(layout_bits, net.bandwidth());

  std::vector<std::vector<Edge>> known(n);
  auto stats = exchange(
      net, rounds,
      [&](NodeIndex self, const NodeState& st) {
        BitString p;
        p.push(st.incident.size(), degb);
        for (const auto& e : st.incident) {
          p.push(e.neighbor, idb);
          p.push(static_cast<std::uint64_t>(e.weight), wb);
        }
        std::vector<std::pair<NodeIndex, BitString>> out;
        for (NodeIndex to = 0; to < n; ++to)
          if (to != self) out.emplace_back(to, p);
        return out;
      },
      [&](NodeIndex self, NodeState&, NodeIndex from, const BitString& p) {
        BitReader r(p);
        const auto deg = r.take(degb);
        for (std::uint64_t i = 0; i < deg; ++i) {
          const auto nb = static_cast<NodeIndex>(r.take(idb));
          const auto w = static_cast<Weight>(r.take(wb));
          if (from < nb) known[self].push_back({from, nb, w});
        }
      });
  for (NodeIndex v = 0; v < n; ++v)
    for (const auto& e : net.state(v).incident)
      if (v < e.neighbor) known[v].push_back({v, e.neighbor, e.weight});
  for (auto& k : known)
    std::sort(k.begin(), k.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.u, a.v) < std::pair(b.u, b.v);
    });
  NaiveKnowledge out;
  out.edges = known[0];
  out.stats = stats;
  out.all_nodes_agree = std::all_of(known.begin(), known.end(),
                                    [&](const auto& k) { return k == known[0]; });
  return out;
}

}  // namespace sndp

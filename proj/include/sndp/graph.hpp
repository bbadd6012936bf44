#pragma once

// Instances, solution multigraphs and feasibility checks.
//
// Node ids are 0-based inside the library (0..n-1). The text format and the
// JSON reports use 1-based ids; conversion happens only at those boundaries.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sndp/errors.hpp"

namespace sndp {

using NodeId = std::uint32_t;
using Weight = std::int64_t;
using Requirement = std::uint32_t;

inline constexpr Weight kDefaultMaxWeight = Weight{1} << 20;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  Weight w = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Unvalidated input as read from a file or built by hand.
struct RawInstance {
  std::size_t n = 0;
  std::vector<Edge> edges;
  std::vector<std::int64_t> r;  // r[v] for v in 0..n-1
};

// Unordered pair of distinct nodes, stored with u < v.
struct NodePair {
  NodeId u;
  NodeId v;

  NodePair(NodeId a, NodeId b) : u(std::min(a, b)), v(std::max(a, b)) {
    if (a == b) throw Error("NodePair requires distinct endpoints");
  }
  friend bool operator==(const NodePair&, const NodePair&) = default;
};

struct Incidence {
  NodeId neighbor;
  std::size_t edge;
};

class Instance;
Instance validate_instance(const RawInstance& raw,
                           Weight max_weight = kDefaultMaxWeight);

// A validated SNDP instance. Edges are canonical (u < v) and sorted by
// (u, v), so an edge index is a stable identifier for the lifetime of the
// instance. Immutable after construction.
class Instance {
 public:
  std::size_t node_count() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::span<const Edge> edges() const noexcept { return edges_; }
  const Edge& edge(std::size_t i) const { return edges_.at(i); }
  Requirement requirement(NodeId v) const { return r_.at(v); }
  std::span<const Requirement> requirements() const noexcept { return r_; }
  Weight max_weight() const noexcept { return max_weight_; }
  std::span<const Incidence> incident(NodeId v) const { return adj_.at(v); }

  std::optional<std::size_t> edge_index(NodeId a, NodeId b) const {
    if (a >= n_ || b >= n_ || a == b) return std::nullopt;
    const auto idx = index_[static_cast<std::size_t>(a) * n_ + b];
    if (idx < 0) return std::nullopt;
    return static_cast<std::size_t>(idx);
  }

  Requirement max_requirement() const {
    return r_.empty() ? 0 : *std::max_element(r_.begin(), r_.end());
  }

 private:
  friend Instance validate_instance(const RawInstance&, Weight);
  Instance() = default;

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<Requirement> r_;
  Weight max_weight_ = kDefaultMaxWeight;
  std::vector<std::vector<Incidence>> adj_;
  std::vector<std::int64_t> index_;  // n*n, -1 when absent
};

namespace detail {

// Connected-component label per node (label = smallest node id).
inline std::vector<NodeId> component_labels(
    std::size_t n, std::span<const Edge> edges) {
  std::vector<NodeId> parent(n);
  std::iota(parent.begin(), parent.end(), NodeId{0});
  auto find = [&](NodeId x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) {
    auto a = find(e.u), b = find(e.v);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<NodeId> label(n);
  for (NodeId v = 0; v < n; ++v) label[v] = find(v);
  return label;
}

}  // namespace detail

inline Instance validate_instance(const RawInstance& raw, Weight max_weight) {
  if (max_weight < 0) throw Error("weight bound must be non-negative");
  if (raw.r.size() != raw.n) {
    throw InstanceError(InstanceErrc::kNodeOutOfRange,
                        "requirement vector has " +
                            std::to_string(raw.r.size()) + " entries for " +
                            std::to_string(raw.n) + " nodes");
  }
  Instance inst;
  inst.n_ = raw.n;
  inst.max_weight_ = max_weight;
  inst.r_.reserve(raw.n);
  for (std::size_t v = 0; v < raw.n; ++v) {
    if (raw.r[v] < 0) {
      throw InstanceError(InstanceErrc::kNegativeRequirement,
                          "node " + std::to_string(v + 1));
    }
    if (raw.r[v] > std::numeric_limits<Requirement>::max()) {
      throw InstanceError(InstanceErrc::kNegativeRequirement,
                          "requirement out of range at node " +
                              std::to_string(v + 1));
    }
    inst.r_.push_back(static_cast<Requirement>(raw.r[v]));
  }

  std::vector<Edge> edges;
  edges.reserve(raw.edges.size());
  for (const auto& e : raw.edges) {
    const std::string where = "edge (" + std::to_string(e.u + 1) + "," +
                              std::to_string(e.v + 1) + ")";
    if (e.u >= raw.n || e.v >= raw.n)
      throw InstanceError(InstanceErrc::kNodeOutOfRange, where);
    if (e.u == e.v) throw InstanceError(InstanceErrc::kSelfLoop, where);
    if (e.w < 0) throw InstanceError(InstanceErrc::kNegativeWeight, where);
    if (e.w > max_weight)
      throw InstanceError(InstanceErrc::kWeightTooLarge, where);
    edges.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.w});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i].u == edges[i - 1].u && edges[i].v == edges[i - 1].v) {
      throw InstanceError(InstanceErrc::kDuplicateEdge,
                          "edge (" + std::to_string(edges[i].u + 1) + "," +
                              std::to_string(edges[i].v + 1) + ")");
    }
  }

  const auto label = detail::component_labels(raw.n, edges);
  std::optional<NodeId> required_component;
  for (NodeId v = 0; v < raw.n; ++v) {
    if (inst.r_[v] == 0) continue;
    if (!required_component) {
      required_component = label[v];
    } else if (label[v] != *required_component) {
      // Only an issue if some other required node pairs with v; with at
      // least two required nodes in different components the pair (u, v)
      // needs min(r_u, r_v) >= 1 paths and none exist.
      throw InstanceError(InstanceErrc::kRequirementUnsatisfiable,
                          "node " + std::to_string(v + 1) +
                              " is not connected to the other required nodes");
    }
  }

  inst.adj_.assign(raw.n, {});
  inst.index_.assign(raw.n * raw.n, -1);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    inst.adj_[e.u].push_back({e.v, i});
    inst.adj_[e.v].push_back({e.u, i});
    inst.index_[static_cast<std::size_t>(e.u) * raw.n + e.v] =
        static_cast<std::int64_t>(i);
    inst.index_[static_cast<std::size_t>(e.v) * raw.n + e.u] =
        static_cast<std::int64_t>(i);
  }
  for (auto& a : inst.adj_) {
    std::sort(a.begin(), a.end(), [](const Incidence& x, const Incidence& y) {
      return x.neighbor < y.neighbor;
    });
  }
  inst.edges_ = std::move(edges);
  return inst;
}

// Edge multiplicities x_e over the edges of one instance, indexed by the
// instance's edge index.
class Multigraph {
 public:
  Multigraph() = default;
  explicit Multigraph(const Instance& inst) : copies_(inst.edge_count(), 0) {}
  explicit Multigraph(std::vector<std::uint32_t> copies)
      : copies_(std::move(copies)) {}

  std::size_t size() const noexcept { return copies_.size(); }
  std::uint32_t copies(std::size_t e) const { return copies_.at(e); }
  void set(std::size_t e, std::uint32_t x) { copies_.at(e) = x; }
  void add(std::size_t e, std::uint32_t k) { copies_.at(e) += k; }
  void remove_one(std::size_t e) {
    if (copies_.at(e) == 0) throw Error("removing a copy from an absent edge");
    --copies_[e];
  }
  std::span<const std::uint32_t> multiplicities() const noexcept {
    return copies_;
  }
  std::uint64_t total_copies() const {
    return std::accumulate(copies_.begin(), copies_.end(), std::uint64_t{0});
  }

  friend bool operator==(const Multigraph&, const Multigraph&) = default;

 private:
  std::vector<std::uint32_t> copies_;
};

inline Weight solution_weight(const Multigraph& s, const Instance& inst) {
  if (s.size() != inst.edge_count())
    throw Error("multigraph does not belong to this instance");
  Weight total = 0;
  for (std::size_t e = 0; e < s.size(); ++e)
    total += static_cast<Weight>(s.copies(e)) * inst.edge(e).w;
  return total;
}

namespace detail {

// Undirected capacity network on n nodes, capacity matrix plus adjacency.
struct FlowNetwork {
  std::size_t n = 0;
  std::vector<std::int64_t> cap;
  std::vector<std::vector<NodeId>> nbrs;

  explicit FlowNetwork(std::size_t nodes) : n(nodes), cap(nodes * nodes, 0), nbrs(nodes) {}

  void add(NodeId a, NodeId b, std::int64_t x) {
    if (x == 0) return;
    if (cap[a * n + b] == 0 && cap[b * n + a] == 0) {
      nbrs[a].push_back(b);
      nbrs[b].push_back(a);
    }
    cap[a * n + b] += x;
    cap[b * n + a] += x;
  }
};

// Edmonds-Karp from s to t, stopping once `limit` units are routed.
inline std::uint64_t max_flow(const FlowNetwork& g, NodeId s, NodeId t,
                              std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()) {
  const auto n = g.n;
  auto cap = g.cap;
  std::uint64_t flow = 0;
  std::vector<NodeId> prev(n);
  while (flow < limit) {
    std::fill(prev.begin(), prev.end(), kNoNode);
    prev[s] = s;
    std::queue<NodeId> q;
    q.push(s);
    while (!q.empty() && prev[t] == kNoNode) {
      const NodeId a = q.front();
      q.pop();
      for (NodeId b : g.nbrs[a]) {
        if (prev[b] == kNoNode && cap[a * n + b] > 0) {
          prev[b] = a;
          q.push(b);
        }
      }
    }
    if (prev[t] == kNoNode) break;
    std::int64_t push = std::numeric_limits<std::int64_t>::max();
    for (NodeId b = t; b != s; b = prev[b]) push = std::min(push, cap[prev[b] * n + b]);
    for (NodeId b = t; b != s; b = prev[b]) {
      cap[prev[b] * n + b] -= push;
      cap[b * n + prev[b]] += push;
    }
    flow += static_cast<std::uint64_t>(push);
  }
  return flow;
}

// True iff every pair u, v has min(r_u, r_v) edge-disjoint paths.
inline bool requirements_met(const FlowNetwork& g, std::span<const Requirement> r) {
  const auto n = static_cast<NodeId>(g.n);
  for (NodeId u = 0; u < n; ++u) {
    if (r[u] == 0) continue;
    for (NodeId v = u + 1; v < n; ++v) {
      const auto need = std::min(r[u], r[v]);
      if (need != 0 && max_flow(g, u, v, need) < need) return false;
    }
  }
  return true;
}

}  // namespace detail

inline detail::FlowNetwork flow_network(const Multigraph& s, const Instance& inst) {
  if (s.size() != inst.edge_count())
    throw Error("multigraph does not belong to this instance");
  detail::FlowNetwork g(inst.node_count());
  for (std::size_t e = 0; e < s.size(); ++e) {
    const auto& ed = inst.edge(e);
    g.add(ed.u, ed.v, static_cast<std::int64_t>(s.copies(e)));
  }
  return g;
}

// Maximum number of pairwise edge-disjoint u-v paths, where an edge with
// multiplicity x contributes x parallel copies. Computed as an integer
// max-flow with capacity x_e in both directions (Menger).
inline std::uint64_t edge_disjoint_path_count(const Multigraph& s, const Instance& inst,
                                              NodePair p) {
  if (p.u >= inst.node_count() || p.v >= inst.node_count())
    throw Error("pair outside the instance");
  return detail::max_flow(flow_network(s, inst), p.u, p.v);
}

inline bool verify_sndp_feasible(const Multigraph& s, const Instance& inst) {
  return detail::requirements_met(flow_network(s, inst), inst.requirements());
}

}  // namespace sndp

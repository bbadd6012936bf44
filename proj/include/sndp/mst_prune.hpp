#pragma once

// Weight modification relative to a shortest-path forest, a Borůvka MST on
// the modified weights, and pruning of non-source leaves.
//
// Modified weights: forest edges get 0, edges inside one tree are dropped,
// and an edge (u, v) between trees gets d(u, s(u)) + W(u, v) + d(v, s(v)).
// The pruned MST realizes a minimum spanning tree of the sources in the
// complete distance graph.

#include <algorithm>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "sndp/congest.hpp"
#include "sndp/node_state.hpp"
#include "sndp/spf.hpp"

namespace sndp {

struct ClassifiedEdge {
  NodeIndex u;  // u < v
  NodeIndex v;
  Weight w;
  EdgeClass cls;
  Dist modified;  // infinite for intra-tree edges
};

struct ModifiedWeights {
  std::vector<ClassifiedEdge> edges;  // sorted by (u, v)
};

// One round: every node tells its neighbours which source it belongs to.
// Classification and W' are then computed locally at both endpoints; the
// remote distance d(v, s(v)) is read from the distance matrix every node
// holds after APSP.
inline std::pair<ModifiedWeights, RoundStats> classify_and_modify(Network<NodeState>& net) {
  const auto n = net.size();
  const unsigned idb = id_bits(n);
  const RoundStats mark = net.stats();

  net.run_round([&](NodeIndex, NodeState& st, std::span<const Envelope>, Outbox& out) {
    BitString msg;
    msg.push(st.source, idb);
    for (const auto& e : st.incident) out.send(e.neighbor, msg);
  });
  net.local_step([&](NodeIndex, NodeState& st, std::span<const Envelope> inbox) {
    const auto deg = st.incident.size();
    st.neighbor_source.assign(deg, kNoNode);
    st.edge_class.assign(deg, EdgeClass::kIntra);
    st.modified_weight.assign(deg, Dist::infinity());
    for (const auto& env : inbox) {
      BitReader r(env.payload);
      st.neighbor_source[*st.incident_slot(env.from)] = static_cast<NodeIndex>(r.take(idb));
    }
    const Dist own = st.dist_row[st.source].length;
    for (std::size_t i = 0; i < deg; ++i) {
      const auto nb = st.incident[i].neighbor;
      const auto ns = st.neighbor_source[i];
      const bool forest = nb == st.parent ||
                          std::find(st.children.begin(), st.children.end(), nb) != st.children.end();
      if (forest) {
        st.edge_class[i] = EdgeClass::kTree;
        st.modified_weight[i] = Dist(0);
      } else if (ns != st.source) {
        st.edge_class[i] = EdgeClass::kInter;
        st.modified_weight[i] = own + Dist(st.incident[i].weight) + st.dist_all(nb, ns).length;
      }
    }
  });

  ModifiedWeights mw;
  for (NodeIndex v = 0; v < n; ++v) {
    const auto& st = net.state(v);
    for (std::size_t i = 0; i < st.incident.size(); ++i) {
      if (v < st.incident[i].neighbor)
        mw.edges.push_back({v, st.incident[i].neighbor, st.incident[i].weight, st.edge_class[i],
                            st.modified_weight[i]});
    }
  }
  return {std::move(mw), net.stats_since(mark)};
}

struct MstResult {
  std::vector<MstEdge> edges;  // sorted by (u, v)
  RoundStats stats;
  std::size_t phases = 0;
  bool mst_substituted = true;  // Borůvka in place of a constant-round MST
};

namespace detail {

inline auto mst_order(const MstEdge& e) { return std::tuple(e.modified_weight, e.u, e.v); }

// Roots the spanning tree at `root` and returns the parent of every node.
inline std::vector<NodeIndex> root_tree(std::size_t n, const std::vector<MstEdge>& edges,
                                        NodeIndex root) {
  std::vector<std::vector<NodeIndex>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<NodeIndex> parent(n, kNoNode);
  std::vector<bool> seen(n, false);
  std::queue<NodeIndex> q;
  q.push(root);
  seen[root] = true;
  while (!q.empty()) {
    const auto a = q.front();
    q.pop();
    for (auto b : adj[a]) {
      if (!seen[b]) {
        seen[b] = true;
        parent[b] = a;
        q.push(b);
      }
    }
  }
  return parent;
}

inline NodeIndex tree_root(const NodeState& st) {
  for (NodeIndex z = 0; z < st.n; ++z)
    if (st.is_source[z]) return z;
  return 0;
}

}  // namespace detail

// Borůvka phases. In each phase every node broadcasts its lightest edge
// (under (W', min id, max id)) leaving its current fragment; every node then
// merges fragments locally, so fragment labels and the growing edge set are
// known network-wide. Intra-tree edges never take part.
inline MstResult distributed_mst(Network<NodeState>& net) {
  const auto n = net.size();
  const unsigned idb = id_bits(n);
  const auto max_modified =
      static_cast<std::uint64_t>(2 * n - 1) * static_cast<std::uint64_t>(net.state(0).max_weight);
  const unsigned wb = bits_for(max_modified);
  const auto rounds = ceil_div(idb + wb, net.bandwidth());
  const RoundStats mark = net.stats();

  net.local_step([&](NodeIndex, NodeState& st, std::span<const Envelope>) {
    st.component.resize(n);
    for (NodeIndex v = 0; v < n; ++v) st.component[v] = v;
    st.mst_edges.clear();
  });

  std::size_t phases = 0;
  auto fragments = [&] {
    const auto& c = net.state(0).component;
    std::size_t count = 0;
    for (NodeIndex v = 0; v < n; ++v) count += c[v] == v;
    return count;
  };
  while (fragments() > 1) {
    std::vector<std::vector<MstEdge>> heard(n);
    exchange(
        net, rounds,
        [&](NodeIndex self, const NodeState& st) {
          std::vector<std::pair<NodeIndex, BitString>> out;
          std::optional<MstEdge> best;
          for (std::size_t i = 0; i < st.incident.size(); ++i) {
            const auto nb = st.incident[i].neighbor;
            if (st.edge_class[i] == EdgeClass::kIntra || st.component[nb] == st.component[self])
              continue;
            const MstEdge cand{std::min(self, nb), std::max(self, nb), st.modified_weight[i].value()};
            if (!best || detail::mst_order(cand) < detail::mst_order(*best)) best = cand;
          }
          if (!best) return out;
          BitString p;
          p.push(best->u == self ? best->v : best->u, idb);
          p.push(static_cast<std::uint64_t>(best->modified_weight), wb);
          for (NodeIndex to = 0; to < n; ++to) out.emplace_back(to, p);
          return out;
        },
        [&](NodeIndex self, NodeState&, NodeIndex from, const BitString& p) {
          BitReader r(p);
          const auto nb = static_cast<NodeIndex>(r.take(idb));
          const auto w = static_cast<std::int64_t>(r.take(wb));
          heard[self].push_back({std::min(from, nb), std::max(from, nb), w});
        });
    ++phases;

    net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope>) {
      // Lightest candidate per fragment, then merge along all of them.
      std::vector<const MstEdge*> best(n, nullptr);
      for (const auto& e : heard[self]) {
        if (st.component[e.u] == st.component[e.v]) continue;
        for (auto frag : {st.component[e.u], st.component[e.v]})
          if (!best[frag] || detail::mst_order(e) < detail::mst_order(*best[frag])) best[frag] = &e;
      }
      std::vector<MstEdge> added;
      for (const auto* e : best)
        if (e) added.push_back(*e);
      std::sort(added.begin(), added.end(), [](const MstEdge& a, const MstEdge& b) {
        return detail::mst_order(a) < detail::mst_order(b);
      });
      added.erase(std::unique(added.begin(), added.end()), added.end());
      for (const auto& e : added) {
        const auto a = st.component[e.u], b = st.component[e.v];
        if (a == b) throw InvariantViolation("Borůvka merge closed a cycle");
        const auto lo = std::min(a, b), hi = std::max(a, b);
        for (auto& c : st.component)
          if (c == hi) c = lo;
        st.mst_edges.push_back(e);
      }
    });
    if (std::all_of(heard.begin(), heard.end(), [](const auto& h) { return h.empty(); }))
      throw DisconnectedUnderFiniteWeights("modified-weight graph has fragments with no finite outgoing edge");
  }

  net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope>) {
    std::sort(st.mst_edges.begin(), st.mst_edges.end(),
              [](const MstEdge& a, const MstEdge& b) { return std::pair(a.u, a.v) < std::pair(b.u, b.v); });
    st.mst_parent = detail::root_tree(n, st.mst_edges, detail::tree_root(st))[self];
  });

  MstResult out;
  out.edges = net.state(0).mst_edges;
  for (NodeIndex v = 1; v < n; ++v)
    if (!(net.state(v).mst_edges == out.edges))
      throw InvariantViolation("nodes disagree on the MST");
  out.stats = net.stats_since(mark);
  out.phases = phases;
  return out;
}

struct SteinerTree {
  std::vector<EdgeKey> edges;  // sorted
  std::vector<bool> kept;      // nodes left after pruning
};

// Round 1: every non-root node broadcasts its MST parent, so every node
// knows the whole tree and removes non-source leaves locally until all
// leaves are sources. Round 2: pruned nodes tell their MST neighbours.
inline std::pair<SteinerTree, RoundStats> prune(Network<NodeState>& net) {
  const auto n = net.size();
  const unsigned idb = id_bits(n);
  const RoundStats mark = net.stats();

  net.run_round([&](NodeIndex, NodeState& st, std::span<const Envelope>, Outbox& out) {
    if (st.mst_parent == kNoNode) return;
    BitString msg;
    msg.push(st.mst_parent, idb);
    out.broadcast(msg);
  });

  auto mst_neighbors = [](const NodeState& st, NodeIndex self) {
    std::vector<NodeIndex> nb;
    for (NodeIndex v = 0; v < st.n; ++v)
      if (st.mst_parent_of[v] == self || (st.mst_parent_of[self] == v)) nb.push_back(v);
    return nb;
  };

  net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope> inbox) {
    st.mst_parent_of.assign(n, kNoNode);
    st.mst_parent_of[self] = st.mst_parent;
    for (const auto& env : inbox) {
      BitReader r(env.payload);
      st.mst_parent_of[env.from] = static_cast<NodeIndex>(r.take(idb));
    }
    std::vector<std::uint32_t> degree(n, 0);
    for (NodeIndex v = 0; v < n; ++v) {
      if (st.mst_parent_of[v] == kNoNode) continue;
      ++degree[v];
      ++degree[st.mst_parent_of[v]];
    }
    st.pruned.assign(n, false);
    std::queue<NodeIndex> leaves;
    for (NodeIndex v = 0; v < n; ++v)
      if (degree[v] <= 1 && !st.is_source[v]) leaves.push(v);
    while (!leaves.empty()) {
      const auto v = leaves.front();
      leaves.pop();
      if (st.pruned[v]) continue;
      st.pruned[v] = true;
      for (NodeIndex u = 0; u < n; ++u) {
        const bool adjacent = st.mst_parent_of[v] == u || st.mst_parent_of[u] == v;
        if (!adjacent || st.pruned[u]) continue;
        if (--degree[u] <= 1 && !st.is_source[u]) leaves.push(u);
      }
    }
  });

  net.run_round([&](NodeIndex self, NodeState& st, std::span<const Envelope>, Outbox& out) {
    if (!st.pruned[self]) return;
    BitString gone;
    gone.push_bit(true);
    for (auto nb : mst_neighbors(st, self)) out.send(nb, gone);
  });
  net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope> inbox) {
    st.steiner_neighbors.clear();
    if (st.pruned[self]) return;
    for (auto nb : mst_neighbors(st, self)) {
      const bool gone = std::any_of(inbox.begin(), inbox.end(),
                                    [&](const Envelope& e) { return e.from == nb; });
      if (!gone) st.steiner_neighbors.push_back(nb);
    }
  });

  SteinerTree t;
  t.kept.resize(n);
  for (NodeIndex v = 0; v < n; ++v) {
    const auto& st = net.state(v);
    t.kept[v] = !st.pruned[v];
    for (auto nb : st.steiner_neighbors)
      if (v < nb) t.edges.push_back({v, nb});
  }
  std::sort(t.edges.begin(), t.edges.end());
  return {std::move(t), net.stats_since(mark)};
}

}  // namespace sndp

#pragma once

// Distributed all-pairs shortest paths by repeated min-plus squaring, plus
// routing tables from one witnessed product.
//
// Node j owns row j of every matrix. A product step ships every row to
// every node in ceil(row_bits / B) rounds, after which each node computes its
// own row of the product locally. ceil(log2 n) squarings of the adjacency
// matrix give the distances; the routing table is the witness row of
// (adjacency without diagonal) * D, i.e. the smallest-id neighbour that
// starts a shortest path.

#include <cstdint>
#include <utility>
#include <vector>

#include "sndp/congest.hpp"
#include "sndp/node_state.hpp"
#include "sndp/tropical.hpp"

namespace sndp {

using DistanceMatrix = Matrix<Dist>;
using RoutingTables = Matrix<NodeIndex>;  // row v is R_v; kNoNode when undefined

struct ApspResult {
  DistanceMatrix dist;
  RoutingTables routes;
  RoundStats stats;
  std::size_t squarings = 0;
};

namespace detail {

// Every node sends its current distance row to every other node; on return
// each node's dist_all holds the full matrix.
inline RoundStats exchange_rows(Network<NodeState>& net, const PathCostCodec& codec) {
  const auto n = net.size();
  const auto rounds = n == 1 ? 0 : ceil_div(n * codec.entry_bits(), net.bandwidth());
  auto stats = exchange(
      net, rounds,
      [&](NodeIndex self, const NodeState& st) {
        BitString p;
        for (const auto& c : st.dist_row) codec.put(p, c);
        std::vector<std::pair<NodeIndex, BitString>> out;
        for (NodeIndex to = 0; to < n; ++to)
          if (to != self) out.emplace_back(to, p);
        return out;
      },
      [&](NodeIndex, NodeState& st, NodeIndex from, const BitString& p) {
        BitReader r(p);
        auto row = st.dist_all.row(from);
        for (std::size_t j = 0; j < n; ++j) row[j] = codec.get(r);
      });
  net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope>) {
    auto own = st.dist_all.row(self);
    std::copy(st.dist_row.begin(), st.dist_row.end(), own.begin());
  });
  return stats;
}

inline std::vector<PathCost> adjacency_row(const NodeState& st, bool with_diagonal) {
  std::vector<PathCost> row(st.n, PathCost::infinity());
  if (with_diagonal) row[st.id] = PathCost::zero();
  for (const auto& e : st.incident) row[e.neighbor] = PathCost::edge(e.weight);
  return row;
}

}  // namespace detail

inline ApspResult apsp_with_routing(Network<NodeState>& net) {
  const auto n = net.size();
  const RoundStats mark = net.stats();
  const auto codec = PathCostCodec::for_network(n, net.state(0).max_weight);

  net.local_step([&](NodeIndex, NodeState& st, std::span<const Envelope>) {
    st.dist_row = detail::adjacency_row(st, true);
    st.dist_all = Matrix<PathCost>(n, PathCost::infinity());
  });

  const auto squarings = ceil_log2(n);
  for (unsigned t = 0; t < squarings; ++t) {
    detail::exchange_rows(net, codec);
    net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope>) {
      std::vector<PathCost> next(n);
      minplus_row<PathCost>(st.dist_all.row(self), st.dist_all, next);
      st.dist_row = std::move(next);
    });
  }

  // Final exchange so that every node holds D, then the witnessed product
  // for the routing row.
  detail::exchange_rows(net, codec);
  net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope>) {
    const auto adj = detail::adjacency_row(st, false);
    std::vector<PathCost> via(n);
    std::vector<std::uint32_t> witness(n);
    minplus_row<PathCost>(adj, st.dist_all, via, witness);
    st.next_hop.assign(n, kNoNode);
    for (NodeIndex u = 0; u < n; ++u) {
      if (u == self || st.dist_row[u].is_inf()) continue;
      if (via[u] != st.dist_row[u])
        throw InvariantViolation("routing product disagrees with distance row");
      st.next_hop[u] = witness[u];
    }
  });

  ApspResult out;
  out.dist = DistanceMatrix(n, Dist::infinity());
  out.routes = RoutingTables(n, kNoNode);
  for (NodeIndex v = 0; v < n; ++v) {
    const auto& st = net.state(v);
    for (NodeIndex u = 0; u < n; ++u) {
      out.dist(v, u) = st.dist_row[u].length;
      out.routes(v, u) = st.next_hop[u];
    }
  }
  out.stats = net.stats_since(mark);
  out.squarings = squarings;
  return out;
}

// Follows first hops from v towards u. Returns the visited node sequence
// (v first, u last), or an empty vector if u is unreachable or the hops do
// not reach u within n - 1 steps.
inline std::vector<NodeIndex> follow_route(const RoutingTables& routes, NodeIndex v, NodeIndex u) {
  std::vector<NodeIndex> path{v};
  NodeIndex at = v;
  while (at != u) {
    const NodeIndex hop = routes(at, u);
    if (hop == kNoNode || path.size() > routes.size()) return {};
    path.push_back(hop);
    at = hop;
  }
  return path;
}

}  // namespace sndp

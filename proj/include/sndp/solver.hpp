#pragma once

// The distributed tree heuristic.
//
// After APSP and one requirement broadcast, levels c_1 < ... < c_k are
// processed from the top: sources V_j = {v : r_v >= c_j}, shortest-path
// forest, modified weights, MST, pruning, and (c_j - c_{j-1}) more copies of
// every pruned-tree edge. The pruned tree is known to every node after the
// pruning broadcast, so all nodes hold the full solution throughout; local
// improvement then runs on that shared knowledge.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sndp/apsp.hpp"
#include "sndp/congest.hpp"
#include "sndp/graph.hpp"
#include "sndp/mst_prune.hpp"
#include "sndp/node_state.hpp"
#include "sndp/spf.hpp"
#include "sndp/triangles.hpp"

namespace sndp {

struct ConnectivityLevels {
  std::vector<Requirement> levels;       // c_1 < ... < c_k, zero excluded
  std::vector<std::vector<bool>> member;  // member[j][v] iff r_v >= c_{j+1}

  std::size_t size() const noexcept { return levels.size(); }
  Requirement level(std::size_t j) const { return levels.at(j); }
  Requirement previous(std::size_t j) const { return j == 0 ? 0 : levels.at(j - 1); }
  std::vector<NodeIndex> nodes(std::size_t j) const {
    std::vector<NodeIndex> out;
    for (NodeIndex v = 0; v < member.at(j).size(); ++v)
      if (member[j][v]) out.push_back(v);
    return out;
  }
};

inline ConnectivityLevels levels_from_requirements(std::span<const Requirement> r) {
  ConnectivityLevels out;
  for (auto x : r)
    if (x > 0) out.levels.push_back(x);
  std::sort(out.levels.begin(), out.levels.end());
  out.levels.erase(std::unique(out.levels.begin(), out.levels.end()), out.levels.end());
  for (auto c : out.levels) {
    std::vector<bool> m(r.size());
    for (std::size_t v = 0; v < r.size(); ++v) m[v] = r[v] >= c;
    out.member.push_back(std::move(m));
  }
  return out;
}

// One round: every node broadcasts r_v using bit_width(r_v) bits (at least
// one); the receiver reads the whole message as the value. Requirements must
// therefore fit into B bits.
inline std::pair<ConnectivityLevels, RoundStats> connectivity_levels(Network<NodeState>& net) {
  const auto n = net.size();
  const RoundStats mark = net.stats();
  net.run_round([&](NodeIndex, NodeState& st, std::span<const Envelope>, Outbox& out) {
    BitString msg;
    msg.push(st.requirement, std::max(1u, static_cast<unsigned>(std::bit_width(st.requirement))));
    out.broadcast(msg);
  });
  net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope> inbox) {
    st.all_requirements.assign(n, 0);
    st.all_requirements[self] = st.requirement;
    for (const auto& env : inbox)
      st.all_requirements[env.from] =
          static_cast<Requirement>(env.payload.read(0, static_cast<unsigned>(env.payload.size())));
    const auto lv = levels_from_requirements(st.all_requirements);
    st.levels = lv.levels;
  });
  return {levels_from_requirements(net.state(0).all_requirements), net.stats_since(mark)};
}

struct SolverConfig {
  bool improve = true;
  CostModel cost_model{};
  unsigned b = 3;
  std::uint64_t round_ceiling = 0;  // 0 selects 10 * n; also caps improvement steps
  std::size_t path_limit = 4096;    // simple paths examined per candidate edge
};

struct IterationTrace {
  Requirement level = 0;
  Requirement increment = 0;
  std::vector<NodeIndex> sources;
  std::vector<EdgeKey> tree_edges;  // pruned tree, original node ids
  std::uint64_t copies_added = 0;
  RoundStats spf, classify, mst, prune, total;
  std::size_t mst_phases = 0;
};

struct SolveResult {
  Multigraph solution;   // after local improvement when enabled
  Multigraph heuristic;  // tree heuristic output
  std::vector<IterationTrace> trace;
  RoundStats apsp, levels, improve, total;
  std::uint64_t round_budget = 0;  // APSP + 1 + sum_j (1 + 1 + mst_j + 2)
  std::uint64_t heuristic_rounds = 0;
  std::size_t improvement_moves = 0;
  std::uint64_t apsp_charged_rounds = 0;  // APSP under the configured cost model
  std::uint64_t charged_rounds = 0;       // total with APSP replaced by its charge
  std::vector<NodeIndex> active_nodes;    // nodes the network ran on
  bool mst_substituted = true;
};

namespace detail {

inline NodeIndex nearest_source_of(const NodeState& st, NodeIndex v) {
  NodeIndex best = kNoNode;
  for (NodeIndex z = 0; z < st.n; ++z) {
    if (!st.is_source[z] || st.dist_all(v, z).is_inf()) continue;
    if (best == kNoNode || std::tie(st.dist_all(v, z), z) < std::tie(st.dist_all(v, best), best))
      best = z;
  }
  return best;
}

// Edge weight of a pruned-tree edge from public knowledge: forest edges
// telescope along distances to their common source, edges between trees are
// recovered from the broadcast modified weight.
inline Weight recover_weight(const NodeState& st, NodeIndex a, NodeIndex b) {
  const auto sa = nearest_source_of(st, a), sb = nearest_source_of(st, b);
  const auto da = st.dist_all(a, sa).length.value(), db = st.dist_all(b, sb).length.value();
  if (sa == sb) return da > db ? da - db : db - da;
  for (const auto& e : st.mst_edges)
    if (e.u == std::min(a, b) && e.v == std::max(a, b)) return e.modified_weight - da - db;
  throw InvariantViolation("pruned edge missing from the MST");
}

inline std::vector<EdgeKey> pruned_edges(const NodeState& st) {
  std::vector<EdgeKey> out;
  for (NodeIndex v = 0; v < st.n; ++v) {
    const auto p = st.mst_parent_of[v];
    if (p != kNoNode && !st.pruned[v] && !st.pruned[p]) out.push_back(edge_key(v, p));
  }
  std::sort(out.begin(), out.end());
  return out;
}

using KnownSolution = std::map<EdgeKey, KnownSolutionEdge>;

inline bool known_feasible(const KnownSolution& s, std::size_t n, std::span<const Requirement> r) {
  FlowNetwork g(n);
  for (const auto& [k, e] : s) g.add(k.first, k.second, e.copies);
  return requirements_met(g, r);
}

struct Move {
  EdgeKey added;
  Weight added_weight = 0;
  std::vector<NodeIndex> path;  // from added.first to added.second
  Weight savings = 0;
};

inline void apply_move(KnownSolution& s, const Move& m) {
  auto& e = s[m.added];
  e.copies += 1;
  e.weight = m.added_weight;
  for (std::size_t i = 0; i + 1 < m.path.size(); ++i) {
    auto it = s.find(edge_key(m.path[i], m.path[i + 1]));
    if (it == s.end() || it->second.copies == 0) throw InvariantViolation("cycle edge not in solution");
    if (--it->second.copies == 0) s.erase(it);
  }
}

// Best feasible improving move that adds one copy of (a, b): among simple
// a-b paths in the support (not using (a, b) itself), highest savings first,
// then lexicographically smallest path; the first feasible one wins.
inline std::optional<Move> best_move_for(const KnownSolution& s, std::size_t n,
                                         std::span<const Requirement> r, NodeIndex a, NodeIndex b,
                                         Weight w, std::size_t path_limit) {
  std::vector<std::vector<std::pair<NodeIndex, Weight>>> adj(n);
  for (const auto& [k, e] : s) {
    if (e.copies == 0 || k == edge_key(a, b)) continue;
    adj[k.first].push_back({k.second, e.weight});
    adj[k.second].push_back({k.first, e.weight});
  }
  for (auto& l : adj) std::sort(l.begin(), l.end());

  std::vector<Move> cands;
  std::vector<NodeIndex> path{a};
  std::vector<bool> on_path(n, false);
  on_path[a] = true;
  std::size_t found = 0;
  auto dfs = [&](auto&& self, NodeIndex at, Weight len) -> void {
    if (found >= path_limit) return;
    if (at == b) {
      ++found;
      if (len > w) cands.push_back({edge_key(a, b), w, path, len - w});
      return;
    }
    for (const auto& [nb, wt] : adj[at]) {
      if (on_path[nb]) continue;
      on_path[nb] = true;
      path.push_back(nb);
      self(self, nb, len + wt);
      path.pop_back();
      on_path[nb] = false;
    }
  };
  dfs(dfs, a, 0);
  std::stable_sort(cands.begin(), cands.end(), [](const Move& x, const Move& y) {
    if (x.savings != y.savings) return x.savings > y.savings;
    return x.path < y.path;
  });
  for (auto& m : cands) {
    auto trial = s;
    apply_move(trial, m);
    if (known_feasible(trial, n, r)) return std::move(m);
  }
  return std::nullopt;
}

}  // namespace detail

// Cycle-shortcut improvement. In each step every node proposes its best
// feasible move over the edges it owns (edges to higher-id neighbours),
// ordered by (savings, edge, path). Proposals are broadcast as (other
// endpoint, edge weight); every node then applies them in proposer order,
// re-deriving and re-verifying each move against the current solution.
// Stops after a step without proposals.
inline std::pair<std::size_t, RoundStats> local_improve(Network<NodeState>& net,
                                                        std::size_t path_limit = 4096) {
  const auto n = net.size();
  const unsigned idb = id_bits(n);
  const unsigned wb = bits_for(static_cast<std::uint64_t>(net.state(0).max_weight));
  const auto rounds = ceil_div(idb + wb, net.bandwidth());
  const RoundStats mark = net.stats();
  std::size_t applied = 0;
  const auto ceiling = net.config().round_ceiling;

  for (std::uint64_t step = 0;; ++step) {
    if (step >= ceiling)
      throw CongestError(CongestErrc::kNonTermination, "NonTermination: local improvement did not settle");
    std::vector<std::vector<std::pair<NodeIndex, std::pair<NodeIndex, Weight>>>> heard(n);
    exchange(
        net, rounds,
        [&](NodeIndex self, const NodeState& st) {
          std::optional<detail::Move> best;
          for (const auto& e : st.incident) {
            if (e.neighbor < self) continue;
            auto m = detail::best_move_for(st.solution, n, st.all_requirements, self, e.neighbor,
                                           e.weight, path_limit);
            if (m && (!best || m->savings > best->savings)) best = std::move(m);
          }
          std::vector<std::pair<NodeIndex, BitString>> out;
          if (!best) return out;
          BitString p;
          p.push(best->added.second, idb);
          p.push(static_cast<std::uint64_t>(best->added_weight), wb);
          for (NodeIndex to = 0; to < n; ++to) out.emplace_back(to, p);
          return out;
        },
        [&](NodeIndex self, NodeState&, NodeIndex from, const BitString& p) {
          BitReader r(p);
          const auto other = static_cast<NodeIndex>(r.take(idb));
          const auto w = static_cast<Weight>(r.take(wb));
          heard[self].push_back({from, {other, w}});
        });
    if (heard[0].empty()) break;

    std::vector<std::size_t> moves(n, 0);
    net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope>) {
      auto& props = heard[self];
      std::sort(props.begin(), props.end());
      for (const auto& [from, prop] : props) {
        auto m = detail::best_move_for(st.solution, n, st.all_requirements, from, prop.first,
                                       prop.second, path_limit);
        if (!m) continue;
        detail::apply_move(st.solution, *m);
        ++moves[self];
      }
    });
    for (NodeIndex v = 1; v < n; ++v)
      if (moves[v] != moves[0] || net.state(v).solution.size() != net.state(0).solution.size())
        throw InvariantViolation("nodes diverged during local improvement");
    if (moves[0] == 0) throw InvariantViolation("a proposal round applied no move");
    applied += moves[0];
  }
  return {applied, net.stats_since(mark)};
}

namespace detail {

inline Multigraph extract_solution(const Network<NodeState>& net, const Instance& inst) {
  Multigraph s(inst);
  const auto& known = net.state(0).solution;
  for (NodeIndex v = 1; v < net.size(); ++v) {
    const auto& other = net.state(v).solution;
    bool same = other.size() == known.size();
    for (auto a = known.begin(), b = other.begin(); same && a != known.end(); ++a, ++b)
      same = a->first == b->first && a->second.copies == b->second.copies &&
             a->second.weight == b->second.weight;
    if (!same) throw InvariantViolation("nodes disagree on the solution");
  }
  for (const auto& [k, e] : known) {
    const auto idx = inst.edge_index(k.first, k.second);
    if (!idx) throw InvariantViolation("solution edge is not an instance edge");
    if (inst.edge(*idx).w != e.weight) throw InvariantViolation("recovered edge weight is wrong");
    s.set(*idx, e.copies);
  }
  return s;
}

// The connected component holding every node with positive requirement, as
// a stand-alone instance plus the map back to the original ids.
inline std::pair<Instance, std::vector<NodeIndex>> required_component(const Instance& inst) {
  const auto n = inst.node_count();
  const auto label = component_labels(n, inst.edges());
  NodeIndex anchor = kNoNode;
  for (NodeIndex v = 0; v < n && anchor == kNoNode; ++v)
    if (inst.requirement(v) > 0) anchor = label[v];
  std::vector<NodeIndex> keep, local(n, kNoNode);
  for (NodeIndex v = 0; v < n; ++v) {
    if (label[v] != anchor) continue;
    local[v] = static_cast<NodeIndex>(keep.size());
    keep.push_back(v);
  }
  RawInstance raw;
  raw.n = keep.size();
  for (auto v : keep) raw.r.push_back(inst.requirement(v));
  for (const auto& e : inst.edges())
    if (local[e.u] != kNoNode) raw.edges.push_back({local[e.u], local[e.v], e.w});
  return {validate_instance(raw, inst.max_weight()), std::move(keep)};
}

}  // namespace detail

inline SolveResult solve(const Instance& inst, const SolverConfig& cfg = {}) {
  SolveResult out;
  out.solution = Multigraph(inst);
  out.heuristic = Multigraph(inst);
  if (inst.max_requirement() == 0) return out;

  auto [sub, ids] = detail::required_component(inst);
  out.active_nodes = ids;
  auto net = init_network(sub, EngineConfig{cfg.b, cfg.round_ceiling});
  const auto n = net.size();

  out.apsp = apsp_with_routing(net).stats;
  auto [levels, level_stats] = connectivity_levels(net);
  out.levels = level_stats;
  out.round_budget = out.apsp.rounds + 1;

  for (std::size_t jj = levels.size(); jj-- > 0;) {
    IterationTrace it;
    it.level = levels.level(jj);
    it.increment = levels.level(jj) - levels.previous(jj);
    const RoundStats mark = net.stats();

    std::tie(std::ignore, it.spf) = build_spf(net, levels.member[jj]);
    std::tie(std::ignore, it.classify) = classify_and_modify(net);
    const auto mst = distributed_mst(net);
    it.mst = mst.stats;
    it.mst_phases = mst.phases;
    std::tie(std::ignore, it.prune) = prune(net);

    net.local_step([&](NodeIndex self, NodeState& st, std::span<const Envelope>) {
      for (const auto& k : detail::pruned_edges(st)) {
        const auto w = detail::recover_weight(st, k.first, k.second);
        if ((k.first == self || k.second == self) &&
            w != st.incident_weight(k.first == self ? k.second : k.first))
          throw InvariantViolation("recovered weight disagrees with the local edge");
        auto& e = st.solution[k];
        e.copies += it.increment;
        e.weight = w;
      }
    });

    for (auto v : levels.nodes(jj)) it.sources.push_back(ids[v]);
    for (const auto& k : detail::pruned_edges(net.state(0))) {
      it.tree_edges.push_back(edge_key(ids[k.first], ids[k.second]));
      it.copies_added += it.increment;
    }
    it.total = net.stats_since(mark);
    out.round_budget += 1 + 1 + it.mst.rounds + 2;
    out.trace.push_back(std::move(it));
  }

  out.heuristic_rounds = net.stats().rounds;
  auto lift = [&](const Multigraph& local) {
    Multigraph g(inst);
    for (std::size_t e = 0; e < sub.edge_count(); ++e) {
      const auto& ed = sub.edge(e);
      g.set(*inst.edge_index(ids[ed.u], ids[ed.v]), local.copies(e));
    }
    return g;
  };
  out.heuristic = lift(detail::extract_solution(net, sub));

  if (cfg.improve && n > 1) {
    std::tie(out.improvement_moves, out.improve) = local_improve(net, cfg.path_limit);
  }
  out.solution = lift(detail::extract_solution(net, sub));
  out.total = net.stats();

  CostModel model = cfg.cost_model;
  model.b = cfg.b;
  out.apsp_charged_rounds =
      model.kind == CostModelKind::kHonest ? out.apsp.rounds : triangle_search_rounds(n, model);
  out.charged_rounds = out.total.rounds - out.apsp.rounds + out.apsp_charged_rounds;
  return out;
}

}  // namespace sndp

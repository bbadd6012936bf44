#pragma once

// Distance products through negative-triangle detection, and the round cost
// models for triangle search.
//
// For n x n matrices A, B and a threshold matrix D, the tripartite graph G'
// has parts V1, V2, V3 (one copy of every node each) and weights
// W'(v1,u2) = A[v][u], W'(u2,z3) = B[u][z], W'(z3,v1) = D[z][v]. The edge
// (z3, v1) lies on a negative triangle iff min_u A[v][u] + B[u][z] < -D[z][v].
// Binary searching every D[z][v] in lock-step recovers (A * B)[v][z].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "sndp/bits.hpp"
#include "sndp/congest.hpp"
#include "sndp/tropical.hpp"

namespace sndp {

struct TriangleInstance {
  Matrix<Dist> a;  // V1 -> V2
  Matrix<Dist> b;  // V2 -> V3
  Matrix<Dist> d;  // V3 -> V1; infinite entries are absent edges
};

// (z, v) pairs whose V3-V1 edge lies on some negative triangle, sorted.
inline std::vector<std::pair<NodeIndex, NodeIndex>> negative_triangle_edges(
    const TriangleInstance& t) {
  const auto n = t.a.size();
  if (t.b.size() != n || t.d.size() != n)
    throw DimensionMismatch("triangle instance matrices differ in size");
  const auto c = distance_product(t.a, t.b);  // c(v, z) = min_u A[v][u] + B[u][z]
  std::vector<std::pair<NodeIndex, NodeIndex>> out;
  for (NodeIndex z = 0; z < n; ++z)
    for (NodeIndex v = 0; v < n; ++v)
      if ((c(v, z) + t.d(z, v)) < Dist(0)) out.emplace_back(z, v);
  return out;
}

// Smallest r with r^k >= n, and largest r with r^k <= n.
inline std::uint64_t iroot_ceil(std::uint64_t n, unsigned k) {
  std::uint64_t r = 0;
  auto pow_ge = [&](std::uint64_t x) {
    std::uint64_t p = 1;
    for (unsigned i = 0; i < k; ++i) {
      if (p > n / std::max<std::uint64_t>(x, 1)) return true;
      p *= x;
    }
    return p >= n;
  };
  while (!pow_ge(r)) ++r;
  return r;
}

inline std::uint64_t iroot_floor(std::uint64_t n, unsigned k) {
  const auto c = iroot_ceil(n, k);
  std::uint64_t p = 1;
  for (unsigned i = 0; i < k; ++i) p *= c;
  return p == n ? c : c - 1;
}

// Block partition used by the classical triangle search: the node set is cut
// into `groups` contiguous blocks of at most `block` nodes, and node t is
// responsible for the block triple with index t (groups^3 <= n).
struct TrianglePartition {
  std::size_t n;
  std::size_t block;
  std::size_t groups;

  static TrianglePartition for_size(std::size_t n) {
    const auto p = std::max<std::uint64_t>(1, iroot_floor(n, 3));
    const auto block = static_cast<std::size_t>(ceil_div(n, p));
    return {n, block, static_cast<std::size_t>(ceil_div(n, block))};
  }
  std::size_t group_of(NodeIndex v) const { return v / block; }
  std::size_t triples() const { return groups * groups * groups; }
  struct Triple {
    std::size_t g1, g2, g3;
  };
  Triple triple(std::size_t t) const {
    return {t / (groups * groups), (t / groups) % groups, t % groups};
  }
  std::pair<NodeIndex, NodeIndex> range(std::size_t g) const {
    return {static_cast<NodeIndex>(g * block),
            static_cast<NodeIndex>(std::min(n, (g + 1) * block))};
  }
};

// Node-local memory for the distributed triangle search: own rows of A, B
// and D, plus the result bit per (own z, v).
struct TriangleNode {
  NodeIndex id = 0;
  std::vector<Dist> a_row, b_row, d_row;

  // Assignee data: blocks received for its triple.
  std::vector<Dist> a_blk, b_blk, d_blk;
  std::vector<bool> on_negative;  // indexed by v, for the owned D row
};

struct TriangleCodec {
  unsigned value_bits;  // magnitude field; one flag bit marks finite values

  unsigned entry_bits() const { return 1 + value_bits; }
  void put(BitString& s, Dist x) const {
    s.push_bit(!x.is_inf());
    s.push(x.is_inf() ? 0 : static_cast<std::uint64_t>(std::abs(x.value())), value_bits);
  }
  Dist get(BitReader& r, bool negative) const {
    const bool finite = r.take_bit();
    const auto mag = static_cast<std::int64_t>(r.take(value_bits));
    if (!finite) return Dist::infinity();
    return Dist(negative ? -mag : mag);
  }
};

// Rounds one invocation of the partition search costs: the block routing
// (up to three blocks of `block` entries per sender/assignee pair) plus the
// report of one bit per (z, v) back to the owner of z. Data independent.
inline std::uint64_t partition_search_rounds(std::size_t n, const TriangleCodec& codec,
                                             std::uint64_t bandwidth) {
  if (n <= 1) return 0;
  const auto part = TrianglePartition::for_size(n);
  return ceil_div(3 * part.block * codec.entry_bits(), bandwidth) +
         ceil_div(part.block, bandwidth);
}

// One classical negative-triangle search on G'. On return every node z
// holds on_negative[v] for each v. Node z's D row must be non-positive.
inline RoundStats find_negative_triangles(Network<TriangleNode>& net, const TriangleCodec& codec) {
  const auto n = net.size();
  const auto part = TrianglePartition::for_size(n);
  const RoundStats mark = net.stats();
  const auto route_rounds = n <= 1 ? 0 : ceil_div(3 * part.block * codec.entry_bits(), net.bandwidth());
  const auto report_rounds = n <= 1 ? 0 : ceil_div(part.block, net.bandwidth());

  // Layout of a routed payload, known to every node: A block entries for
  // u in g2 when the sender is in g1, then B entries for z in g3 when in g2,
  // then D entries for v in g1 when in g3.
  auto payload_for = [&](const TriangleNode& st, std::size_t t) {
    const auto tr = part.triple(t);
    const auto g = part.group_of(st.id);
    BitString p;
    auto put_range = [&](const std::vector<Dist>& row, std::size_t grp) {
      auto [lo, hi] = part.range(grp);
      for (NodeIndex j = lo; j < hi; ++j) codec.put(p, row[j]);
    };
    if (g == tr.g1) put_range(st.a_row, tr.g2);
    if (g == tr.g2) put_range(st.b_row, tr.g3);
    if (g == tr.g3) put_range(st.d_row, tr.g1);
    return p;
  };

  exchange(
      net, route_rounds,
      [&](NodeIndex, const TriangleNode& st) {
        std::vector<std::pair<NodeIndex, BitString>> out;
        for (std::size_t t = 0; t < part.triples(); ++t) {
          auto p = payload_for(st, t);
          if (!p.empty()) out.emplace_back(static_cast<NodeIndex>(t), std::move(p));
        }
        return out;
      },
      [&](NodeIndex self, TriangleNode& st, NodeIndex from, const BitString& p) {
        const auto tr = part.triple(self);
        const auto g = part.group_of(from);
        const auto bl = part.block;
        if (st.a_blk.empty()) {
          st.a_blk.assign(bl * bl, Dist::infinity());
          st.b_blk.assign(bl * bl, Dist::infinity());
          st.d_blk.assign(bl * bl, Dist::infinity());
        }
        BitReader r(p);
        auto take_range = [&](std::vector<Dist>& blk, std::size_t grp, bool negative) {
          auto [lo, hi] = part.range(grp);
          const auto row = from - part.range(g).first;
          for (NodeIndex j = lo; j < hi; ++j) blk[row * bl + (j - lo)] = codec.get(r, negative);
        };
        if (g == tr.g1) take_range(st.a_blk, tr.g2, false);
        if (g == tr.g2) take_range(st.b_blk, tr.g3, false);
        if (g == tr.g3) take_range(st.d_blk, tr.g1, true);
      });

  // Search the owned triple and report, to each z in g3, one bit per v in g1.
  exchange(
      net, report_rounds,
      [&](NodeIndex self, const TriangleNode& st) {
        std::vector<std::pair<NodeIndex, BitString>> out;
        if (self >= part.triples() || st.a_blk.empty()) return out;
        const auto tr = part.triple(self);
        const auto [v_lo, v_hi] = part.range(tr.g1);
        const auto [u_lo, u_hi] = part.range(tr.g2);
        const auto [z_lo, z_hi] = part.range(tr.g3);
        const auto bl = part.block;
        for (NodeIndex z = z_lo; z < z_hi; ++z) {
          BitString bits;
          for (NodeIndex v = v_lo; v < v_hi; ++v) {
            const Dist dzv = st.d_blk[(z - z_lo) * bl + (v - v_lo)];
            bool neg = false;
            for (NodeIndex u = u_lo; u < u_hi && !neg && !dzv.is_inf(); ++u) {
              const Dist s = st.a_blk[(v - v_lo) * bl + (u - u_lo)] +
                             st.b_blk[(u - u_lo) * bl + (z - z_lo)];
              neg = !s.is_inf() && (s + dzv) < Dist(0);
            }
            bits.push_bit(neg);
          }
          out.emplace_back(z, std::move(bits));
        }
        return out;
      },
      [&](NodeIndex, TriangleNode& st, NodeIndex from, const BitString& p) {
        const auto tr = part.triple(from);
        const auto [v_lo, v_hi] = part.range(tr.g1);
        for (NodeIndex v = v_lo; v < v_hi; ++v)
          if (p.bit(v - v_lo)) st.on_negative[v] = true;
      });
  return net.stats_since(mark);
}

struct TriangleProductResult {
  Matrix<Dist> product;
  RoundStats stats;
  std::uint64_t search_rounds = 0;  // T(3n): rounds of one search invocation
  std::uint64_t invocations = 0;
  std::uint64_t round_bound = 0;  // T(3n) * ceil(log2(2M))
};

// A * B computed in the engine by lock-step binary searches over negative
// triangle queries. Finite entries of A and B must lie in 0..M-1, so every
// finite product entry lies in 0..2M-2 and, together with infinity, the
// search space has exactly 2M outcomes: ceil(log2(2M)) queries per entry.
inline TriangleProductResult distance_product_via_triangles(const Matrix<Dist>& a,
                                                            const Matrix<Dist>& b,
                                                            std::int64_t max_entry_bound,
                                                            EngineConfig cfg = {}) {
  const auto n = a.size();
  if (b.size() != n) throw DimensionMismatch("distance product operands differ in size");
  if (max_entry_bound < 1) throw Error("entry bound M must be >= 1");
  const std::int64_t m = max_entry_bound;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (const Dist x : {a(i, j), b(i, j)}) {
        if (!x.is_inf() && (x.value() < 0 || x.value() >= m))
          throw Error("matrix entry " + x.str() + " outside 0.." + std::to_string(m - 1));
      }
    }
  }

  std::vector<TriangleNode> states(n);
  for (NodeIndex j = 0; j < n; ++j) {
    states[j].id = j;
    states[j].a_row.assign(a.row(j).begin(), a.row(j).end());
    states[j].b_row.assign(b.row(j).begin(), b.row(j).end());
  }
  Network<TriangleNode> net(std::move(states), cfg);
  const TriangleCodec codec{bits_for(static_cast<std::uint64_t>(2 * m))};

  // Per owned entry (z, v): candidate interval [lo, hi] over 0..2M-1, where
  // 2M-1 stands for infinity.
  const std::int64_t top = 2 * m - 1;
  std::vector<std::vector<std::int64_t>> lo(n, std::vector<std::int64_t>(n, 0));
  std::vector<std::vector<std::int64_t>> hi(n, std::vector<std::int64_t>(n, top));
  const auto queries = ceil_log2(static_cast<std::uint64_t>(2 * m));

  TriangleProductResult out;
  out.search_rounds = partition_search_rounds(n, codec, net.bandwidth());
  for (unsigned q = 0; q < queries; ++q) {
    // Probe "c <= mid" by setting D[z][v] = -(mid + 1).
    net.local_step([&](NodeIndex z, TriangleNode& st, std::span<const Envelope>) {
      st.d_row.assign(n, Dist(0));
      st.on_negative.assign(n, false);
      st.a_blk.clear();
      st.b_blk.clear();
      st.d_blk.clear();
      for (NodeIndex v = 0; v < n; ++v) st.d_row[v] = Dist(-((lo[z][v] + hi[z][v]) / 2 + 1));
    });
    find_negative_triangles(net, codec);
    net.local_step([&](NodeIndex z, TriangleNode& st, std::span<const Envelope>) {
      for (NodeIndex v = 0; v < n; ++v) {
        const auto mid = (lo[z][v] + hi[z][v]) / 2;
        if (st.on_negative[v]) hi[z][v] = mid;
        else lo[z][v] = std::min(mid + 1, hi[z][v]);
      }
    });
    ++out.invocations;
  }

  out.product = Matrix<Dist>(n, Dist::infinity());
  for (NodeIndex z = 0; z < n; ++z)
    for (NodeIndex v = 0; v < n; ++v)
      out.product(v, z) = lo[z][v] >= top ? Dist::infinity() : Dist(lo[z][v]);
  out.stats = net.stats();
  out.round_bound = out.search_rounds * queries;
  return out;
}

enum class CostModelKind { kHonest, kClassicalCited, kQuantumCited };

inline const char* to_string(CostModelKind k) {
  switch (k) {
    case CostModelKind::kHonest: return "honest";
    case CostModelKind::kClassicalCited: return "classical_cited";
    case CostModelKind::kQuantumCited: return "quantum_cited";
  }
  return "?";
}

inline CostModelKind parse_cost_model(const std::string& s) {
  if (s == "honest") return CostModelKind::kHonest;
  if (s == "classical_cited") return CostModelKind::kClassicalCited;
  if (s == "quantum_cited") return CostModelKind::kQuantumCited;
  throw Error("unknown cost model '" + s + "'");
}

struct CostModel {
  CostModelKind kind = CostModelKind::kHonest;
  unsigned kappa = 2;            // polylog exponent for the cited models
  std::int64_t max_entry = 2;    // M used by the honest measurement
  unsigned b = 3;
};

// Rounds charged for one triangle search on n nodes. The honest model runs
// the implemented partition search in the engine (its cost does not depend
// on the data); the cited models evaluate ceil(n^(1/3)) * ceil(log2 n)^kappa
// (classical) and ceil(n^(1/4)) * ceil(log2 n)^kappa (quantum, Grover-based).
inline std::uint64_t triangle_search_rounds(std::size_t n, const CostModel& model) {
  if (n < 1) throw Error("triangle search needs n >= 1");
  auto polylog = [&] {
    std::uint64_t p = 1;
    for (unsigned i = 0; i < model.kappa; ++i) p *= ceil_log2(n);
    return p;
  };
  switch (model.kind) {
    case CostModelKind::kClassicalCited: return iroot_ceil(n, 3) * polylog();
    case CostModelKind::kQuantumCited: return iroot_ceil(n, 4) * polylog();
    case CostModelKind::kHonest: break;
  }
  std::vector<TriangleNode> states(n);
  for (NodeIndex j = 0; j < n; ++j) {
    states[j].id = j;
    states[j].a_row.assign(n, Dist(0));
    states[j].b_row.assign(n, Dist(0));
    states[j].d_row.assign(n, Dist(0));
    states[j].on_negative.assign(n, false);
  }
  Network<TriangleNode> net(std::move(states), EngineConfig{model.b, 0});
  const TriangleCodec codec{bits_for(static_cast<std::uint64_t>(2 * model.max_entry))};
  return find_negative_triangles(net, codec).rounds;
}

}  // namespace sndp

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sndp/apsp.hpp"
#include "sndp/triangles.hpp"

using namespace sndp;

namespace {

Matrix<Dist> to_matrix(const oracle::Mat& m) {
  Matrix<Dist> out(m.size(), Dist::infinity());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j)
      if (m[i][j]) out(i, j) = Dist(*m[i][j]);
  return out;
}

void expect_same(const Matrix<Dist>& got, const oracle::Mat& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    for (std::size_t j = 0; j < want.size(); ++j) {
      if (want[i][j]) EXPECT_EQ(got(i, j), Dist(*want[i][j])) << i << "," << j;
      else EXPECT_TRUE(got(i, j).is_inf()) << i << "," << j;
    }
}

Matrix<Dist> adjacency(const Instance& inst) {
  Matrix<Dist> a(inst.node_count(), Dist::infinity());
  for (std::size_t v = 0; v < inst.node_count(); ++v) a(v, v) = Dist(0);
  for (const auto& e : inst.edges()) a(e.u, e.v) = a(e.v, e.u) = Dist(e.w);
  return a;
}

}  // namespace

TEST(Dist, SaturatingInfinity) {
  EXPECT_TRUE((Dist::infinity() + Dist(5)).is_inf());
  EXPECT_EQ(Dist(2) + Dist(-5), Dist(-3));
  EXPECT_LT(Dist(1'000'000'000), Dist::infinity());
  EXPECT_THROW(Dist::infinity().value(), Error);
  EXPECT_THROW(Dist(Dist::kInfRaw - 1) + Dist(1), Error);
}

TEST(DistanceProduct, IdentityAndTwoHop) {
  std::mt19937_64 rng(1);
  const auto a = to_matrix(oracle::random_matrix(rng, 6, -20, 20, 25));
  const auto id = minplus_identity<Dist>(6);
  EXPECT_EQ(distance_product(a, id), a);
  EXPECT_EQ(distance_product(id, a), a);

  const auto path = validate_instance({3, {{0, 1, 1}, {1, 2, 1}}, {0, 0, 0}});
  const auto adj = adjacency(path);
  EXPECT_EQ(distance_product(adj, adj)(0, 2), Dist(2));
}

TEST(DistanceProduct, MatchesTripleLoop) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 30; ++t) {
    const auto a = oracle::random_matrix(rng, 5, -10, 10, 20);
    const auto b = oracle::random_matrix(rng, 5, -10, 10, 20);
    expect_same(distance_product(to_matrix(a), to_matrix(b)), oracle::triple_loop(a, b).value);
  }
  EXPECT_THROW(distance_product(Matrix<Dist>(2), Matrix<Dist>(3)), DimensionMismatch);
  EXPECT_THROW(distance_product_with_witness(Matrix<Dist>(2), Matrix<Dist>(3)), DimensionMismatch);
}

TEST(DistanceProduct, WitnessIsSmallestMinimizer) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 30; ++t) {
    const auto a = oracle::random_matrix(rng, 6, 0, 3, 20);  // narrow range: many ties
    const auto b = oracle::random_matrix(rng, 6, 0, 3, 20);
    const auto want = oracle::triple_loop(a, b);
    const auto got = distance_product_with_witness(to_matrix(a), to_matrix(b));
    expect_same(got.product, want.value);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 6; ++j) {
        if (want.argmin[i][j]) EXPECT_EQ(got.witness(i, j), *want.argmin[i][j]);
        else EXPECT_EQ(got.witness(i, j), kNoWitness);
      }
  }
  // Unique minimizer.
  Matrix<Dist> a(5, Dist(10)), b(5, Dist(10));
  a(1, 4) = Dist(0);
  b(4, 2) = Dist(0);
  EXPECT_EQ(distance_product_with_witness(a, b).witness(1, 2), 4u);
  // All ties.
  Matrix<Dist> flat(4, Dist(1));
  EXPECT_EQ(distance_product_with_witness(flat, flat).witness(3, 2), 0u);
  // A * I: witness j on finite entries.
  const auto wi = distance_product_with_witness(flat, minplus_identity<Dist>(4));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(wi.witness(i, j), j);
}

TEST(DistanceProduct, Associative) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto a = to_matrix(oracle::random_matrix(rng, 5, -5, 9, 30));
    const auto b = to_matrix(oracle::random_matrix(rng, 5, -5, 9, 30));
    const auto c = to_matrix(oracle::random_matrix(rng, 5, -5, 9, 30));
    EXPECT_EQ(distance_product(distance_product(a, b), c), distance_product(a, distance_product(b, c)));
  }
}

TEST(DistanceProduct, SquaringReachesFixedPoint) {
  const auto inst = oracle::random_instance(13, 0.3, 0, 8, 50);
  auto d = adjacency(inst);
  for (unsigned i = 0; i < ceil_log2(13); ++i) d = distance_product(d, d);
  EXPECT_EQ(distance_product(d, d), d);
}

TEST(Apsp, PathAndTriangleExamples) {
  const auto path = validate_instance({4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}}, {0, 0, 0, 0}});
  auto net = init_network(path);
  const auto r = apsp_with_routing(net);
  EXPECT_EQ(r.dist(0, 3), Dist(3));
  EXPECT_EQ(r.routes(0, 3), 1u);
  EXPECT_EQ(r.squarings, 2u);

  const auto k3 = validate_instance({3, {{0, 1, 1}, {0, 2, 1}, {1, 2, 3}}, {0, 0, 0}});
  auto net3 = init_network(k3);
  const auto r3 = apsp_with_routing(net3);
  EXPECT_EQ(r3.dist(1, 2), Dist(2));
  EXPECT_EQ(r3.routes(1, 2), 0u);
}

TEST(Apsp, DisconnectedPairHasNoRoute) {
  const auto inst = validate_instance({4, {{0, 1, 2}, {2, 3, 2}}, {0, 0, 0, 0}});
  auto net = init_network(inst);
  const auto r = apsp_with_routing(net);
  EXPECT_TRUE(r.dist(0, 3).is_inf());
  EXPECT_EQ(r.routes(0, 3), kNoNode);
  EXPECT_TRUE(follow_route(r.routes, 0, 3).empty());
  EXPECT_EQ(r.dist(2, 3), Dist(2));
}

TEST(Apsp, SingleNode) {
  const auto inst = validate_instance({1, {}, {0}});
  auto net = init_network(inst);
  const auto r = apsp_with_routing(net);
  EXPECT_EQ(r.dist(0, 0), Dist(0));
  EXPECT_EQ(r.stats.rounds, 0u);
}

TEST(Apsp, MatchesFloydWarshallAndRoutesTelescope) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const std::size_t n = 2 + seed * 3;
    const auto inst = oracle::random_instance(n, seed % 3 == 0 ? 0.6 : 0.15, 0, seed, 100);
    auto net = init_network(inst);
    const auto r = apsp_with_routing(net);
    expect_same(r.dist, oracle::floyd_warshall(n, {inst.edges().begin(), inst.edges().end()}));
    EXPECT_LE(r.stats.max_message_bits, net.bandwidth());
    for (NodeIndex v = 0; v < n; ++v)
      for (NodeIndex u = 0; u < n; ++u) {
        const auto hops = follow_route(r.routes, v, u);
        ASSERT_FALSE(hops.empty());
        EXPECT_LE(hops.size(), n);
        std::int64_t len = 0;
        for (std::size_t i = 0; i + 1 < hops.size(); ++i) {
          const auto e = inst.edge_index(hops[i], hops[i + 1]);
          ASSERT_TRUE(e) << "route uses a non-edge";
          len += inst.edge(*e).w;
        }
        EXPECT_EQ(Dist(len), r.dist(v, u));
      }
  }
}

TEST(Apsp, ZeroWeightEdgesKeepRoutesLoopFree) {
  const auto inst = validate_instance(
      {5, {{0, 1, 0}, {1, 2, 0}, {2, 3, 0}, {0, 3, 0}, {3, 4, 2}, {1, 4, 2}}, {0, 0, 0, 0, 0}});
  auto net = init_network(inst);
  const auto r = apsp_with_routing(net);
  for (NodeIndex v = 0; v < 5; ++v)
    for (NodeIndex u = 0; u < 5; ++u) {
      const auto hops = follow_route(r.routes, v, u);
      ASSERT_FALSE(hops.empty()) << v << "->" << u;
      std::vector<NodeIndex> sorted = hops;
      std::sort(sorted.begin(), sorted.end());
      EXPECT_EQ(std::adjacent_find(sorted.begin(), sorted.end()), sorted.end());
    }
}

TEST(Triangles, ZeroMatricesHaveNoNegativeTriangle) {
  TriangleInstance t{Matrix<Dist>(4, Dist(0)), Matrix<Dist>(4, Dist(0)), Matrix<Dist>(4, Dist(0))};
  EXPECT_TRUE(negative_triangle_edges(t).empty());
  t.a(2, 1) = Dist(-1);
  const auto e = negative_triangle_edges(t);
  ASSERT_EQ(e.size(), 4u);  // every z pairs with v = 2 through u = 1
  for (auto [z, v] : e) EXPECT_EQ(v, 2u);
}

TEST(Triangles, MatchesExhaustiveScan) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 40; ++t) {
    const auto a = oracle::random_matrix(rng, 4, -4, 4, 15);
    const auto b = oracle::random_matrix(rng, 4, -4, 4, 15);
    const auto d = oracle::random_matrix(rng, 4, -4, 4, 15);
    const auto got = negative_triangle_edges({to_matrix(a), to_matrix(b), to_matrix(d)});
    const auto want = oracle::triangle_scan(a, b, d);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].first, want[i].first);
      EXPECT_EQ(got[i].second, want[i].second);
    }
  }
}

TEST(Triangles, DistributedSearchMatchesScan) {
  std::mt19937_64 rng(6);
  for (std::size_t n : {1, 2, 5, 8, 9, 20}) {
    const auto a = oracle::random_matrix(rng, n, 0, 7, 20);
    const auto b = oracle::random_matrix(rng, n, 0, 7, 20);
    const auto d = oracle::random_matrix(rng, n, -15, -1, 10);
    std::vector<TriangleNode> states(n);
    const auto am = to_matrix(a), bm = to_matrix(b), dm = to_matrix(d);
    for (NodeIndex j = 0; j < n; ++j) {
      states[j].id = j;
      states[j].a_row.assign(am.row(j).begin(), am.row(j).end());
      states[j].b_row.assign(bm.row(j).begin(), bm.row(j).end());
      states[j].d_row.assign(dm.row(j).begin(), dm.row(j).end());
      states[j].on_negative.assign(n, false);
    }
    Network<TriangleNode> net(std::move(states));
    const TriangleCodec codec{bits_for(16)};
    const auto stats = find_negative_triangles(net, codec);
    EXPECT_EQ(stats.rounds, partition_search_rounds(n, codec, net.bandwidth()));
    EXPECT_LE(stats.max_message_bits, net.bandwidth());
    std::vector<std::pair<std::size_t, std::size_t>> got;
    for (NodeIndex z = 0; z < n; ++z)
      for (NodeIndex v = 0; v < n; ++v)
        if (net.state(z).on_negative[v]) got.emplace_back(z, v);
    EXPECT_EQ(got, oracle::triangle_scan(a, b, d)) << "n=" << n;
  }
}

TEST(TriangleProduct, EqualsDirectProduct) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 12; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const std::int64_t m = 4;
    const auto a = oracle::random_matrix(rng, n, 0, m - 1, 20);
    const auto b = oracle::random_matrix(rng, n, 0, m - 1, 20);
    const auto r = distance_product_via_triangles(to_matrix(a), to_matrix(b), m);
    expect_same(r.product, oracle::triple_loop(a, b).value);
    EXPECT_EQ(r.invocations, 3u);  // ceil(log2 8)
    EXPECT_LE(r.stats.rounds, r.search_rounds * ceil_log2(2 * m));
  }
}

TEST(TriangleProduct, IdentityConvergesToZeroDiagonal) {
  const auto id = minplus_identity<Dist>(5);
  const auto r = distance_product_via_triangles(id, id, 1);
  EXPECT_EQ(r.product, id);
  EXPECT_EQ(r.invocations, 1u);
}

TEST(TriangleProduct, RoundBoundForFourNodes) {
  std::mt19937_64 rng(8);
  const auto a = oracle::random_matrix(rng, 4, 0, 7, 0);
  const auto b = oracle::random_matrix(rng, 4, 0, 7, 0);
  const auto r = distance_product_via_triangles(to_matrix(a), to_matrix(b), 8);
  EXPECT_EQ(r.invocations, 4u);
  EXPECT_EQ(r.round_bound, 4 * r.search_rounds);
  EXPECT_LE(r.stats.rounds, r.round_bound);
}

TEST(TriangleProduct, RejectsOutOfRangeEntries) {
  Matrix<Dist> a(3, Dist(0)), b(3, Dist(0));
  a(0, 1) = Dist(4);
  EXPECT_THROW(distance_product_via_triangles(a, b, 4), Error);
  EXPECT_THROW(distance_product_via_triangles(a, Matrix<Dist>(2), 8), DimensionMismatch);
}

TEST(CostModel, FormulaValues) {
  EXPECT_EQ(triangle_search_rounds(16, {CostModelKind::kQuantumCited, 2}), 32u);
  EXPECT_EQ(triangle_search_rounds(8, {CostModelKind::kClassicalCited, 0}), 2u);
  EXPECT_EQ(triangle_search_rounds(27, {CostModelKind::kClassicalCited, 1}), 15u);
  EXPECT_EQ(triangle_search_rounds(1, {CostModelKind::kQuantumCited, 2}), 0u);
  EXPECT_EQ(iroot_ceil(17, 4), 3u);
  EXPECT_EQ(iroot_floor(26, 3), 2u);
  EXPECT_EQ(iroot_floor(27, 3), 3u);
}

TEST(CostModel, MonotoneAndHonestMeasured) {
  for (auto kind : {CostModelKind::kClassicalCited, CostModelKind::kQuantumCited}) {
    std::uint64_t prev = 0;
    for (std::size_t n = 1; n <= 300; ++n) {
      const auto c = triangle_search_rounds(n, {kind, 2});
      EXPECT_GE(c, prev) << n;
      prev = c;
    }
  }
  for (std::size_t n : {1, 4, 9, 30}) {
    CostModel honest{CostModelKind::kHonest, 2, 8, 3};
    const auto measured = triangle_search_rounds(n, honest);
    Network<TriangleNode> probe{std::vector<TriangleNode>(n)};
    EXPECT_EQ(measured, partition_search_rounds(n, TriangleCodec{bits_for(16)}, probe.bandwidth()));
  }
  EXPECT_EQ(parse_cost_model("quantum_cited"), CostModelKind::kQuantumCited);
  EXPECT_THROW(parse_cost_model("fast"), Error);
}

#include <gtest/gtest.h>

#include <functional>

#include "oracles.hpp"
#include "sndp/congest.hpp"
#include "sndp/node_state.hpp"

using namespace sndp;

namespace {

struct Counter {
  std::uint64_t value = 0;
  std::uint64_t sum_heard = 0;
  bool halted = false;
};

Instance path3() { return validate_instance({3, {{0, 1, 4}, {1, 2, 6}}, {1, 0, 1}}); }

}  // namespace

TEST(Bits, PushReadSliceAppend) {
  BitString s;
  s.push(5, 3);
  s.push_bit(true);
  s.push(0xABCDEF, 24);
  EXPECT_EQ(s.size(), 28u);
  EXPECT_EQ(s.read(0, 3), 5u);
  EXPECT_TRUE(s.bit(3));
  EXPECT_EQ(s.read(4, 24), 0xABCDEFu);
  const auto tail = s.slice(4, 100);
  EXPECT_EQ(tail.size(), 24u);
  BitString joined = s.slice(0, 4);
  joined.append(tail);
  EXPECT_EQ(joined, s);
  EXPECT_THROW(s.push(8, 3), Error);

  BitString wide;
  for (int i = 0; i < 10; ++i) wide.push(static_cast<std::uint64_t>(i) * 977, 61);
  BitReader r(wide);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(r.take(61), static_cast<std::uint64_t>(i) * 977);
  EXPECT_EQ(r.remaining(), 0u);
}

TEST(InitNetwork, LocalKnowledgeOnly) {
  const auto k3 = validate_instance({3, {{0, 1, 1}, {0, 2, 2}, {1, 2, 3}}, {2, 2, 2}});
  auto net = init_network(k3);
  const auto& s0 = net.state(0);
  EXPECT_EQ(s0.id, 0u);
  EXPECT_EQ(s0.n, 3u);
  EXPECT_EQ(s0.requirement, 2u);
  ASSERT_EQ(s0.incident.size(), 2u);
  EXPECT_EQ(s0.incident[0].neighbor, 1u);
  EXPECT_EQ(s0.incident[1].neighbor, 2u);
  EXPECT_EQ(s0.incident[1].weight, 2);
  EXPECT_TRUE(s0.dist_row.empty());
  EXPECT_TRUE(s0.all_requirements.empty());

  const auto single = validate_instance({1, {}, {0}});
  auto one = init_network(single);
  EXPECT_EQ(one.size(), 1u);
  EXPECT_TRUE(one.state(0).incident.empty());
  EXPECT_EQ(one.bandwidth(), 3u);

  auto p = init_network(path3());
  EXPECT_EQ(p.state(1).incident.size(), 2u);
  EXPECT_EQ(p.state(0).incident.size(), 1u);
  EXPECT_EQ(p.state(2).incident.size(), 1u);
}

TEST(Engine, BandwidthIsBTimesLogN) {
  Network<Counter> net(std::vector<Counter>(16), {3, 0});
  EXPECT_EQ(net.bandwidth(), 12u);
  Network<Counter> wide(std::vector<Counter>(17), {5, 0});
  EXPECT_EQ(wide.bandwidth(), 25u);
  EXPECT_THROW(Network<Counter>(std::vector<Counter>(4), {0, 0}), CongestError);
}

TEST(Engine, BroadcastRoundCountsMessages) {
  const std::size_t n = 6;
  std::vector<Counter> init(n);
  for (NodeIndex v = 0; v < n; ++v) init[v].value = v + 1;
  Network<Counter> net(std::move(init));
  net.run_round([](NodeIndex, Counter& st, std::span<const Envelope>, Outbox& out) {
    BitString m;
    m.push(st.value, 3);
    out.broadcast(m);
  });
  net.local_step([](NodeIndex, Counter& st, std::span<const Envelope> in) {
    for (const auto& e : in) st.sum_heard += e.payload.read(0, 3);
  });
  EXPECT_EQ(net.stats().rounds, 1u);
  EXPECT_EQ(net.stats().messages, n * (n - 1));
  EXPECT_EQ(net.stats().total_bits, 3 * n * (n - 1));
  EXPECT_EQ(net.stats().max_message_bits, 3u);
  for (NodeIndex v = 0; v < n; ++v) EXPECT_EQ(net.state(v).sum_heard, 21u - (v + 1));
}

TEST(Engine, SilentRoundAdvancesClockOnly) {
  Network<Counter> net(std::vector<Counter>(4));
  net.run_round([](NodeIndex, Counter&, std::span<const Envelope>, Outbox&) {});
  EXPECT_EQ(net.stats().rounds, 1u);
  EXPECT_EQ(net.stats().messages, 0u);
}

TEST(Engine, MessagesArriveNextRoundOnly) {
  Network<Counter> net(std::vector<Counter>(3));
  std::vector<std::size_t> seen;
  auto prog = [&](NodeIndex self, Counter&, std::span<const Envelope> in, Outbox& out) {
    if (self == 0) seen.push_back(in.size());
    if (self == 1) {
      BitString m;
      m.push_bit(true);
      out.send(0, m);
    }
  };
  net.run_round(prog);
  net.run_round(prog);
  EXPECT_EQ(seen, (std::vector<std::size_t>{0, 1}));
}

TEST(Engine, RejectsOversizedAndInvalidMessages) {
  Network<Counter> net(std::vector<Counter>(8));  // B = 9
  auto oversize = [](NodeIndex self, Counter&, std::span<const Envelope>, Outbox& out) {
    if (self != 0) return;
    BitString m;
    m.push(0, 10);
    out.send(1, m);
  };
  EXPECT_THROW(net.run_round(oversize), MessageTooLarge);
  try {
    Network<Counter> again(std::vector<Counter>(8));
    again.run_round(oversize);
  } catch (const MessageTooLarge& e) {
    EXPECT_EQ(e.from(), 0u);
    EXPECT_EQ(e.to(), 1u);
    EXPECT_EQ(e.bits(), 10u);
  }
  auto to_self = [](NodeIndex self, Counter&, std::span<const Envelope>, Outbox& out) {
    out.send(self, BitString{});
  };
  EXPECT_THROW(net.run_round(to_self), CongestError);
  auto twice = [](NodeIndex self, Counter&, std::span<const Envelope>, Outbox& out) {
    if (self != 0) return;
    out.send(1, BitString{});
    out.send(1, BitString{});
  };
  EXPECT_THROW(net.run_round(twice), CongestError);
}

TEST(Engine, RunUntilHaltsAndDetectsNonTermination) {
  Network<Counter> net(std::vector<Counter>(5));
  auto stats = net.run_until([](NodeIndex, Counter& st, std::span<const Envelope>, Outbox&) { st.halted = true; },
                             [](const Counter& st) { return st.halted; });
  EXPECT_EQ(stats.rounds, 1u);

  // ceil(log2 8) = 3 doubling phases.
  Network<Counter> phases(std::vector<Counter>(8));
  auto p = phases.run_until(
      [](NodeIndex, Counter& st, std::span<const Envelope>, Outbox&) {
        st.value = st.value == 0 ? 2 : st.value * 2;
        st.halted = st.value >= 8;
      },
      [](const Counter& st) { return st.halted; });
  EXPECT_EQ(p.rounds, 3u);

  Network<Counter> forever(std::vector<Counter>(4));
  try {
    forever.run_until([](NodeIndex, Counter&, std::span<const Envelope>, Outbox&) {},
                      [](const Counter&) { return false; });
    FAIL() << "expected NonTermination";
  } catch (const CongestError& e) {
    EXPECT_EQ(e.code(), CongestErrc::kNonTermination);
    EXPECT_EQ(forever.stats().rounds, 40u);
  }
}

TEST(Engine, ExchangeChunksLongPayloads) {
  const std::size_t n = 4;  // B = 6
  Network<Counter> net{std::vector<Counter>(n)};
  std::vector<std::vector<std::uint64_t>> got(n, std::vector<std::uint64_t>(n, 0));
  const auto stats = exchange(
      net, 4,
      [&](NodeIndex self, const Counter&) {
        std::vector<std::pair<NodeIndex, BitString>> out;
        for (NodeIndex to = 0; to < n; ++to) {
          BitString p;
          p.push(1000 * self + to, 20);
          out.emplace_back(to, p);
        }
        return out;
      },
      [&](NodeIndex self, Counter&, NodeIndex from, const BitString& p) { got[self][from] = p.read(0, 20); });
  EXPECT_EQ(stats.rounds, 4u);
  EXPECT_EQ(stats.max_message_bits, 6u);
  EXPECT_EQ(stats.messages, 4u * n * (n - 1));
  for (NodeIndex a = 0; a < n; ++a)
    for (NodeIndex b = 0; b < n; ++b) EXPECT_EQ(got[a][b], 1000u * b + a);

  EXPECT_THROW(exchange(
                   net, 3,
                   [&](NodeIndex, const Counter&) {
                     BitString p;
                     p.push(0, 20);
                     return std::vector<std::pair<NodeIndex, BitString>>{{(0u + 1) % n, p}};
                   },
                   [](NodeIndex, Counter&, NodeIndex, const BitString&) {}),
               MessageTooLarge);
}

TEST(Engine, DeterministicAndIsolated) {
  auto run = [] {
    const auto inst = oracle::random_instance(9, 0.4, 2, 5);
    auto net = init_network(inst);
    naive_dissemination(net);
    return std::pair(net.stats(), net.state(3).incident.size());
  };
  EXPECT_EQ(run(), run());

  // A node's state changes only through delivered messages: a program that
  // sends nothing leaves every other node untouched.
  Network<Counter> net(std::vector<Counter>(4));
  net.run_round([](NodeIndex self, Counter& st, std::span<const Envelope>, Outbox&) {
    if (self == 2) st.value = 99;
  });
  for (NodeIndex v = 0; v < 4; ++v) EXPECT_EQ(net.state(v).value, v == 2 ? 99u : 0u);
}

TEST(Engine, NaiveDisseminationIsLinear) {
  for (std::size_t n : {2, 5, 12, 24}) {
    const auto inst = oracle::random_instance(n, 0.5, 1, n, 100);
    auto net = init_network(inst);
    const auto k = naive_dissemination(net);
    EXPECT_TRUE(k.all_nodes_agree);
    ASSERT_EQ(k.edges.size(), inst.edge_count());
    for (std::size_t i = 0; i < k.edges.size(); ++i) {
      EXPECT_EQ(k.edges[i].u, inst.edge(i).u);
      EXPECT_EQ(k.edges[i].v, inst.edge(i).v);
      EXPECT_EQ(k.edges[i].w, inst.edge(i).w);
    }
    // One (id, weight) record per neighbour; weights need up to
    // ceil(log2 M) / ceil(log2 n) extra units, so 4n rounds cover it.
    EXPECT_LE(k.stats.rounds, 4 * n);
    EXPECT_LE(k.stats.max_message_bits, net.bandwidth());
  }
}

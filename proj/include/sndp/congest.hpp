#pragma once

// Synchronous CONGEST-CLIQUE round engine.
//
// Every round each node runs its program on (own state, messages delivered
// at the end of the previous round) and may send one message to every other
// node. Messages longer than the bandwidth cap B = b * ceil(log2 n) bits are
// rejected. Node programs receive only their own state; the engine is the
// only path between nodes.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sndp/bits.hpp"
#include "sndp/errors.hpp"

namespace sndp {

using NodeIndex = std::uint32_t;

struct RoundStats {
  std::uint64_t rounds = 0;
  std::uint64_t messages = 0;
  std::uint64_t total_bits = 0;
  std::uint64_t max_message_bits = 0;
  std::uint64_t bandwidth_bits = 0;

  RoundStats& operator+=(const RoundStats& o) {
    rounds += o.rounds;
    messages += o.messages;
    total_bits += o.total_bits;
    max_message_bits = std::max(max_message_bits, o.max_message_bits);
    bandwidth_bits = std::max(bandwidth_bits, o.bandwidth_bits);
    return *this;
  }
  friend RoundStats operator+(RoundStats a, const RoundStats& b) { return a += b; }
  friend bool operator==(const RoundStats&, const RoundStats&) = default;
};

// Id field width: enough bits for ids 0..n-1, at least one.
constexpr unsigned id_bits(std::size_t n) {
  return std::max(1u, ceil_log2(static_cast<std::uint64_t>(n)));
}

struct Envelope {
  NodeIndex from;
  BitString payload;
};

class Outbox {
 public:
  Outbox(NodeIndex self, std::size_t n) : self_(self), n_(n), used_(n, false) {}

  void send(NodeIndex to, BitString msg) {
    if (to >= n_ || to == self_) {
      throw CongestError(CongestErrc::kInvalidDestination,
                         "node " + std::to_string(self_) +
                             " cannot send to " + std::to_string(to));
    }
    if (used_[to]) {
      throw CongestError(CongestErrc::kDuplicateMessage,
                         "node " + std::to_string(self_) +
                             " sent twice to " + std::to_string(to) +
                             " in one round");
    }
    used_[to] = true;
    out_.emplace_back(to, std::move(msg));
  }

  void broadcast(const BitString& msg) {
    for (NodeIndex to = 0; to < n_; ++to)
      if (to != self_) send(to, msg);
  }

  std::vector<std::pair<NodeIndex, BitString>>& pending() { return out_; }

 private:
  NodeIndex self_;
  std::size_t n_;
  std::vector<bool> used_;
  std::vector<std::pair<NodeIndex, BitString>> out_;
};

struct EngineConfig {
  unsigned b = 3;                   // bandwidth multiplier
  std::uint64_t round_ceiling = 0;  // 0 selects 10 * n
};

template <class State>
class Network {
 public:
  Network(std::vector<State> states, EngineConfig cfg = {})
      : states_(std::move(states)), inbox_(states_.size()), cfg_(cfg) {
    if (cfg_.b < 1)
      throw CongestError(CongestErrc::kInvalidBandwidth, "bandwidth multiplier b must be >= 1");
    if (states_.empty())
      throw CongestError(CongestErrc::kInvalidBandwidth, "network needs at least one node");
    bandwidth_ = static_cast<std::uint64_t>(cfg_.b) * id_bits(states_.size());
    if (cfg_.round_ceiling == 0) cfg_.round_ceiling = 10 * states_.size();
  }

  std::size_t size() const noexcept { return states_.size(); }
  std::uint64_t bandwidth() const noexcept { return bandwidth_; }
  const EngineConfig& config() const noexcept { return cfg_; }

  // Harness access for assertions and result extraction. Node programs never
  // see these.
  const State& state(NodeIndex v) const { return states_.at(v); }
  std::span<const State> states() const noexcept { return states_; }
  std::span<const Envelope> inbox(NodeIndex v) const { return inbox_.at(v); }

  RoundStats stats() const {
    RoundStats s = totals_;
    s.bandwidth_bits = bandwidth_;
    return s;
  }

  // Statistics accumulated since an earlier stats() snapshot. The maximum
  // message size is tracked per round so it stays exact for the window.
  RoundStats stats_since(const RoundStats& mark) const {
    RoundStats s;
    s.rounds = totals_.rounds - mark.rounds;
    s.messages = totals_.messages - mark.messages;
    s.total_bits = totals_.total_bits - mark.total_bits;
    s.bandwidth_bits = bandwidth_;
    for (std::uint64_t r = mark.rounds; r < totals_.rounds; ++r)
      s.max_message_bits = std::max(s.max_message_bits, round_max_bits_[r]);
    return s;
  }

  // One synchronous round. `prog(self, state, inbox, outbox)` sees the
  // messages delivered at the end of the previous round; everything it
  // sends is delivered at the end of this round.
  template <class Program>
  void run_round(Program&& prog) {
    const auto n = states_.size();
    std::vector<std::vector<Envelope>> next(n);
    std::uint64_t msgs = 0, bits = 0, max_bits = 0;
    std::vector<Outbox> outs;
    outs.reserve(n);
    for (NodeIndex v = 0; v < n; ++v) {
      outs.emplace_back(v, n);
      prog(v, states_[v], std::span<const Envelope>(inbox_[v]), outs.back());
    }
    for (NodeIndex v = 0; v < n; ++v) {
      for (auto& [to, msg] : outs[v].pending()) {
        if (msg.size() > bandwidth_) throw MessageTooLarge(v, to, msg.size(), bandwidth_);
        ++msgs;
        bits += msg.size();
        max_bits = std::max<std::uint64_t>(max_bits, msg.size());
        next[to].push_back({v, std::move(msg)});
      }
    }
    inbox_ = std::move(next);
    ++totals_.rounds;
    totals_.messages += msgs;
    totals_.total_bits += bits;
    totals_.max_message_bits = std::max(totals_.max_message_bits, max_bits);
    round_max_bits_.push_back(max_bits);
  }

  // Local computation on the messages received in the last round. Costs no
  // round; clears the inboxes.
  template <class Step>
  void local_step(Step&& step) {
    for (NodeIndex v = 0; v < states_.size(); ++v)
      step(v, states_[v], std::span<const Envelope>(inbox_[v]));
    for (auto& in : inbox_) in.clear();
  }

  // Repeats rounds until every node reports halted. At least one round runs.
  template <class Program, class Halted>
  RoundStats run_until(Program&& prog, Halted&& halted) {
    const RoundStats mark = stats();
    for (;;) {
      if (totals_.rounds - mark.rounds >= cfg_.round_ceiling) {
        throw CongestError(CongestErrc::kNonTermination,
                           "NonTermination: no halt after " +
                               std::to_string(cfg_.round_ceiling) + " rounds");
      }
      run_round(prog);
      bool all = true;
      for (const auto& s : states_) all = all && halted(s);
      if (all) break;
    }
    return stats_since(mark);
  }

 private:
  std::vector<State> states_;
  std::vector<std::vector<Envelope>> inbox_;
  EngineConfig cfg_;
  std::uint64_t bandwidth_ = 0;
  RoundStats totals_;
  std::vector<std::uint64_t> round_max_bits_;
};

// Multi-round point-to-point transfer. Each node computes, from its own
// state, a list of (destination, payload) pairs; payloads are cut into
// B-bit chunks and sent over exactly `rounds` rounds (one chunk per
// destination per round). `rounds` must follow from a layout every node can
// compute, and each payload must fit into rounds * B bits. When the last
// chunk arrives, `deliver(self, state, from, payload)` runs locally. A
// payload addressed to the sender itself is handed over without a message.
template <class State, class PayloadFn, class DeliverFn>
RoundStats exchange(Network<State>& net, std::uint64_t rounds, PayloadFn&& payloads,
                    DeliverFn&& deliver) {
  const auto n = net.size();
  const auto cap = net.bandwidth();
  const RoundStats mark = net.stats();
  std::vector<std::vector<std::pair<NodeIndex, BitString>>> outgoing(n);
  std::vector<std::vector<BitString>> partial(n, std::vector<BitString>(n));
  std::vector<std::vector<bool>> got(n, std::vector<bool>(n, false));

  auto absorb = [&](NodeIndex self, std::span<const Envelope> inbox) {
    for (const auto& env : inbox) {
      partial[self][env.from].append(env.payload);
      got[self][env.from] = true;
    }
  };

  auto prepare = [&](NodeIndex self, const State& st) {
    outgoing[self] = payloads(self, st);
    for (const auto& [to, p] : outgoing[self]) {
      if (p.empty()) throw Error("exchange payloads must be non-empty");
      if (to != self && p.size() > rounds * cap) throw MessageTooLarge(self, to, p.size(), rounds * cap);
    }
  };

  for (std::uint64_t r = 0; r < rounds; ++r) {
    net.run_round([&](NodeIndex self, State& st, std::span<const Envelope> inbox, Outbox& out) {
      if (r == 0) prepare(self, st);
      absorb(self, inbox);
      for (const auto& [to, p] : outgoing[self]) {
        if (to != self && r * cap < p.size()) out.send(to, p.slice(r * cap, cap));
      }
    });
  }
  net.local_step([&](NodeIndex self, State& st, std::span<const Envelope> inbox) {
    if (rounds == 0) prepare(self, st);
    absorb(self, inbox);
    for (const auto& [to, p] : outgoing[self]) {
      if (to == self) {
        partial[self][self] = p;
        got[self][self] = true;
      }
    }
    for (NodeIndex from = 0; from < n; ++from)
      if (got[self][from]) deliver(self, st, from, partial[self][from]);
  });
  return net.stats_since(mark);
}

}  // namespace sndp

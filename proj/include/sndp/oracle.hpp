#pragma once

// Exact SNDP by branch-and-bound for desk-sized instances, approximation
// bounds per requirement profile, and ratio audits.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sndp/errors.hpp"
#include "sndp/graph.hpp"

namespace sndp {

// Exact fraction with a positive denominator, always in lowest terms.
class Rational {
 public:
  constexpr Rational(std::int64_t num = 0, std::int64_t den = 1) : num_(num), den_(den) {  // NOLINT
    if (den_ == 0) throw Error("zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    const auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }

  constexpr std::int64_t num() const noexcept { return num_; }
  constexpr std::int64_t den() const noexcept { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

  friend constexpr Rational operator+(Rational a, Rational b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator-(Rational a, Rational b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator*(Rational a, Rational b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
  friend constexpr Rational operator/(Rational a, Rational b) {
    if (b.num_ == 0) throw Error("division by zero");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  friend constexpr std::strong_ordering operator<=>(Rational a, Rational b) {
    return static_cast<__int128>(a.num_) * b.den_ <=> static_cast<__int128>(b.num_) * a.den_;
  }
  friend constexpr bool operator==(Rational a, Rational b) = default;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

struct ExactResult {
  Weight weight = 0;
  Multigraph solution;
  std::uint32_t cap = 0;
  std::uint64_t search_space = 0;  // (cap + 1)^|E|, saturating
  std::uint64_t nodes_explored = 0;
};

struct ExactLimits {
  std::size_t max_nodes = 7;
};

namespace detail {

inline std::uint64_t saturating_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::uint64_t>::max() / base)
      return std::numeric_limits<std::uint64_t>::max();
    out *= base;
  }
  return out;
}

// A u-v pair has min(r_u, r_v) edge-disjoint paths for all pairs iff every
// cut (S, V \ S) carries at least max over separated pairs of min(r_u, r_v)
// copies. Only cuts with a positive demand are kept.
struct CutSystem {
  struct Cut {
    std::uint32_t demand;
    std::vector<std::size_t> edges;  // indices into the branching order
  };
  std::vector<Cut> cuts;
  std::vector<std::vector<std::size_t>> cuts_of_edge;  // branching index -> cut ids
};

}  // namespace detail

// Minimum-weight feasible multigraph with x_e <= cap for every edge. Edges
// are branched in order of decreasing weight, trying fewer copies first;
// a branch is cut when some cut can no longer reach its demand or when the
// partial weight plus a lower bound reaches the incumbent.
inline ExactResult exact_sndp(const Instance& inst, std::optional<std::uint32_t> cap_opt = std::nullopt,
                              ExactLimits limits = {}) {
  const auto n = inst.node_count();
  const auto m = inst.edge_count();
  const std::uint32_t cap = cap_opt.value_or(inst.max_requirement());
  ExactResult out;
  out.cap = cap;
  out.search_space = detail::saturating_pow(cap + 1ULL, m);
  out.solution = Multigraph(inst);
  if (n > limits.max_nodes)
    throw SearchSpaceTooLarge("exact search supports at most " + std::to_string(limits.max_nodes) +
                              " nodes, instance has " + std::to_string(n));
  if (inst.max_requirement() == 0) return out;

  // Branching order: heavier edges first, ties by edge index.
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return inst.edge(a).w > inst.edge(b).w; });
  std::vector<Weight> w(m);
  for (std::size_t i = 0; i < m; ++i) w[i] = inst.edge(order[i]).w;

  detail::CutSystem cs;
  cs.cuts_of_edge.resize(m);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
    const std::uint64_t side = mask << 1;  // node 0 always outside S
    Requirement in_max = 0, out_max = 0;
    for (NodeId v = 0; v < n; ++v) {
      auto& side_max = (side >> v) & 1 ? in_max : out_max;
      side_max = std::max(side_max, inst.requirement(v));
    }
    const auto demand = std::min(in_max, out_max);
    if (demand == 0) continue;
    detail::CutSystem::Cut c{demand, {}};
    for (std::size_t i = 0; i < m; ++i) {
      const auto& e = inst.edge(order[i]);
      if (((side >> e.u) & 1) != ((side >> e.v) & 1)) c.edges.push_back(i);
    }
    for (auto i : c.edges) cs.cuts_of_edge[i].push_back(cs.cuts.size());
    cs.cuts.push_back(std::move(c));
  }

  // potential[c] = decided copies across c + cap * undecided edges across c.
  std::vector<std::int64_t> potential(cs.cuts.size());
  for (std::size_t c = 0; c < cs.cuts.size(); ++c)
    potential[c] = static_cast<std::int64_t>(cap) * static_cast<std::int64_t>(cs.cuts[c].edges.size());
  for (std::size_t c = 0; c < cs.cuts.size(); ++c)
    if (potential[c] < cs.cuts[c].demand) {
      throw InstanceError(InstanceErrc::kRequirementUnsatisfiable,
                          "requirements exceed the multiplicity cap");
    }

  // Incumbent: everything at cap, then shed copies of heavy edges greedily.
  std::vector<std::uint32_t> best(m, cap);
  {
    std::vector<std::int64_t> load(cs.cuts.size());
    for (std::size_t c = 0; c < cs.cuts.size(); ++c) load[c] = potential[c];
    for (std::size_t i = 0; i < m; ++i) {
      while (best[i] > 0 && std::all_of(cs.cuts_of_edge[i].begin(), cs.cuts_of_edge[i].end(),
                                        [&](std::size_t c) { return load[c] - 1 >= cs.cuts[c].demand; })) {
        --best[i];
        for (auto c : cs.cuts_of_edge[i]) --load[c];
      }
    }
  }
  Weight best_weight = 0;
  for (std::size_t i = 0; i < m; ++i) best_weight += w[i] * best[i];

  // Lower bound on the cost still needed: the largest single-cut deficit,
  // filled with the cheapest undecided crossing edges (each up to cap).
  std::vector<std::int64_t> decided(cs.cuts.size(), 0);
  auto remaining_bound = [&](std::size_t next) {
    Weight bound = 0;
    for (std::size_t c = 0; c < cs.cuts.size(); ++c) {
      std::int64_t deficit = cs.cuts[c].demand - decided[c];
      if (deficit <= 0) continue;
      Weight cost = 0;
      // Undecided crossing edges have index >= next; the cheapest are last.
      for (auto it = cs.cuts[c].edges.rbegin(); it != cs.cuts[c].edges.rend() && deficit > 0; ++it) {
        if (*it < next) break;
        const auto take = std::min<std::int64_t>(deficit, cap);
        cost += take * w[*it];
        deficit -= take;
      }
      bound = std::max(bound, cost);
    }
    return bound;
  };

  std::vector<std::uint32_t> x(m, 0);
  std::uint64_t explored = 0;
  auto search = [&](auto&& self, std::size_t i, Weight partial) -> void {
    ++explored;
    if (partial + remaining_bound(i) >= best_weight) return;
    if (i == m) {
      best_weight = partial;
      best = x;
      return;
    }
    for (std::uint32_t k = 0; k <= cap; ++k) {
      if (partial + w[i] * k >= best_weight) break;
      bool ok = true;
      for (auto c : cs.cuts_of_edge[i]) {
        potential[c] -= cap - k;
        decided[c] += k;
        ok = ok && potential[c] >= cs.cuts[c].demand;
      }
      x[i] = k;
      if (ok) self(self, i + 1, partial + w[i] * k);
      for (auto c : cs.cuts_of_edge[i]) {
        potential[c] += cap - k;
        decided[c] -= k;
      }
    }
    x[i] = 0;
  };
  search(search, 0, 0);

  for (std::size_t i = 0; i < m; ++i) out.solution.set(order[i], best[i]);
  out.weight = solution_weight(out.solution, inst);
  out.nodes_explored = explored;
  if (out.weight != best_weight || !verify_sndp_feasible(out.solution, inst))
    throw InvariantViolation("exact search returned an infeasible multigraph");
  return out;
}

struct ApproxBound {
  Rational value;
  std::string row;  // "general", "two_level", "unit_first_level" or "trivial"
};

// Tightest applicable bound for the requirement profile. With |V_1| <= 1 no
// pair has a positive demand, so only weight 0 is acceptable.
inline ApproxBound table1_bound(const Instance& inst) {
  std::vector<Requirement> levels;
  std::size_t v1 = 0;
  bool small = true;  // all r in {0, 1, 2}
  for (auto r : inst.requirements()) {
    if (r > 0) {
      ++v1;
      levels.push_back(r);
    }
    small = small && r <= 2;
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (v1 <= 1) return {Rational(0), "trivial"};

  const Rational base = Rational(2) - Rational(2, static_cast<std::int64_t>(v1));
  Rational sum(0);
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const std::int64_t prev = j == 0 ? 0 : levels[j - 1];
    sum = sum + Rational(levels[j] - prev, levels[j]);
  }
  ApproxBound best{base * sum, "general"};
  // Ties go to the more specific row.
  if (small || levels.size() == 1) {
    if (base <= best.value) best = {base, "two_level"};
  }
  // The c_1 = 1 row is only meaningful with a second level; for k = 1 it
  // would fall below 1.
  if (levels.front() == 1 && levels.size() >= 2) {
    const Rational third = base * (sum - Rational(1, 2));
    if (third < best.value) best = {third, "unit_first_level"};
  }
  return best;
}

struct AuditResult {
  bool feasible = false;
  Weight weight = 0;
  Weight optimum = 0;
  std::optional<Rational> ratio;  // undefined when the optimum is 0
  ApproxBound bound;
  bool within_bound = false;
};

inline AuditResult audit(const Instance& inst, const Multigraph& solution, const ExactResult& exact) {
  AuditResult a;
  a.feasible = verify_sndp_feasible(solution, inst);
  a.weight = solution_weight(solution, inst);
  a.optimum = exact.weight;
  a.bound = table1_bound(inst);
  if (a.optimum == 0) {
    a.within_bound = a.feasible && a.weight == 0;
  } else {
    a.ratio = Rational(a.weight, a.optimum);
    a.within_bound = a.feasible && *a.ratio <= a.bound.value;
  }
  return a;
}

}  // namespace sndp

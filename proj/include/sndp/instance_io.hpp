#pragma once

// Plain-text instance format:
//
//   n m
//   u v w      (m lines, 1-based node ids)
//   v r_v      (n lines, one per node)
//
// '#' starts a comment that runs to the end of the line. Blank lines are
// ignored.

#include <charconv>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sndp/graph.hpp"

namespace sndp {

namespace detail {

struct Line {
  std::size_t number;
  std::vector<std::int64_t> fields;
};

inline std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> out;
  std::string text;
  std::size_t number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (auto hash = text.find('#'); hash != std::string::npos)
      text.resize(hash);
    std::istringstream ss(text);
    std::string tok;
    Line line{number, {}};
    while (ss >> tok) {
      std::int64_t value = 0;
      const auto* first = tok.data();
      const auto* last = tok.data() + tok.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc{} || ptr != last)
        throw ParseError(number, "not an integer: '" + tok + "'");
      line.fields.push_back(value);
    }
    if (!line.fields.empty()) out.push_back(std::move(line));
  }
  return out;
}

}  // namespace detail

inline RawInstance parse_instance(std::istream& in) {
  const auto lines = detail::tokenize(in);
  if (lines.empty()) throw ParseError(0, "missing header 'n m'");
  const auto& header = lines.front();
  if (header.fields.size() != 2)
    throw ParseError(header.number, "header must be 'n m'");
  const auto n = header.fields[0];
  const auto m = header.fields[1];
  if (n < 1) throw ParseError(header.number, "n must be positive");
  if (m < 0) throw ParseError(header.number, "m must be non-negative");
  if (lines.size() != 1 + static_cast<std::size_t>(m + n)) {
    throw ParseError(header.number,
                     "expected " + std::to_string(m) + " edge lines and " +
                         std::to_string(n) + " requirement lines");
  }

  auto node = [&](const detail::Line& l, std::int64_t id) {
    if (id < 1 || id > n)
      throw ParseError(l.number, "node id " + std::to_string(id) +
                                     " outside 1.." + std::to_string(n));
    return static_cast<NodeId>(id - 1);
  };

  RawInstance raw;
  raw.n = static_cast<std::size_t>(n);
  for (std::int64_t i = 0; i < m; ++i) {
    const auto& l = lines[1 + i];
    if (l.fields.size() != 3) throw ParseError(l.number, "edge must be 'u v w'");
    raw.edges.push_back({node(l, l.fields[0]), node(l, l.fields[1]), l.fields[2]});
  }
  raw.r.assign(raw.n, 0);
  std::vector<bool> seen(raw.n, false);
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& l = lines[1 + m + i];
    if (l.fields.size() != 2)
      throw ParseError(l.number, "requirement must be 'v r_v'");
    const auto v = node(l, l.fields[0]);
    if (seen[v])
      throw ParseError(l.number, "duplicate requirement for node " +
                                     std::to_string(v + 1));
    seen[v] = true;
    raw.r[v] = l.fields[1];
  }
  return raw;
}

inline RawInstance parse_instance(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_instance(in);
}

inline void write_instance(std::ostream& out, const RawInstance& raw) {
  out << raw.n << ' ' << raw.edges.size() << '\n';
  for (const auto& e : raw.edges)
    out << e.u + 1 << ' ' << e.v + 1 << ' ' << e.w << '\n';
  for (std::size_t v = 0; v < raw.n; ++v) out << v + 1 << ' ' << raw.r[v] << '\n';
}

inline RawInstance to_raw(const Instance& inst) {
  RawInstance raw;
  raw.n = inst.node_count();
  raw.edges.assign(inst.edges().begin(), inst.edges().end());
  for (auto r : inst.requirements()) raw.r.push_back(r);
  return raw;
}

struct GeneratorOptions {
  std::size_t n = 8;
  double density = 0.5;
  Requirement rmax = 2;
  std::uint64_t seed = 1;
  Weight max_weight = 10;
  Weight min_weight = 1;
};

// Deterministic connected instance. A random spanning tree guarantees
// connectivity; every remaining pair is added with probability `density`.
// Uses raw mt19937_64 output (no std distributions) so files are identical
// across standard library implementations.
inline RawInstance generate_instance(const GeneratorOptions& opt) {
  if (opt.n < 2) throw Error("generator needs n >= 2");
  if (!(opt.density > 0.0 && opt.density <= 1.0))
    throw Error("density must lie in (0, 1]");
  if (opt.min_weight < 0 || opt.max_weight < opt.min_weight)
    throw Error("invalid weight range");

  std::mt19937_64 rng(opt.seed);
  auto below = [&](std::uint64_t bound) { return rng() % bound; };
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  auto weight = [&] {
    const auto span = static_cast<std::uint64_t>(opt.max_weight - opt.min_weight) + 1;
    return opt.min_weight + static_cast<Weight>(below(span));
  };

  std::vector<NodeId> order(opt.n);
  std::iota(order.begin(), order.end(), NodeId{0});
  for (std::size_t i = opt.n - 1; i > 0; --i) std::swap(order[i], order[below(i + 1)]);

  std::vector<bool> present(opt.n * opt.n, false);
  RawInstance raw;
  raw.n = opt.n;
  for (std::size_t i = 1; i < opt.n; ++i) {
    const NodeId a = order[i], b = order[below(i)];
    present[a * opt.n + b] = present[b * opt.n + a] = true;
    raw.edges.push_back({std::min(a, b), std::max(a, b), weight()});
  }
  for (NodeId a = 0; a < opt.n; ++a) {
    for (NodeId b = a + 1; b < opt.n; ++b) {
      if (present[a * opt.n + b]) continue;
      if (opt.density >= 1.0 || unit() < opt.density)
        raw.edges.push_back({a, b, weight()});
    }
  }
  std::sort(raw.edges.begin(), raw.edges.end(), [](const Edge& x, const Edge& y) {
    return std::pair(x.u, x.v) < std::pair(y.u, y.v);
  });
  raw.r.resize(opt.n);
  for (auto& r : raw.r) r = static_cast<std::int64_t>(below(opt.rmax + 1));
  return raw;
}

}  // namespace sndp

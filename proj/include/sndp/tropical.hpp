#pragma once

// Min-plus (tropical) values, matrices and distance products.

#include <compare>
#include <concepts>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sndp/errors.hpp"

namespace sndp {

// Integer distance with a dedicated infinity. Addition saturates at
// infinity; ordering places infinity above every finite value.
class Dist {
 public:
  static constexpr std::int64_t kInfRaw = std::numeric_limits<std::int64_t>::max();

  constexpr Dist() = default;
  constexpr Dist(std::int64_t v) : v_(v) {}  // NOLINT: implicit by design of the semiring API

  static constexpr Dist infinity() { return Dist(kInfRaw); }
  static constexpr Dist zero() { return Dist(0); }

  constexpr bool is_inf() const noexcept { return v_ == kInfRaw; }
  constexpr std::int64_t value() const {
    if (is_inf()) throw Error("value() of an infinite distance");
    return v_;
  }
  constexpr std::int64_t raw() const noexcept { return v_; }

  friend constexpr Dist operator+(Dist a, Dist b) {
    if (a.is_inf() || b.is_inf()) return infinity();
    std::int64_t out = 0;
    if (__builtin_add_overflow(a.v_, b.v_, &out) || out == kInfRaw)
      throw Error("distance overflow");
    return Dist(out);
  }
  friend constexpr auto operator<=>(Dist, Dist) = default;
  friend constexpr bool operator==(Dist, Dist) = default;

  std::string str() const { return is_inf() ? "inf" : std::to_string(v_); }

 private:
  std::int64_t v_ = kInfRaw;
};

// Path length with hop count as secondary key. Every edge adds one hop, so
// (length, hops) is strictly positive along any edge even when weights are
// zero, which keeps shortest-path routing loop-free.
struct PathCost {
  Dist length = Dist::infinity();
  std::uint32_t hops = 0;

  static constexpr PathCost infinity() { return {}; }
  static constexpr PathCost zero() { return {Dist(0), 0}; }
  static constexpr PathCost edge(std::int64_t w) { return {Dist(w), 1}; }

  constexpr bool is_inf() const noexcept { return length.is_inf(); }

  friend constexpr PathCost operator+(PathCost a, PathCost b) {
    if (a.is_inf() || b.is_inf()) return infinity();
    return {a.length + b.length, a.hops + b.hops};
  }
  friend constexpr auto operator<=>(const PathCost&, const PathCost&) = default;
  friend constexpr bool operator==(const PathCost&, const PathCost&) = default;
};

template <class T>
concept TropicalValue = std::regular<T> && std::totally_ordered<T> && requires(T a, T b) {
  { a + b } -> std::same_as<T>;
  { T::infinity() } -> std::same_as<T>;
  { T::zero() } -> std::same_as<T>;
  { a.is_inf() } -> std::convertible_to<bool>;
};

inline constexpr std::uint32_t kNoWitness = std::numeric_limits<std::uint32_t>::max();

// Dense square matrix, row-major.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, T fill = T{}) : n_(n), data_(n * n, fill) {}

  std::size_t size() const noexcept { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<T> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

template <TropicalValue T>
Matrix<T> minplus_identity(std::size_t n) {
  Matrix<T> m(n, T::infinity());
  for (std::size_t i = 0; i < n; ++i) m(i, i) = T::zero();
  return m;
}

// One row of A * B: out[j] = min_k a_row[k] + B(k, j). The witness is the
// smallest minimizing k, or kNoWitness when the entry is infinite.
template <TropicalValue T>
void minplus_row(std::span<const T> a_row, const Matrix<T>& b, std::span<T> out,
                 std::span<std::uint32_t> witness = {}) {
  const auto n = b.size();
  for (std::size_t j = 0; j < n; ++j) out[j] = T::infinity();
  if (!witness.empty())
    for (std::size_t j = 0; j < n; ++j) witness[j] = kNoWitness;
  for (std::size_t k = 0; k < n; ++k) {
    if (a_row[k].is_inf()) continue;
    const auto b_row = b.row(k);
    for (std::size_t j = 0; j < n; ++j) {
      if (b_row[j].is_inf()) continue;
      const T cand = a_row[k] + b_row[j];
      if (cand < out[j]) {
        out[j] = cand;
        if (!witness.empty()) witness[j] = static_cast<std::uint32_t>(k);
      }
    }
  }
}

template <TropicalValue T>
struct WitnessedProduct {
  Matrix<T> product;
  Matrix<std::uint32_t> witness;
};

template <TropicalValue T>
WitnessedProduct<T> distance_product_with_witness(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("distance product of " + std::to_string(a.size()) + "x" +
                            std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                            "x" + std::to_string(b.size()) + " matrices");
  const auto n = a.size();
  WitnessedProduct<T> out{Matrix<T>(n, T::infinity()), Matrix<std::uint32_t>(n, kNoWitness)};
  for (std::size_t i = 0; i < n; ++i) minplus_row<T>(a.row(i), b, out.product.row(i), out.witness.row(i));
  return out;
}

template <TropicalValue T>
Matrix<T> distance_product(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.size() != b.size())
    throw DimensionMismatch("distance product of " + std::to_string(a.size()) + "x" +
                            std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                            "x" + std::to_string(b.size()) + " matrices");
  const auto n = a.size();
  Matrix<T> out(n, T::infinity());
  for (std::size_t i = 0; i < n; ++i) minplus_row<T>(a.row(i), b, out.row(i));
  return out;
}

}  // namespace sndp

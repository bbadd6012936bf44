#pragma once

// Fixed-width bit packing for simulated messages.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <vector>

#include "sndp/errors.hpp"

namespace sndp {

// ceil(log2(x)) for x >= 1; ceil_log2(1) == 0.
constexpr unsigned ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0u : static_cast<unsigned>(std::bit_width(x - 1));
}

// Width of a field able to hold every value in 0..max_value (at least 1).
constexpr unsigned bits_for(std::uint64_t max_value) {
  return max_value == 0 ? 1u : static_cast<unsigned>(std::bit_width(max_value));
}

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
  return (a + b - 1) / b;
}

// Append-only bit string with random-access reads. Used both for single
// network messages and for multi-message payloads before chunking.
class BitString {
 public:
  std::size_t size() const noexcept { return bits_; }
  bool empty() const noexcept { return bits_ == 0; }

  void push(std::uint64_t value, unsigned width) {
    if (width > 64) throw Error("field wider than 64 bits");
    if (width < 64 && (value >> width) != 0)
      throw Error("value does not fit its field width");
    if (width == 0) return;
    const unsigned offset = bits_ % 64;
    if (offset == 0) words_.push_back(0);
    words_.back() |= value << offset;
    if (offset + width > 64) words_.push_back(value >> (64 - offset));
    bits_ += width;
  }

  void push_bit(bool bit) {
    if (bits_ % 64 == 0) words_.push_back(0);
    if (bit) words_.back() |= std::uint64_t{1} << (bits_ % 64);
    ++bits_;
  }

  bool bit(std::size_t i) const {
    if (i >= bits_) throw Error("bit read past end of string");
    return (words_[i / 64] >> (i % 64)) & 1u;
  }

  std::uint64_t read(std::size_t offset, unsigned width) const {
    if (width > 64 || offset + width > bits_)
      throw Error("field read past end of string");
    if (width == 0) return 0;
    const std::size_t w = offset / 64;
    const unsigned shift = offset % 64;
    std::uint64_t v = words_[w] >> shift;
    if (shift + width > 64) v |= words_[w + 1] << (64 - shift);
    return width == 64 ? v : v & ((std::uint64_t{1} << width) - 1);
  }

  void append(const BitString& other) {
    std::size_t i = 0;
    for (; i + 64 <= other.size(); i += 64) push(other.read(i, 64), 64);
    if (i < other.size()) {
      const auto rest = static_cast<unsigned>(other.size() - i);
      push(other.read(i, rest), rest);
    }
  }

  // Up to `count` bits starting at `offset` (clamped to the end).
  BitString slice(std::size_t offset, std::size_t count) const {
    BitString out;
    const std::size_t end = std::min(bits_, offset + count);
    for (std::size_t i = offset; i < end; i += 64) {
      const auto w = static_cast<unsigned>(std::min<std::size_t>(64, end - i));
      out.push(read(i, w), w);
    }
    return out;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t bits_ = 0;
};

// Sequential reader over a BitString.
class BitReader {
 public:
  explicit BitReader(const BitString& s) : s_(&s) {}
  std::uint64_t take(unsigned width) {
    auto v = s_->read(pos_, width);
    pos_ += width;
    return v;
  }
  bool take_bit() { return s_->bit(pos_++); }
  std::size_t remaining() const { return s_->size() - pos_; }

 private:
  const BitString* s_;
  std::size_t pos_ = 0;
};

}  // namespace sndp

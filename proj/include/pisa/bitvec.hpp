/* Copyright 2026-present the pisasim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PISA_BITVEC_HPP
#define PISA_BITVEC_HPP

#include <cstdint>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pisa {

/// Fixed-width bit vector in network order: bit 0 is the most significant
/// bit, exactly as it appears first on the wire. Values are stored
/// big-endian, right-aligned in ceil(width/8) bytes; the unused high bits
/// of the first byte are always zero.
///
/// This is the currency of the whole pipeline: header instances, lookup
/// keys, ternary values/masks and action operands are all BitVecs.
class BitVec {
 public:
  BitVec() = default;

  explicit BitVec(uint32_t width) : width_(width), bytes_((width + 7) / 8, 0) {}

  static BitVec from_u64(uint64_t value, uint32_t width) {
    BitVec v(width);
    if (width < 64 && (width == 0 ? value != 0 : (value >> width) != 0))
      throw std::invalid_argument("value does not fit in " + std::to_string(width) + " bits");
    for (size_t i = 0; i < v.bytes_.size() && i < 8; ++i)
      v.bytes_[v.bytes_.size() - 1 - i] = static_cast<uint8_t>(value >> (8 * i));
    v.mask_top();
    return v;
  }

  /// Extracts `width` bits starting at `bit_offset` within `data`,
  /// counting bits in wire order from the first byte's MSB.
  static BitVec from_bytes(std::span<const uint8_t> data, size_t bit_offset, uint32_t width) {
    if (bit_offset + width > data.size() * 8)
      throw std::out_of_range("bit extraction past end of data");
    BitVec v(width);
    if (bit_offset % 8 == 0 && width % 8 == 0) {
      const size_t first = bit_offset / 8;
      for (size_t i = 0; i < width / 8; ++i) v.bytes_[i] = data[first + i];
      return v;
    }
    for (uint32_t i = 0; i < width; ++i) {
      const size_t pos = bit_offset + i;
      const bool b = (data[pos / 8] >> (7 - pos % 8)) & 1;
      v.set_bit(i, b);
    }
    return v;
  }

  /// Parses a hex literal (optional 0x prefix); the width is 4 bits per
  /// digit, so "0x0800" is a 16-bit vector and "0x800" a 12-bit one.
  static BitVec from_hex(std::string_view hex) {
    if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
    if (hex.empty()) throw std::invalid_argument("empty hex literal");
    BitVec v(static_cast<uint32_t>(hex.size() * 4));
    // odd digit counts leave the first nibble in the low half of byte 0
    size_t nibble = v.bytes_.size() * 2 - hex.size();
    for (char c : hex) {
      const int d = hex_digit(c);
      if (d < 0) throw std::invalid_argument(std::string("bad hex digit '") + c + "'");
      v.bytes_[nibble / 2] |= static_cast<uint8_t>(nibble % 2 ? d : d << 4);
      ++nibble;
    }
    return v;
  }

  /// Parses hex into an exact target width; fails if the value needs more
  /// bits than `width`.
  static std::optional<BitVec> parse_hex(std::string_view hex, uint32_t width) {
    BitVec raw;
    try {
      raw = from_hex(hex);
    } catch (const std::invalid_argument&) {
      return std::nullopt;
    }
    if (raw.width_ <= width) return raw.zext(width);
    // wider literal is fine as long as the excess bits are zero
    for (uint32_t i = 0; i < raw.width_ - width; ++i)
      if (raw.bit(i)) return std::nullopt;
    return raw.slice(raw.width_ - width, width);
  }

  uint32_t width() const { return width_; }
  bool empty() const { return width_ == 0; }
  const std::vector<uint8_t>& bytes() const { return bytes_; }

  bool bit(uint32_t i) const {
    check_index(i);
    const size_t pos = bytes_.size() * 8 - width_ + i;
    return (bytes_[pos / 8] >> (7 - pos % 8)) & 1;
  }

  void set_bit(uint32_t i, bool v) {
    check_index(i);
    const size_t pos = bytes_.size() * 8 - width_ + i;
    const uint8_t m = static_cast<uint8_t>(1u << (7 - pos % 8));
    if (v)
      bytes_[pos / 8] |= m;
    else
      bytes_[pos / 8] &= static_cast<uint8_t>(~m);
  }

  uint64_t to_u64() const {
    if (width_ > 64) throw std::logic_error("to_u64 on a vector wider than 64 bits");
    uint64_t v = 0;
    for (uint8_t b : bytes_) v = (v << 8) | b;
    return v;
  }

  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    const size_t ndigits = (width_ + 3) / 4;
    std::string out(ndigits, '0');
    for (size_t i = 0; i < ndigits; ++i) {
      const size_t nibble = bytes_.size() * 2 - ndigits + i;
      const uint8_t byte = bytes_[nibble / 2];
      out[i] = digits[nibble % 2 ? (byte & 0xf) : (byte >> 4)];
    }
    return out;
  }

  BitVec slice(uint32_t bit_offset, uint32_t width) const {
    if (bit_offset + width > width_) throw std::out_of_range("slice past end of vector");
    BitVec v(width);
    for (uint32_t i = 0; i < width; ++i) v.set_bit(i, bit(bit_offset + i));
    return v;
  }

  void write_slice(uint32_t bit_offset, const BitVec& value) {
    if (bit_offset + value.width_ > width_) throw std::out_of_range("write past end of vector");
    for (uint32_t i = 0; i < value.width_; ++i) set_bit(bit_offset + i, value.bit(i));
  }

  /// Concatenation; `this` supplies the most significant bits.
  BitVec concat(const BitVec& rhs) const {
    BitVec v(width_ + rhs.width_);
    for (uint32_t i = 0; i < width_; ++i) v.set_bit(i, bit(i));
    for (uint32_t i = 0; i < rhs.width_; ++i) v.set_bit(width_ + i, rhs.bit(i));
    return v;
  }

  BitVec zext(uint32_t width) const {
    if (width < width_) throw std::invalid_argument("zext cannot narrow");
    BitVec v(width);
    v.write_slice(width - width_, *this);
    return v;
  }

  // Modular arithmetic in this vector's width. Operands must already have
  // matching widths; the action engine zero-extends before calling.
  BitVec add(const BitVec& rhs) const {
    check_same_width(rhs);
    BitVec v(width_);
    unsigned carry = 0;
    for (size_t i = bytes_.size(); i-- > 0;) {
      const unsigned s = bytes_[i] + rhs.bytes_[i] + carry;
      v.bytes_[i] = static_cast<uint8_t>(s);
      carry = s >> 8;
    }
    v.mask_top();
    return v;
  }

  BitVec sub(const BitVec& rhs) const {
    check_same_width(rhs);
    BitVec v(width_);
    int borrow = 0;
    for (size_t i = bytes_.size(); i-- > 0;) {
      const int d = int(bytes_[i]) - int(rhs.bytes_[i]) - borrow;
      v.bytes_[i] = static_cast<uint8_t>(d & 0xff);
      borrow = d < 0 ? 1 : 0;
    }
    v.mask_top();
    return v;
  }

  BitVec and_(const BitVec& rhs) const { return bitwise(rhs, [](uint8_t a, uint8_t b) { return a & b; }); }
  BitVec or_(const BitVec& rhs) const { return bitwise(rhs, [](uint8_t a, uint8_t b) { return a | b; }); }
  BitVec xor_(const BitVec& rhs) const { return bitwise(rhs, [](uint8_t a, uint8_t b) { return a ^ b; }); }

  BitVec not_() const {
    BitVec v(width_);
    for (size_t i = 0; i < bytes_.size(); ++i) v.bytes_[i] = static_cast<uint8_t>(~bytes_[i]);
    v.mask_top();
    return v;
  }

  BitVec shl(uint32_t n) const {
    BitVec v(width_);
    if (n >= width_) return v;
    for (uint32_t i = 0; i + n < width_; ++i) v.set_bit(i, bit(i + n));
    return v;
  }

  BitVec shr(uint32_t n) const {
    BitVec v(width_);
    if (n >= width_) return v;
    for (uint32_t i = n; i < width_; ++i) v.set_bit(i, bit(i - n));
    return v;
  }

  /// Unsigned comparison; widths may differ (the shorter value is
  /// conceptually zero-extended). Returns -1, 0 or 1.
  int compare(const BitVec& rhs) const {
    const size_t n = std::max(bytes_.size(), rhs.bytes_.size());
    for (size_t i = n; i-- > 0;) {
      const uint8_t a = i < bytes_.size() ? bytes_[bytes_.size() - 1 - i] : 0;
      // index i counts from the least significant byte
      const uint8_t b = i < rhs.bytes_.size() ? rhs.bytes_[rhs.bytes_.size() - 1 - i] : 0;
      if (a != b) return a < b ? -1 : 1;
    }
    return 0;
  }

  bool is_zero() const {
    for (uint8_t b : bytes_)
      if (b) return false;
    return true;
  }

  bool operator==(const BitVec&) const = default;

 private:
  static int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  template <typename F>
  BitVec bitwise(const BitVec& rhs, F f) const {
    check_same_width(rhs);
    BitVec v(width_);
    for (size_t i = 0; i < bytes_.size(); ++i) v.bytes_[i] = static_cast<uint8_t>(f(bytes_[i], rhs.bytes_[i]));
    return v;
  }

  void mask_top() {
    if (width_ % 8 && !bytes_.empty()) bytes_[0] &= static_cast<uint8_t>(0xff >> (8 - width_ % 8));
  }

  void check_index(uint32_t i) const {
    if (i >= width_) throw std::out_of_range("bit index out of range");
  }

  void check_same_width(const BitVec& rhs) const {
    if (rhs.width_ != width_) throw std::invalid_argument("width mismatch");
  }

  uint32_t width_ = 0;
  std::vector<uint8_t> bytes_;
};

/// Seeded 64-bit hash over a byte span (murmur3 finalizer as the mixer).
/// The match-table module instantiates this twice with independent seeds.
inline uint64_t mix64(uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

inline uint64_t hash_bytes(std::span<const uint8_t> data, uint64_t seed) {
  uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
  size_t i = 0;
  for (; i + 8 <= data.size(); i += 8) {
    uint64_t chunk = 0;
    for (size_t j = 0; j < 8; ++j) chunk |= uint64_t(data[i + j]) << (8 * j);
    h = mix64(h ^ chunk);
  }
  uint64_t tail = 0;
  for (size_t j = 0; i + j < data.size(); ++j) tail |= uint64_t(data[i + j]) << (8 * j);
  return mix64(h ^ tail ^ (uint64_t(data.size()) << 56));
}

}  // namespace pisa

#endif  // PISA_BITVEC_HPP

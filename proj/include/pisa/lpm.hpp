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

#ifndef PISA_LPM_HPP
#define PISA_LPM_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pisa/bitvec.hpp"

namespace pisa {

/// A route prefix: the top `length` bits of `bits` are significant, the
/// rest must be zero. length == 0 is the default route.
struct Prefix {
  BitVec bits;
  uint32_t length = 0;
  std::string action_ref;
  BitVec action_data;

  static Prefix make(BitVec bits, uint32_t length, std::string action_ref = "", BitVec action_data = {}) {
    if (length > bits.width()) throw std::invalid_argument("prefix length exceeds key width");
    for (uint32_t i = length; i < bits.width(); ++i)
      if (bits.bit(i)) throw std::invalid_argument("prefix has nonzero bits beyond its length");
    return {std::move(bits), length, std::move(action_ref), std::move(action_data)};
  }

  bool matches(const BitVec& key) const {
    for (uint32_t i = 0; i < length; ++i)
      if (key.bit(i) != bits.bit(i)) return false;
    return true;
  }
};

struct LpmMatch {
  Prefix prefix;
  std::string action_ref;
  BitVec action_data;
};

enum class LpmOutcome { Inserted, Replaced };

/// Longest-prefix match on a binary trie, one level per key bit starting
/// from the most significant. Update cost is O(length); nodes are kept in
/// a flat arena. Lookups walk at most W levels and remember the deepest
/// stored prefix on the path.
class LpmTrie {
 public:
  explicit LpmTrie(uint32_t key_width) : key_width_(key_width) { nodes_.emplace_back(); }

  uint32_t key_width() const { return key_width_; }
  size_t size() const { return size_; }

  /// Allocated trie nodes, root included. Bounded by 1 + sum of the
  /// inserted prefix lengths.
  size_t node_count() const { return nodes_.size(); }

  LpmOutcome insert(const Prefix& p) {
    check(p);
    size_t node = 0;
    for (uint32_t d = 0; d < p.length; ++d) {
      const int dir = p.bits.bit(d) ? 1 : 0;
      if (nodes_[node].child[dir] == kNone) {
        nodes_[node].child[dir] = nodes_.size();
        nodes_.emplace_back();
      }
      node = nodes_[node].child[dir];
    }
    const bool had = nodes_[node].has_entry;
    nodes_[node].has_entry = true;
    nodes_[node].prefix = p;
    if (!had) ++size_;
    return had ? LpmOutcome::Replaced : LpmOutcome::Inserted;
  }

  std::optional<LpmMatch> lookup(const BitVec& key) const {
    if (key.width() != key_width_) throw std::invalid_argument("key width mismatch");
    const Prefix* best = nodes_[0].has_entry ? &nodes_[0].prefix : nullptr;
    size_t node = 0;
    for (uint32_t d = 0; d < key_width_; ++d) {
      const size_t next = nodes_[node].child[key.bit(d) ? 1 : 0];
      if (next == kNone) break;
      node = next;
      if (nodes_[node].has_entry) best = &nodes_[node].prefix;
    }
    if (!best) return std::nullopt;
    return LpmMatch{*best, best->action_ref, best->action_data};
  }

  bool erase(const BitVec& bits, uint32_t length) {
    size_t node = 0;
    for (uint32_t d = 0; d < length; ++d) {
      const size_t next = nodes_[node].child[bits.bit(d) ? 1 : 0];
      if (next == kNone) return false;
      node = next;
    }
    if (!nodes_[node].has_entry) return false;
    nodes_[node].has_entry = false;
    nodes_[node].prefix = Prefix{};
    --size_;
    return true;
  }

 private:
  static constexpr size_t kNone = ~size_t(0);

  struct Node {
    size_t child[2] = {kNone, kNone};
    bool has_entry = false;
    Prefix prefix;
  };

  void check(const Prefix& p) const {
    if (p.bits.width() != key_width_) throw std::invalid_argument("prefix width mismatch");
    if (p.length > key_width_) throw std::invalid_argument("prefix length exceeds key width");
  }

  uint32_t key_width_;
  std::vector<Node> nodes_;
  size_t size_ = 0;
};

}  // namespace pisa

#endif  // PISA_LPM_HPP

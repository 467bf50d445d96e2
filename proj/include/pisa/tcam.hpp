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

#ifndef PISA_TCAM_HPP
#define PISA_TCAM_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pisa/bits.hpp"
#include "pisa/bitvec.hpp"

namespace pisa {

/// A ternary rule: value/mask pair plus a priority. Mask bit 1 means the
/// key bit must equal the value bit; don't-care bits are stored as zero
/// (normalized on construction). Larger priority wins; ties break toward
/// the lowest slot index.
struct TernaryRule {
  BitVec value;
  BitVec mask;
  uint32_t priority = 0;
  std::string action_ref;
  BitVec action_data;

  static TernaryRule make(BitVec value, BitVec mask, uint32_t priority, std::string action_ref = "",
                          BitVec action_data = {}) {
    if (value.width() != mask.width()) throw std::invalid_argument("value/mask width mismatch");
    TernaryRule r;
    r.value = value.and_(mask);  // keep the invariant: don't-care bits zero
    r.mask = std::move(mask);
    r.priority = priority;
    r.action_ref = std::move(action_ref);
    r.action_data = std::move(action_data);
    return r;
  }

  bool matches(const BitVec& key) const { return key.and_(mask) == value; }
};

struct TcamMatch {
  size_t slot = 0;
  uint32_t priority = 0;
  std::string action_ref;
  BitVec action_data;
};

/// Soft TCAM emulated with transposed memories: the key is split into
/// P = ceil(W/w) chunks and each chunk addresses a small memory whose
/// words are N-bit bitmaps of the rules consistent with that chunk value.
/// A lookup ANDs the P bitmaps and priority-encodes the survivors.
///
/// When w does not divide W the last chunk is narrower (2^(W mod w)
/// addressable words), but memory accounting still charges a full-depth
/// primitive per chunk: memory_bits() == ceil(W/w) * 2^w * N.
class TransposedTcam {
 public:
  TransposedTcam(uint32_t key_width, uint64_t capacity, uint32_t chunk_width)
      : key_width_(key_width), capacity_(capacity), chunk_width_(chunk_width) {
    if (key_width_ < 1) throw std::invalid_argument("key width must be at least 1");
    if (chunk_width_ < 1 || chunk_width_ > key_width_)
      throw std::invalid_argument("chunk width must be in 1..key width");
    if (chunk_width_ > 28) throw std::invalid_argument("chunk width above 28 bits is not practical to emulate");
    for (uint32_t off = 0; off < key_width_; off += chunk_width_) {
      Chunk c;
      c.offset = off;
      c.width = std::min(chunk_width_, key_width_ - off);
      c.words.assign(size_t(1) << c.width, MatchBitmap(capacity_));
      chunks_.push_back(std::move(c));
    }
    slots_.resize(capacity_);
  }

  uint32_t key_width() const { return key_width_; }
  uint64_t capacity() const { return capacity_; }
  uint32_t chunk_width() const { return chunk_width_; }
  size_t chunk_count() const { return chunks_.size(); }
  size_t size() const { return size_; }

  /// Emulated memory in bits: P chunk memories of 2^w words, each word an
  /// N-bit bitmap. The narrow tail chunk still burns a full primitive.
  uint64_t memory_bits() const {
    return uint64_t(chunks_.size()) * (uint64_t(1) << chunk_width_) * capacity_;
  }

  enum class Outcome { Inserted, Full };

  Outcome insert(const TernaryRule& rule) {
    if (rule.value.width() != key_width_) throw std::invalid_argument("rule width mismatch");
    if (!rule.value.and_(rule.mask.not_()).is_zero())
      throw std::invalid_argument("rule has nonzero don't-care bits");
    size_t slot = 0;
    while (slot < slots_.size() && slots_[slot].occupied) ++slot;
    if (slot == slots_.size()) return Outcome::Full;

    for (auto& c : chunks_) {
      const uint64_t value = rule.value.slice(c.offset, c.width).to_u64();
      const uint64_t mask = rule.mask.slice(c.offset, c.width).to_u64();
      for (uint64_t addr = 0; addr < c.words.size(); ++addr)
        if ((addr & mask) == value) c.words[addr].set(slot);
    }
    slots_[slot].occupied = true;
    slots_[slot].rule = rule;
    ++size_;
    return Outcome::Inserted;
  }

  std::optional<TcamMatch> lookup(const BitVec& key) const {
    if (key.width() != key_width_) throw std::invalid_argument("key width mismatch");
    MatchBitmap acc = chunks_[0].words[chunk_addr(chunks_[0], key)];
    for (size_t i = 1; i < chunks_.size(); ++i) acc.and_with(chunks_[i].words[chunk_addr(chunks_[i], key)]);

    std::optional<TcamMatch> best;
    acc.for_each_set([&](size_t slot) {
      const StoredRule& s = slots_[slot];
      if (!s.occupied) return;  // cannot happen: erase clears bit columns
      if (!best || s.rule.priority > best->priority)
        best = TcamMatch{slot, s.rule.priority, s.rule.action_ref, s.rule.action_data};
    });
    return best;
  }

  /// Clears the slot's bit column across every chunk word. O(P * 2^w).
  bool erase(size_t slot) {
    if (slot >= slots_.size() || !slots_[slot].occupied) return false;
    for (auto& c : chunks_)
      for (auto& word : c.words) word.reset(slot);
    slots_[slot] = StoredRule{};
    --size_;
    return true;
  }

  bool erase(const BitVec& value, const BitVec& mask) {
    for (size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i].occupied && slots_[i].rule.value == value && slots_[i].rule.mask == mask) return erase(i);
    return false;
  }

  const TernaryRule* rule_at(size_t slot) const {
    return slot < slots_.size() && slots_[slot].occupied ? &slots_[slot].rule : nullptr;
  }

  /// Read-only probe into the transposed memory, for tests asserting the
  /// bitmap population law.
  bool chunk_bit(size_t chunk, uint64_t addr, size_t slot) const {
    return chunks_.at(chunk).words.at(addr).test(slot);
  }

  uint64_t chunk_words(size_t chunk) const { return chunks_.at(chunk).words.size(); }

 private:
  struct Chunk {
    uint32_t offset = 0;  // bit offset within the key, wire order
    uint32_t width = 0;
    std::vector<MatchBitmap> words;
  };

  struct StoredRule {
    bool occupied = false;
    TernaryRule rule;
  };

  uint64_t chunk_addr(const Chunk& c, const BitVec& key) const {
    return key.slice(c.offset, c.width).to_u64();
  }

  uint32_t key_width_;
  uint64_t capacity_;
  uint32_t chunk_width_;
  std::vector<Chunk> chunks_;
  std::vector<StoredRule> slots_;
  size_t size_ = 0;
};

}  // namespace pisa

#endif  // PISA_TCAM_HPP

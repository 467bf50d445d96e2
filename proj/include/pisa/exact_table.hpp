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

#ifndef PISA_EXACT_TABLE_HPP
#define PISA_EXACT_TABLE_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pisa/bitvec.hpp"

namespace pisa {

struct ExactEntry {
  BitVec key;
  std::string action_ref;
  BitVec action_data;
};

enum class InsertOutcome { Inserted, Replaced, Full };

/// Exact-match table: a two-choice cuckoo hash table with 4-slot buckets
/// and random-walk eviction. The two hash functions are independently
/// seeded instances of a 64-bit mixing hash; seeds are fixed per table
/// for determinism and overridable for statistical tests.
///
/// Single writer; concurrent lookups are safe only between mutations.
class ExactTable {
 public:
  static constexpr size_t kSlotsPerBucket = 4;
  static constexpr int kKickBudget = 500;

  ExactTable(uint32_t key_width, uint64_t capacity, uint64_t seed = 0x243f6a8885a308d3ULL)
      : key_width_(key_width),
        capacity_(capacity),
        nbuckets_((capacity + kSlotsPerBucket - 1) / kSlotsPerBucket),
        slots_(nbuckets_ * kSlotsPerBucket),
        seed1_(mix64(seed)),
        seed2_(mix64(seed ^ 0x452821e638d01377ULL)),
        rng_(seed) {
    if (capacity_ < 1) throw std::invalid_argument("capacity must be at least 1");
  }

  uint32_t key_width() const { return key_width_; }
  uint64_t capacity() const { return capacity_; }
  size_t size() const { return size_; }
  double load_factor() const { return double(size_) / double(capacity_); }

  InsertOutcome insert(const ExactEntry& entry) {
    check_key(entry.key);
    if (Slot* s = find_slot(entry.key)) {
      s->entry = entry;  // same key: replace the action binding
      return InsertOutcome::Replaced;
    }
    if (size_ >= capacity_) return InsertOutcome::Full;
    if (place(entry)) {
      ++size_;
      return InsertOutcome::Inserted;
    }
    return InsertOutcome::Full;
  }

  std::optional<ExactEntry> lookup(const BitVec& key) const {
    check_key(key);
    probes_ = 0;
    const Slot* s = find_slot(key);
    if (!s) return std::nullopt;
    return s->entry;
  }

  bool erase(const BitVec& key) {
    check_key(key);
    if (Slot* s = find_slot(key)) {
      s->occupied = false;
      s->entry = ExactEntry{};
      --size_;
      return true;
    }
    return false;
  }

  /// Buckets touched by the most recent lookup; the cuckoo contract is
  /// that this never exceeds 2.
  size_t last_lookup_probes() const { return probes_; }

 private:
  struct Slot {
    bool occupied = false;
    ExactEntry entry;
  };

  void check_key(const BitVec& key) const {
    if (key.width() != key_width_) throw std::invalid_argument("key width mismatch");
  }

  uint64_t bucket1(const BitVec& key) const { return hash_bytes(key.bytes(), seed1_) % nbuckets_; }
  uint64_t bucket2(const BitVec& key) const { return hash_bytes(key.bytes(), seed2_) % nbuckets_; }

  Slot* slot_at(uint64_t bucket, size_t i) { return &slots_[bucket * kSlotsPerBucket + i]; }
  const Slot* slot_at(uint64_t bucket, size_t i) const { return &slots_[bucket * kSlotsPerBucket + i]; }

  const Slot* scan_bucket(uint64_t bucket, const BitVec& key) const {
    ++probes_;
    for (size_t i = 0; i < kSlotsPerBucket; ++i) {
      const Slot* s = slot_at(bucket, i);
      if (s->occupied && s->entry.key == key) return s;
    }
    return nullptr;
  }

  const Slot* find_slot(const BitVec& key) const {
    if (const Slot* s = scan_bucket(bucket1(key), key)) return s;
    const uint64_t b2 = bucket2(key);
    if (b2 != bucket1(key))
      if (const Slot* s = scan_bucket(b2, key)) return s;
    return nullptr;
  }
  Slot* find_slot(const BitVec& key) { return const_cast<Slot*>(std::as_const(*this).find_slot(key)); }

  bool place_in_bucket(uint64_t bucket, const ExactEntry& e) {
    for (size_t i = 0; i < kSlotsPerBucket; ++i) {
      Slot* s = slot_at(bucket, i);
      if (!s->occupied) {
        s->occupied = true;
        s->entry = e;
        return true;
      }
    }
    return false;
  }

  /// Random-walk cuckoo insertion. On kick-budget exhaustion the whole
  /// displacement chain is undone, so Full never loses a stored entry.
  bool place(const ExactEntry& entry) {
    ExactEntry pending = entry;
    struct Move {
      uint64_t bucket;
      size_t slot;
    };
    std::vector<Move> journal;

    for (int kick = 0; kick <= kKickBudget; ++kick) {
      const uint64_t b1 = bucket1(pending.key);
      const uint64_t b2 = bucket2(pending.key);
      if (place_in_bucket(b1, pending) || place_in_bucket(b2, pending)) return true;
      const uint64_t victim_bucket = (rng_() & 1) ? b1 : b2;
      const size_t victim_slot = rng_() % kSlotsPerBucket;
      Slot* s = slot_at(victim_bucket, victim_slot);
      std::swap(pending, s->entry);
      journal.push_back({victim_bucket, victim_slot});
    }

    // roll back: walk the eviction chain in reverse
    for (size_t i = journal.size(); i-- > 0;) {
      Slot* s = slot_at(journal[i].bucket, journal[i].slot);
      std::swap(pending, s->entry);
    }
    return false;
  }

  uint32_t key_width_;
  uint64_t capacity_;
  uint64_t nbuckets_;
  std::vector<Slot> slots_;
  uint64_t seed1_, seed2_;
  std::mt19937_64 rng_;
  size_t size_ = 0;
  mutable size_t probes_ = 0;
};

}  // namespace pisa

#endif  // PISA_EXACT_TABLE_HPP

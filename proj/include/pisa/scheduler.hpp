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

#ifndef PISA_SCHEDULER_HPP
#define PISA_SCHEDULER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "pisa/bits.hpp"

namespace pisa {

/// A scheduling unit: packet reference, rank (smaller dequeues earlier)
/// and the arrival sequence number used as the FIFO tie-break.
struct RankedEntry {
  uint64_t rank = 0;
  uint64_t pkt = 0;  // opaque packet reference (buffer handle)
  uint64_t seq = 0;

  friend bool operator<(const RankedEntry& a, const RankedEntry& b) {
    return a.rank != b.rank ? a.rank < b.rank : a.seq < b.seq;
  }
  bool operator==(const RankedEntry&) const = default;
};

enum class PushOutcome { Ok, Full };

/// Push-in-first-out queue, reference semantics: each push lands at its
/// (rank, seq)-sorted position, pops take the head. Single-threaded.
class PifoQueue {
 public:
  explicit PifoQueue(size_t capacity) : capacity_(capacity) {}

  size_t capacity() const { return capacity_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  PushOutcome push(const RankedEntry& e) {
    if (entries_.size() >= capacity_) return PushOutcome::Full;
    entries_.insert(e);
    return PushOutcome::Ok;
  }

  std::optional<RankedEntry> pop() {
    if (entries_.empty()) return std::nullopt;
    RankedEntry e = *entries_.begin();
    entries_.erase(entries_.begin());
    return e;
  }

  std::optional<RankedEntry> peek() const {
    if (entries_.empty()) return std::nullopt;
    return *entries_.begin();
  }

 private:
  size_t capacity_;
  std::set<RankedEntry> entries_;  // (rank, seq) is unique per queue
};

/// Cycle-stepped model of a systolic priority queue: an array of cells
/// sorted by waves of parallel compare-swaps on adjacent pairs, the wave
/// parity alternating each step. A push shifts the occupied region right
/// and lands in cell 0; a pop takes cell 0 and shifts left. Both reset
/// the wave parity so the next step compares the head pair, which keeps
/// the head holding the global minimum within one step of a single
/// push/pop from a settled state.
class SystolicQueue {
 public:
  explicit SystolicQueue(size_t capacity) : cells_(capacity) {}

  size_t capacity() const { return cells_.size(); }
  size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  PushOutcome push(const RankedEntry& e) {
    if (size_ >= cells_.size()) return PushOutcome::Full;
    for (size_t i = size_; i > 0; --i) cells_[i] = cells_[i - 1];
    cells_[0] = e;
    ++size_;
    even_phase_ = true;
    return PushOutcome::Ok;
  }

  std::optional<RankedEntry> pop() {
    if (size_ == 0) return std::nullopt;
    RankedEntry e = *cells_[0];
    for (size_t i = 0; i + 1 < size_; ++i) cells_[i] = cells_[i + 1];
    cells_[--size_].reset();
    even_phase_ = true;
    return e;
  }

  std::optional<RankedEntry> head() const { return size_ ? cells_[0] : std::optional<RankedEntry>{}; }

  /// One compare-swap wave over the occupied region; returns the number
  /// of swaps performed this cycle.
  size_t step() {
    size_t swaps = 0;
    for (size_t i = even_phase_ ? 0 : 1; i + 1 < size_; i += 2) {
      if (*cells_[i + 1] < *cells_[i]) {
        std::swap(cells_[i], cells_[i + 1]);
        ++swaps;
      }
    }
    even_phase_ = !even_phase_;
    return swaps;
  }

  /// Runs waves until a full even+odd round performs no swaps.
  size_t settle() {
    size_t total = 0;
    for (;;) {
      const size_t a = step();
      const size_t b = step();
      total += a + b;
      if (a + b == 0) return total;
    }
  }

  bool quiescent() const {
    for (size_t i = 0; i + 1 < size_; ++i)
      if (*cells_[i + 1] < *cells_[i]) return false;
    return true;
  }

  const std::optional<RankedEntry>& cell(size_t i) const { return cells_.at(i); }

 private:
  std::vector<std::optional<RankedEntry>> cells_;
  size_t size_ = 0;
  bool even_phase_ = true;
};

enum class CamOp { Eq, Lt, Gt };

/// A hard CAM primitive: every occupied entry is compared against the
/// key with one fixed operation (=, < or >, entry-vs-key), producing a
/// match vector with bit i set for entry i.
class CamPrimitive {
 public:
  CamPrimitive(CamOp op, size_t entries, uint32_t key_bits)
      : op_(op), key_bits_(key_bits), values_(entries, 0), occupied_(entries, false) {
    if (key_bits_ < 1 || key_bits_ > 64) throw std::invalid_argument("CAM key width must be 1..64");
  }

  CamOp op() const { return op_; }
  size_t entries() const { return values_.size(); }
  uint32_t key_bits() const { return key_bits_; }

  void write(size_t i, uint64_t value) {
    check(i, value);
    values_[i] = value;
    occupied_[i] = true;
  }

  void erase(size_t i) {
    occupied_.at(i) = false;
    values_[i] = 0;
  }

  MatchBitmap match(uint64_t key) const {
    if (key_bits_ < 64 && (key >> key_bits_)) throw std::invalid_argument("key wider than the CAM");
    MatchBitmap out(values_.size());
    for (size_t i = 0; i < values_.size(); ++i) {
      if (!occupied_[i]) continue;
      const bool hit = op_ == CamOp::Eq ? values_[i] == key
                       : op_ == CamOp::Lt ? values_[i] < key
                                          : values_[i] > key;
      if (hit) out.set(i);
    }
    return out;
  }

 private:
  void check(size_t i, uint64_t value) const {
    if (i >= values_.size()) throw std::out_of_range("CAM entry index");
    if (key_bits_ < 64 && (value >> key_bits_)) throw std::invalid_argument("value wider than the CAM");
  }

  CamOp op_;
  uint32_t key_bits_;
  std::vector<uint64_t> values_;
  std::vector<bool> occupied_;
};

/// Range-search CAM built from exactly two CAM primitives plus glue
/// logic: entry i holds [lo_i, hi_i] and matches keys enclosed in the
/// range. lo_i <= key is realized as NOT(lo_i > key) on a '>' primitive,
/// hi_i >= key as NOT(hi_i < key) on a '<' one.
class RangeCam {
 public:
  RangeCam(size_t entries, uint32_t key_bits)
      : lo_(CamOp::Gt, entries, key_bits), hi_(CamOp::Lt, entries, key_bits), occupied_(entries, false) {}

  size_t entries() const { return occupied_.size(); }
  const CamPrimitive& lo_primitive() const { return lo_; }
  const CamPrimitive& hi_primitive() const { return hi_; }

  void write(size_t i, uint64_t lo, uint64_t hi) {
    if (lo > hi) throw std::invalid_argument("empty range");
    lo_.write(i, lo);
    hi_.write(i, hi);
    occupied_.at(i) = true;
  }

  void erase(size_t i) {
    lo_.erase(i);
    hi_.erase(i);
    occupied_.at(i) = false;
  }

  /// Match vector: bit i set iff entry i is occupied and lo_i <= key <= hi_i.
  MatchBitmap match(uint64_t key) const {
    MatchBitmap out(occupied_.size());
    for (size_t i = 0; i < occupied_.size(); ++i)
      if (occupied_[i]) out.set(i);
    out = out.and_not(lo_.match(key));  // drop entries with lo > key
    out = out.and_not(hi_.match(key));  // drop entries with hi < key
    return out;
  }

  std::vector<size_t> lookup(uint64_t key) const {
    std::vector<size_t> hits;
    match(key).for_each_set([&](size_t i) { hits.push_back(i); });
    return hits;
  }

 private:
  CamPrimitive lo_;  // stores lo bounds, op '>'
  CamPrimitive hi_;  // stores hi bounds, op '<'
  std::vector<bool> occupied_;
};

enum class AdmitStatus { Stored, Dropped };

struct AdmitResult {
  AdmitStatus status = AdmitStatus::Dropped;
  uint64_t handle = 0;

  bool stored() const { return status == AdmitStatus::Stored; }
};

/// Byte-accounted packet buffer: packets are stored while scheduled and
/// released at emission. Admission fails (and is counted by the caller)
/// when the occupancy would exceed the capacity. Releasing an unknown
/// handle is a contract violation and throws.
class PacketBuffer {
 public:
  explicit PacketBuffer(uint64_t capacity_bytes) : capacity_(capacity_bytes) {}

  uint64_t capacity_bytes() const { return capacity_; }
  uint64_t occupancy_bytes() const { return occupancy_; }
  uint64_t high_water_bytes() const { return high_water_; }
  size_t stored_packets() const { return store_.size(); }

  AdmitResult admit(std::vector<uint8_t> pkt) {
    if (occupancy_ + pkt.size() > capacity_) return {AdmitStatus::Dropped, 0};
    const uint64_t handle = next_handle_++;
    occupancy_ += pkt.size();
    high_water_ = std::max(high_water_, occupancy_);
    store_.emplace(handle, std::move(pkt));
    return {AdmitStatus::Stored, handle};
  }

  std::vector<uint8_t> release(uint64_t handle) {
    auto it = store_.find(handle);
    if (it == store_.end()) throw std::logic_error("release of unknown buffer handle");
    std::vector<uint8_t> pkt = std::move(it->second);
    occupancy_ -= pkt.size();
    store_.erase(it);
    return pkt;
  }

 private:
  uint64_t capacity_;
  uint64_t occupancy_ = 0;
  uint64_t high_water_ = 0;
  uint64_t next_handle_ = 1;
  std::map<uint64_t, std::vector<uint8_t>> store_;
};

}  // namespace pisa

#endif  // PISA_SCHEDULER_HPP

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

#ifndef PISA_BITS_HPP
#define PISA_BITS_HPP

#include <bit>
#include <cstdint>
#include <vector>

namespace pisa {

/// Dense bitmap over 64-bit words; the match-vector currency of the
/// emulated TCAM and the CAM primitives.
class MatchBitmap {
 public:
  MatchBitmap() = default;
  explicit MatchBitmap(size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  size_t size() const { return nbits_; }

  void set(size_t i) { words_[i / 64] |= uint64_t(1) << (i % 64); }
  void reset(size_t i) { words_[i / 64] &= ~(uint64_t(1) << (i % 64)); }
  bool test(size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }

  void set_all() {
    for (auto& w : words_) w = ~uint64_t(0);
    trim();
  }

  void and_with(const MatchBitmap& other) {
    for (size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  }

  MatchBitmap and_not(const MatchBitmap& other) const {
    MatchBitmap r(nbits_);
    for (size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] & ~other.words_[i];
    r.trim();
    return r;
  }

  bool none() const {
    for (uint64_t w : words_)
      if (w) return false;
    return true;
  }

  size_t count() const {
    size_t n = 0;
    for (uint64_t w : words_) n += std::popcount(w);
    return n;
  }

  template <typename F>
  void for_each_set(F f) const {
    for (size_t wi = 0; wi < words_.size(); ++wi) {
      uint64_t w = words_[wi];
      while (w) {
        const int b = std::countr_zero(w);
        f(wi * 64 + b);
        w &= w - 1;
      }
    }
  }

  bool operator==(const MatchBitmap&) const = default;

 private:
  void trim() {
    if (nbits_ % 64 && !words_.empty()) words_.back() &= (uint64_t(1) << (nbits_ % 64)) - 1;
  }

  size_t nbits_ = 0;
  std::vector<uint64_t> words_;
};

}  // namespace pisa

#endif  // PISA_BITS_HPP

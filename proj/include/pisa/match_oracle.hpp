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

#ifndef PISA_MATCH_ORACLE_HPP
#define PISA_MATCH_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "pisa/lpm.hpp"
#include "pisa/tcam.hpp"

namespace pisa {

/// Linear-scan reference semantics for the emulated match structures.
/// These apply the mask/prefix definitions directly and exist so the
/// emulations can be checked against something with no shared machinery.

/// Highest priority wins; ties break toward the lowest index.
inline std::optional<size_t> oracle_ternary(const std::vector<TernaryRule>& rules, const BitVec& key) {
  std::optional<size_t> best;
  const auto& kb = key.bytes();
  for (size_t i = 0; i < rules.size(); ++i) {
    const TernaryRule& r = rules[i];
    if (best && r.priority <= rules[*best].priority) continue;
    const auto& vb = r.value.bytes();
    const auto& mb = r.mask.bytes();
    bool hit = true;
    for (size_t j = 0; j < kb.size(); ++j)
      if ((kb[j] & mb[j]) != vb[j]) {
        hit = false;
        break;
      }
    if (hit) best = i;
  }
  return best;
}

/// Longest matching prefix wins; ties break toward the lowest index
/// (duplicate prefixes aside, ties cannot occur).
inline std::optional<size_t> oracle_lpm(const std::vector<Prefix>& prefixes, const BitVec& key) {
  std::optional<size_t> best;
  uint32_t best_len = 0;
  const auto& kb = key.bytes();
  // Storage is right-aligned; the pad bits above the value are zero in
  // both operands, so comparing storage bits [0, pad + length) is exactly
  // the prefix comparison regardless of key-width alignment.
  const uint32_t pad = static_cast<uint32_t>(kb.size() * 8) - key.width();
  for (size_t i = 0; i < prefixes.size(); ++i) {
    const Prefix& p = prefixes[i];
    if (best && p.length <= best_len) continue;
    const auto& pb = p.bits.bytes();
    const uint32_t span = pad + p.length;
    const uint32_t full = span / 8;
    bool hit = true;
    for (uint32_t j = 0; j < full; ++j)
      if (kb[j] != pb[j]) {
        hit = false;
        break;
      }
    if (hit && span % 8) {
      const uint8_t m = static_cast<uint8_t>(0xff << (8 - span % 8));
      if ((kb[full] & m) != (pb[full] & m)) hit = false;
    }
    if (hit) {
      best = i;
      best_len = p.length;
    }
  }
  return best;
}

/// Encodes a prefix as a ternary rule with priority = prefix length, the
/// reduction that makes LPM a sub-case of ternary match.
inline TernaryRule ternary_from_prefix(const Prefix& p) {
  BitVec mask(p.bits.width());
  for (uint32_t i = 0; i < p.length; ++i) mask.set_bit(i, true);
  return TernaryRule::make(p.bits, mask, p.length, p.action_ref, p.action_data);
}

}  // namespace pisa

#endif  // PISA_MATCH_ORACLE_HPP

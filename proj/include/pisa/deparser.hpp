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

#ifndef PISA_DEPARSER_HPP
#define PISA_DEPARSER_HPP

#include <string>
#include <vector>

#include "pisa/packet.hpp"

namespace pisa {

/// Emits the headers that are valid at deparse time, in emission-sequence
/// order, followed by the payload. Invalid headers contribute nothing; an
/// all-invalid set emits the payload alone.
inline std::vector<uint8_t> deparse(const ParsedPacket& pp, const std::vector<std::string>& sequence) {
  std::vector<uint8_t> out;
  for (const auto& name : sequence) {
    if (name == kMetaHeader || !pp.valid(name)) continue;
    auto it = pp.header_values.find(name);
    if (it == pp.header_values.end()) continue;
    const auto& bytes = it->second.bytes();
    out.insert(out.end(), bytes.begin(), bytes.end());
  }
  out.insert(out.end(), pp.payload.begin(), pp.payload.end());
  return out;
}

}  // namespace pisa

#endif  // PISA_DEPARSER_HPP

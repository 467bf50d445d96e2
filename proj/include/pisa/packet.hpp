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

#ifndef PISA_PACKET_HPP
#define PISA_PACKET_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pisa/bitvec.hpp"
#include "pisa/spec.hpp"

namespace pisa {

struct Packet {
  std::vector<uint8_t> bytes;
  uint64_t arrival_seq = 0;
  uint32_t ingress_port = 0;
};

/// The unit flowing between pipeline stages: extracted header instances,
/// their validity flags, metadata, and the unparsed payload.
struct ParsedPacket {
  std::map<std::string, BitVec> header_values;  // includes "meta"
  std::map<std::string, bool> validity;
  std::vector<uint8_t> payload;
  Packet origin;

  bool valid(const std::string& header) const {
    if (header == kMetaHeader) return true;
    auto it = validity.find(header);
    return it != validity.end() && it->second;
  }

  void make_valid(const std::string& header, BitVec value) {
    validity[header] = true;
    header_values[header] = std::move(value);
  }

  void make_invalid(const std::string& header) {
    validity[header] = false;
    header_values.erase(header);
  }
};

/// Reads a field of a valid header; nullopt when the header is invalid.
inline std::optional<BitVec> read_field(const PipelineSpec& spec, const ParsedPacket& pp, const FieldRef& ref) {
  if (!pp.valid(ref.header)) return std::nullopt;
  const HeaderType* h = spec.header(ref.header);
  if (!h) return std::nullopt;
  auto off = h->field_offset(ref.field);
  if (!off) return std::nullopt;
  auto it = pp.header_values.find(ref.header);
  if (it == pp.header_values.end()) return std::nullopt;
  return it->second.slice(*off, h->field(ref.field)->width);
}

/// Writes a field of a valid header; false when the header is invalid.
inline bool write_field(const PipelineSpec& spec, ParsedPacket& pp, const FieldRef& ref, const BitVec& value) {
  if (!pp.valid(ref.header)) return false;
  const HeaderType* h = spec.header(ref.header);
  if (!h) return false;
  auto off = h->field_offset(ref.field);
  if (!off) return false;
  auto it = pp.header_values.find(ref.header);
  if (it == pp.header_values.end()) return false;
  it->second.write_slice(*off, value);
  return true;
}

/// Creates the always-valid zeroed metadata pseudo-header for a packet.
inline void init_metadata(const PipelineSpec& spec, ParsedPacket& pp) {
  pp.make_valid(kMetaHeader, BitVec(spec.metadata.total_bits()));
}

}  // namespace pisa

#endif  // PISA_PACKET_HPP

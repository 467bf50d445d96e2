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

#ifndef PISA_PARSER_HPP
#define PISA_PARSER_HPP

#include <optional>
#include <string>
#include <variant>

#include "pisa/packet.hpp"
#include "pisa/spec.hpp"

namespace pisa {

/// Per-packet parse outcomes. These are data, not process failures: a
/// truncated or unroutable packet is marked for drop and accounted.
enum class ParseStatus { Ok, Truncated, NoTransition };

struct ParseResult {
  ParseStatus status = ParseStatus::Ok;
  std::string at_header;  // where extraction or selection failed
  ParsedPacket packet;    // meaningful only when status == Ok

  bool ok() const { return status == ParseStatus::Ok; }
};

/// Walks the parse DAG over the packet bytes. At each node the header is
/// extracted and marked valid, the selector field read, and the matching
/// edge followed (else the default edge; a node with value edges but no
/// match and no default yields NoTransition; a node with no edges at all
/// accepts). Pure function of (bytes, graph, headers).
inline ParseResult parse(const Packet& pkt, const ParseGraph& graph, const PipelineSpec& spec) {
  ParseResult res;
  res.packet.origin = pkt;
  init_metadata(spec, res.packet);

  size_t cursor_bits = 0;
  const size_t total_bits = pkt.bytes.size() * 8;
  std::string current = graph.start;
  size_t visited = 0;

  while (current != kAcceptNode) {
    if (++visited > graph.nodes.size()) {
      // unreachable for validated (acyclic) graphs
      res.status = ParseStatus::NoTransition;
      res.at_header = current;
      return res;
    }
    const ParseNode* node = graph.node(current);
    const HeaderType* h = spec.header(current);
    if (!node || !h) {
      res.status = ParseStatus::NoTransition;
      res.at_header = current;
      return res;
    }
    if (cursor_bits + h->total_bits() > total_bits) {
      res.status = ParseStatus::Truncated;
      res.at_header = current;
      return res;
    }
    res.packet.make_valid(current, BitVec::from_bytes(pkt.bytes, cursor_bits, h->total_bits()));
    cursor_bits += h->total_bits();

    if (node->transitions.empty() && !node->fallback) break;  // leaf: accept

    std::optional<std::string> next;
    if (!node->transitions.empty()) {
      const auto off = h->field_offset(node->selector);
      const uint64_t sel = res.packet.header_values[current].slice(*off, h->field(node->selector)->width).to_u64();
      if (const std::string* to = node->next_for(sel)) next = *to;
    }
    if (!next && node->fallback) next = *node->fallback;
    if (!next) {
      res.status = ParseStatus::NoTransition;
      res.at_header = current;
      return res;
    }
    current = *next;
  }

  res.packet.payload.assign(pkt.bytes.begin() + cursor_bits / 8, pkt.bytes.end());
  return res;
}

/// Failure mode of extract_key: a key field names a header the packet
/// does not carry. The table lookup is skipped and the miss path applies.
struct KeyResult {
  std::optional<BitVec> key;
  std::string invalid_header;  // set when key is nullopt

  bool ok() const { return key.has_value(); }
};

/// Concatenates the key fields in declaration order, most significant
/// field first. The result width is exactly the sum of the field widths.
inline KeyResult extract_key(const PipelineSpec& spec, const ParsedPacket& pp,
                             const std::vector<FieldRef>& key_fields) {
  BitVec key(0);
  for (const auto& ref : key_fields) {
    auto v = read_field(spec, pp, ref);
    if (!v) return {std::nullopt, ref.header};
    key = key.concat(*v);
  }
  return {std::move(key), ""};
}

}  // namespace pisa

#endif  // PISA_PARSER_HPP

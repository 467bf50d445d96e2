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

#ifndef PISA_TESTS_FIXTURES_HPP
#define PISA_TESTS_FIXTURES_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pisa/packet.hpp"
#include "pisa/spec_io.hpp"

namespace pisa::test {

inline std::filesystem::path scenarios_dir() { return PISA_SCENARIOS_DIR; }

inline PipelineSpec load_scenario(const std::string& name) {
  return load_pipeline_spec_file((scenarios_dir() / name).string());
}

inline std::vector<uint8_t> bytes_from_hex(const std::string& hex) {
  std::vector<uint8_t> out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<uint8_t>(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
  return out;
}

// 74-byte Eth/IPv4/UDP packet (ttl 64, proto 17, sport 5353, dport 7777,
// 32-byte payload). Hand-built; offsets and the header checksum were
// cross-checked with an independent dissector before freezing.
inline const char* kT0PacketHex =
    "02aabbcc000102aabbcc000208004500003c0001400040114e74c0000201c633640714e91e6100280000"
    "a0a1a2a3a4a5a6a7a8a9aaabacadaeafb0b1b2b3b4b5b6b7b8b9babbbcbdbebf";

// 116-byte Eth/VLAN/VLAN/IPv4/UDP/VXLAN/Eth/IPv4 stack with a 24-byte
// payload; same provenance as above (offsets 0/14/18/22/42/50/58/72/92).
inline const char* kT1PacketHex =
    "02aabbcc000102aabbcc000281000064810000c808004500005e0001400040114e52c0000201c6336407"
    "14e912b5004a00000800000000002a0002ddeeff000102ddeeff000208004500002c0001400009fd5cd2"
    "0a0000010a000002a0a1a2a3a4a5a6a7a8a9aaabacadaeafb0b1b2b3b4b5b6b7";

inline Packet make_packet(const std::string& hex, uint64_t seq = 0, uint32_t port = 1) {
  return Packet{bytes_from_hex(hex), seq, port};
}

}  // namespace pisa::test

#endif  // PISA_TESTS_FIXTURES_HPP

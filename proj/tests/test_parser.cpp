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

#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "pisa/deparser.hpp"
#include "pisa/parser.hpp"
#include "support/fixtures.hpp"

using namespace pisa;
using pisa::test::bytes_from_hex;
using pisa::test::load_scenario;
using pisa::test::make_packet;

TEST_CASE("74-byte packet under the t0 graph yields 3 valid headers") {
  PipelineSpec spec = load_scenario("t0.json");
  ParseResult r = parse(make_packet(test::kT0PacketHex), spec.parse_graph, spec);
  REQUIRE(r.ok());
  CHECK(r.packet.valid("eth"));
  CHECK(r.packet.valid("ipv4"));
  CHECK(r.packet.valid("udp"));
  CHECK(r.packet.payload.size() == 32);

  CHECK(read_field(spec, r.packet, {"eth", "ethertype"})->to_u64() == 0x0800);
  CHECK(read_field(spec, r.packet, {"ipv4", "ttl"})->to_u64() == 64);
  CHECK(read_field(spec, r.packet, {"ipv4", "proto"})->to_u64() == 17);
  CHECK(read_field(spec, r.packet, {"ipv4", "dst_addr"})->to_u64() == 0xC6336407);
  CHECK(read_field(spec, r.packet, {"udp", "dst_port"})->to_u64() == 7777);
}

TEST_CASE("short packet truncates at the header being extracted") {
  PipelineSpec spec = load_scenario("t0.json");
  Packet p{std::vector<uint8_t>(10, 0xab), 0, 1};
  ParseResult r = parse(p, spec.parse_graph, spec);
  CHECK(r.status == ParseStatus::Truncated);
  CHECK(r.at_header == "eth");

  // long enough for eth but not ipv4
  std::vector<uint8_t> bytes = bytes_from_hex(test::kT0PacketHex);
  bytes.resize(20);
  ParseResult r2 = parse(Packet{bytes, 1, 1}, spec.parse_graph, spec);
  CHECK(r2.status == ParseStatus::Truncated);
  CHECK(r2.at_header == "ipv4");
}

TEST_CASE("unknown ethertype with no default edge is NoTransition") {
  PipelineSpec spec = load_scenario("t0.json");
  std::vector<uint8_t> bytes = bytes_from_hex(test::kT0PacketHex);
  bytes[12] = 0x86;  // ethertype 0x86dd, no edge for it
  bytes[13] = 0xdd;
  ParseResult r = parse(Packet{bytes, 0, 1}, spec.parse_graph, spec);
  CHECK(r.status == ParseStatus::NoTransition);
  CHECK(r.at_header == "eth");
}

TEST_CASE("t1 stack parses all 8 headers") {
  PipelineSpec spec = load_scenario("t1.json");
  ParseResult r = parse(make_packet(test::kT1PacketHex), spec.parse_graph, spec);
  REQUIRE(r.ok());
  for (const char* h : {"eth", "vlan_outer", "vlan_inner", "ipv4", "udp", "vxlan", "eth_inner", "ipv4_inner"})
    CHECK(r.packet.valid(h));
  CHECK(r.packet.payload.size() == 24);
  CHECK(read_field(spec, r.packet, {"vlan_outer", "vid"})->to_u64() == 100);
  CHECK(read_field(spec, r.packet, {"vlan_inner", "vid"})->to_u64() == 200);
  CHECK(read_field(spec, r.packet, {"vxlan", "vni"})->to_u64() == 42);
}

TEST_CASE("parse is deterministic and bounded by the node count") {
  PipelineSpec spec = load_scenario("t1.json");
  std::mt19937_64 rng(3);
  for (int it = 0; it < 200; ++it) {
    std::vector<uint8_t> bytes(rng() % 160 + 1);
    for (auto& b : bytes) b = static_cast<uint8_t>(rng());
    Packet p{bytes, 0, 1};
    ParseResult a = parse(p, spec.parse_graph, spec);
    ParseResult b = parse(p, spec.parse_graph, spec);
    CHECK(a.status == b.status);
    if (a.ok()) {
      CHECK(a.packet.header_values == b.packet.header_values);
      size_t valid = 0;
      uint64_t extracted_bits = 0;
      for (const auto& [name, is_valid] : a.packet.validity) {
        if (name == kMetaHeader || !is_valid) continue;
        ++valid;
        extracted_bits += spec.header(name)->total_bits();
      }
      CHECK(valid <= spec.parse_graph.nodes.size());
      // the cursor only ever advances
      CHECK(extracted_bits + a.packet.payload.size() * 8 == bytes.size() * 8);
    }
  }
}

TEST_CASE("extract_key concatenates most significant field first") {
  PipelineSpec spec = load_scenario("t0.json");
  ParseResult r = parse(make_packet(test::kT0PacketHex), spec.parse_graph, spec);
  REQUIRE(r.ok());

  SECTION("single 32-bit field is a direct copy") {
    // build a one-off key from ipv4.dst 198.51.100.7; the doc example value
    KeyResult k = extract_key(spec, r.packet, {{"ipv4", "dst_addr"}});
    REQUIRE(k.ok());
    CHECK(k.key->width() == 32);
    CHECK(k.key->to_u64() == 0xC6336407);
  }

  SECTION("ethertype | proto concatenation") {
    KeyResult k = extract_key(spec, r.packet, {{"eth", "ethertype"}, {"ipv4", "proto"}});
    REQUIRE(k.ok());
    CHECK(k.key->width() == 24);
    CHECK(k.key->to_u64() == 0x080011);
  }

  SECTION("key through an invalid header is refused") {
    PipelineSpec t1 = load_scenario("t1.json");
    ParseResult plain = parse(make_packet(test::kT0PacketHex), t1.parse_graph, t1);
    REQUIRE(plain.ok());
    REQUIRE_FALSE(plain.packet.valid("vlan_outer"));
    KeyResult k = extract_key(t1, plain.packet, {{"vlan_outer", "vid"}});
    CHECK_FALSE(k.ok());
    CHECK(k.invalid_header == "vlan_outer");
  }
}

TEST_CASE("parse then deparse is the identity on untouched packets") {
  PipelineSpec t0 = load_scenario("t0.json");
  PipelineSpec t1 = load_scenario("t1.json");
  for (const auto& [spec, hex] :
       std::initializer_list<std::pair<const PipelineSpec&, const char*>>{
           {t0, test::kT0PacketHex}, {t1, test::kT0PacketHex}, {t1, test::kT1PacketHex}}) {
    Packet p = make_packet(hex);
    ParseResult r = parse(p, spec.parse_graph, spec);
    REQUIRE(r.ok());
    CHECK(deparse(r.packet, spec.deparse_sequence) == p.bytes);
  }
}

TEST_CASE("ipv4 192.0.2.1 reads as 0xC0000201") {
  PipelineSpec spec = load_scenario("t0.json");
  ParseResult r = parse(make_packet(test::kT0PacketHex), spec.parse_graph, spec);
  REQUIRE(r.ok());
  CHECK(read_field(spec, r.packet, {"ipv4", "src_addr"})->to_u64() == 0xC0000201);
}

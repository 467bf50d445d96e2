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

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "pisa/action.hpp"
#include "pisa/runner.hpp"
#include "support/fixtures.hpp"

using namespace pisa;
using pisa::test::load_scenario;
namespace fs = std::filesystem;

namespace {

std::vector<TraceRecord> read_trace_file(const std::string& name) {
  std::ifstream in(test::scenarios_dir() / name);
  REQUIRE(in.good());
  return read_input_trace(in);
}

bool ipv4_sums_ok(const PipelineSpec& spec, const std::vector<uint8_t>& bytes) {
  ParseResult r = parse(Packet{bytes, 0, 0}, spec.parse_graph, spec);
  if (!r.ok()) return false;
  for (const char* h : {"ipv4", "ipv4_inner"}) {
    if (!r.packet.valid(h)) continue;
    const auto& hdr = r.packet.header_values.at(h).bytes();
    uint32_t total = 0;
    for (size_t i = 0; i < 20; i += 2) total += (uint32_t(hdr[i]) << 8) | hdr[i + 1];
    while (total >> 16) total = (total & 0xffff) + (total >> 16);
    if (total != 0xFFFF) return false;
  }
  return true;
}

int run_tool(const std::string& args, std::string* output = nullptr) {
  const std::string out_file = (fs::temp_directory_path() / "pisasim_test_out.txt").string();
  const std::string cmd = std::string(PISA_TOOL_PATH) + " " + args + " > " + out_file + " 2>&1";
  const int rc = std::system(cmd.c_str());
  if (output) {
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    *output = ss.str();
  }
  return WEXITSTATUS(rc);
}

std::string scenario_path(const std::string& name) { return (test::scenarios_dir() / name).string(); }

}  // namespace

TEST_CASE("t0 is the identity pipeline") {
  PipelineSpec spec = load_scenario("t0.json");
  auto input = read_trace_file("t0_in.trace");
  REQUIRE(input.size() == 100);

  PipelineRuntime runtime(spec);
  auto out = runtime.run(input);
  CHECK(out.stats.packets_in == 100);
  CHECK(out.stats.forwarded == 100);
  CHECK(out.stats.dropped_total() == 0);
  REQUIRE(out.records.size() == 100);
  for (size_t i = 0; i < 100; ++i) {
    CHECK(out.records[i].forwarded());
    CHECK(out.records[i].seq == input[i].seq);  // fifo keeps arrival order
    CHECK(out.records[i].bytes == input[i].bytes);
  }
}

TEST_CASE("t2 decrements ttl and keeps checksums self-verifying") {
  PipelineSpec spec = load_scenario("t2.json");
  auto input = read_trace_file("t2_in.trace");
  PipelineRuntime runtime(spec);
  auto out = runtime.run(input);

  CHECK(out.stats.dropped_by_reason.at(kDropByRule) == 2);  // the two ttl=1 packets
  CHECK(out.stats.forwarded == input.size() - 2);

  std::map<uint64_t, const TraceRecord*> by_seq;
  for (const auto& r : out.records) by_seq[r.seq] = &r;

  for (const auto& in_rec : input) {
    const TraceRecord* rec = by_seq.at(in_rec.seq);
    ParseResult before = parse(Packet{in_rec.bytes, 0, 0}, spec.parse_graph, spec);
    REQUIRE(before.ok());
    const uint64_t ttl = read_field(spec, before.packet, {"ipv4", "ttl"})->to_u64();
    if (ttl == 1) {
      CHECK_THAT(rec->disposition, Catch::Matchers::StartsWith("dropped:"));
      continue;
    }
    REQUIRE(rec->forwarded());
    ParseResult after = parse(Packet{rec->bytes, 0, 0}, spec.parse_graph, spec);
    REQUIRE(after.ok());
    CHECK(read_field(spec, after.packet, {"ipv4", "ttl"})->to_u64() == ttl - 1);
    CHECK(ipv4_sums_ok(spec, rec->bytes));
  }
}

TEST_CASE("table hit and miss accounting") {
  PipelineSpec spec = load_scenario("t3.json");
  auto input = read_trace_file("t3_in.trace");
  PipelineRuntime runtime(spec);
  auto out = runtime.run(input);

  CHECK(out.stats.tables.at("flow_em").hits == 4);
  CHECK(out.stats.tables.at("flow_em").misses == 2);
  CHECK(out.stats.tables.at("ttl_policy").hits == 0);   // no ttl=1 packets here
  CHECK(out.stats.tables.at("ttl_policy").misses == 6);
  CHECK(out.stats.forwarded == 6);
}

TEST_CASE("default-drop table drops every miss") {
  PipelineSpec spec = load_scenario("t4.json");
  auto input = read_trace_file("t4_in.trace");
  PipelineRuntime runtime(spec);
  auto out = runtime.run(input);

  CHECK(out.stats.dropped_by_reason.at(kDropTableMiss) == 2);
  CHECK(out.stats.forwarded == 4);

  SECTION("with the rules removed, everything is dropped(miss)") {
    PipelineSpec bare = spec;
    bare.tables[1].entries_file.clear();
    PipelineRuntime rt(bare);
    auto all_miss = rt.run(input);
    CHECK(all_miss.stats.forwarded == 0);
    CHECK(all_miss.stats.dropped_by_reason.at(kDropTableMiss) == input.size());
  }
}

TEST_CASE("pifo scenario emits in rank order") {
  PipelineSpec spec = load_scenario("t5.json");
  auto input = read_trace_file("t5_in.trace");
  PipelineRuntime runtime(spec);
  auto out = runtime.run(input);
  REQUIRE(out.stats.forwarded == input.size());

  // ranks from the chain: seq1, seq4 -> 1; seq0, seq5 -> 2; seq2, seq3 -> 3
  std::vector<uint64_t> emitted;
  for (const auto& r : out.records) emitted.push_back(r.seq);
  CHECK(emitted == std::vector<uint64_t>{1, 4, 0, 5, 2, 3});
}

TEST_CASE("replay is deterministic") {
  PipelineSpec spec = load_scenario("t4.json");
  auto input = read_trace_file("t4_in.trace");
  PipelineRuntime a(spec), b(spec);
  auto ra = a.run(input);
  auto rb = b.run(input);
  REQUIRE(ra.records.size() == rb.records.size());
  for (size_t i = 0; i < ra.records.size(); ++i) {
    CHECK(ra.records[i].seq == rb.records[i].seq);
    CHECK(ra.records[i].bytes == rb.records[i].bytes);
    CHECK(ra.records[i].disposition == rb.records[i].disposition);
  }
  CHECK(ra.stats.to_json() == rb.stats.to_json());
}

TEST_CASE("conservation: in = forwarded + dropped") {
  for (const char* scen : {"t0.json", "t1.json", "t2.json", "t3.json", "t4.json", "t5.json"}) {
    PipelineSpec spec = load_scenario(scen);
    auto input = read_trace_file(std::string(spec.name) + "_in.trace");
    PipelineRuntime runtime(spec);
    auto out = runtime.run(input);
    INFO(scen);
    CHECK(out.stats.packets_in == out.stats.forwarded + out.stats.dropped_total());
    CHECK(out.records.size() == out.stats.packets_in);
  }
}

TEST_CASE("a systolic scheduler is observationally the pifo pipeline") {
  PipelineSpec spec = load_scenario("t5.json");
  auto input = read_trace_file("t5_in.trace");
  PipelineRuntime pifo_rt(spec);
  spec.scheduler.kind = SchedulerKind::Systolic;
  PipelineRuntime sys_rt(spec);

  auto a = pifo_rt.run(input);
  auto b = sys_rt.run(input);
  REQUIRE(a.records.size() == b.records.size());
  for (size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].seq == b.records[i].seq);
    CHECK(a.records[i].bytes == b.records[i].bytes);
  }
}

TEST_CASE("buffer and queue exhaustion drop with their own reasons") {
  PipelineSpec spec = load_scenario("t0.json");
  auto input = read_trace_file("t0_in.trace");

  SECTION("tiny byte buffer") {
    spec.scheduler.buffer_bytes = 50;  // smaller than any packet in the trace
    PipelineRuntime rt(spec);
    auto out = rt.run(input);
    CHECK(out.stats.forwarded == 0);
    CHECK(out.stats.dropped_by_reason.at(kDropBufferFull) == input.size());
  }

  SECTION("two-entry queue") {
    spec.scheduler.capacity_entries = 2;
    PipelineRuntime rt(spec);
    auto out = rt.run(input);
    CHECK(out.stats.forwarded == 2);
    CHECK(out.stats.dropped_by_reason.at(kDropQueueFull) == input.size() - 2);
    CHECK(out.stats.packets_in == out.stats.forwarded + out.stats.dropped_total());
  }
}

TEST_CASE("drop reasons surface per packet") {
  // proto 6: parses under the shared graph with udp invalid, so the
  // classifier's port comparison faults and the packet is dropped
  const char* tcp_hex =
      "02aabbcc000102aabbcc00020800450000280002400040064e8bc0000207c6336408"
      "b0b1b2b3b4b5b6b7b8b9babbbcbdbebfc0c1c2c3";
  PipelineSpec spec = load_scenario("t5.json");
  TraceRecord rec;
  rec.seq = 0;
  rec.port = 1;
  rec.bytes = test::bytes_from_hex(tcp_hex);
  PipelineRuntime rt(spec);
  auto out = rt.run({rec});
  REQUIRE(out.records.size() == 1);
  CHECK(out.records[0].disposition == std::string("dropped:") + kDropInvalidField);

  // unknown ethertype: no edge and no default at the first node
  PipelineSpec t0 = load_scenario("t0.json");
  rec.bytes[12] = 0x86;
  rec.bytes[13] = 0xdd;
  PipelineRuntime rt0(t0);
  auto out0 = rt0.run({rec});
  REQUIRE(out0.records.size() == 1);
  CHECK(out0.records[0].disposition == std::string("dropped:") + kDropNoTransition);
  CHECK(out0.records[0].bytes == rec.bytes);  // drops preserve the input bytes
}

TEST_CASE("malformed traces raise TraceError") {
  std::istringstream bad_hex("0 1 00zz\n");
  CHECK_THROWS_AS(read_input_trace(bad_hex), TraceError);
  std::istringstream odd("0 1 00f\n");
  CHECK_THROWS_AS(read_input_trace(odd), TraceError);
  std::istringstream nonmono("1 1 0000\n1 1 0000\n");
  CHECK_THROWS_AS(read_input_trace(nonmono), TraceError);
  std::istringstream fields("1 0000\n");
  CHECK_THROWS_AS(read_input_trace(fields), TraceError);
  std::istringstream fine("# comment\n\n0 1 abcd\n5 2 00ff\n");
  CHECK(read_input_trace(fine).size() == 2);
}

// ------------------------------------------------------------------ CLI level

TEST_CASE("cli: validate") {
  CHECK(run_tool("validate " + scenario_path("t2.json")) == 0);
  CHECK(run_tool("validate " + scenario_path("errors/empty_header.json")) == 1);
  CHECK(run_tool("validate /nonexistent/spec.json") == 1);
}

TEST_CASE("cli: run exit codes") {
  const std::string out = (fs::temp_directory_path() / "pisasim_cli_out.trace").string();
  CHECK(run_tool("run " + scenario_path("t0.json") + " " + scenario_path("t0_in.trace") +
                 " --out " + out) == 0);
  CHECK(run_tool("run " + scenario_path("errors/empty_header.json") + " " +
                 scenario_path("t0_in.trace")) == 1);
  CHECK(run_tool("run " + scenario_path("t0.json") + " /nonexistent.trace") == 2);

  // malformed trace file
  const std::string bad = (fs::temp_directory_path() / "pisasim_bad.trace").string();
  std::ofstream(bad) << "0 1 00zz\n";
  CHECK(run_tool("run " + scenario_path("t0.json") + " " + bad) == 2);
}

TEST_CASE("cli: report carries the transistor anchors") {
  std::string text;
  REQUIRE(run_tool("report " + scenario_path("t4.json"), &text) == 0);
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("98304"));
  CHECK_THAT(text, Catch::Matchers::ContainsSubstring("368640"));

  std::string json_text;
  REQUIRE(run_tool("report --json " + scenario_path("t4.json"), &json_text) == 0);
  const auto j = nlohmann::json::parse(json_text);
  CHECK(j["reference_tcam_48x128"]["hard"] == 98304);
  CHECK(j["reference_tcam_48x128"]["soft"] == 368640);

  CHECK(run_tool("report /nonexistent.json") == 1);
}

TEST_CASE("cli: bus sweep csv") {
  std::string csv;
  REQUIRE(run_tool("report --sweep-bus " + scenario_path("t0.json"), &csv) == 0);
  CHECK_THAT(csv, Catch::Matchers::StartsWith("bus_width_bits,frequency_hz"));
  CHECK_THAT(csv, Catch::Matchers::ContainsSubstring("\n2048,"));
  CHECK_THAT(csv, Catch::Matchers::ContainsSubstring("786000000000"));
}

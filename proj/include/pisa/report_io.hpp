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

#ifndef PISA_REPORT_IO_HPP
#define PISA_REPORT_IO_HPP

#include <sstream>
#include <string>

#include <json.hpp>

#include "pisa/cost.hpp"

namespace pisa::cost {

inline nlohmann::json report_to_json(const CostReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["throughput"] = {{"bus_width_bits", r.bus_width_bits},
                     {"frequency_hz", r.frequency_hz},
                     {"frequency_interpolated", r.frequency_interpolated},
                     {"pipes", r.pipes},
                     {"per_pipe_bps", r.per_pipe_throughput_bps},
                     {"aggregate_bps", r.aggregate_throughput_bps}};
  j["tables"] = nlohmann::json::array();
  for (const auto& t : r.tables) {
    nlohmann::json jt{{"name", t.name},
                      {"kind", table_kind_name(t.kind)},
                      {"key_width", t.key_width},
                      {"capacity", t.capacity},
                      {"action_data_bits", t.action_data_bits},
                      {"memory_bits", t.memory_bits}};
    if (t.chunk_width) jt["chunk_width"] = *t.chunk_width;
    if (t.overhead_formula) jt["overhead_formula"] = *t.overhead_formula;
    if (t.overhead_measured) jt["overhead_measured"] = *t.overhead_measured;
    if (t.silicon)
      jt["transistors"] = {{"hard", t.silicon->hard_transistors},
                           {"soft", t.silicon->soft_transistors},
                           {"soft_vs_hard", t.silicon->ratio}};
    if (t.lpm)
      jt["trie"] = {{"nodes", t.lpm->node_count}, {"node_bits", t.lpm->node_bits}};
    j["tables"].push_back(std::move(jt));
  }
  j["total_table_bits"] = r.total_table_bits;
  j["buffers"] = {{"rtt_bytes", r.rtt_buffer_bytes},
                  {"replication_per_port_bytes", r.replication.per_port_bytes},
                  {"replication_total_bytes", r.replication.total_bytes}};
  j["scheduler_cam_bits"] = r.scheduler_cam_bits;
  j["reference_tcam_48x128"] = {{"hard", r.reference_tcam_48x128.hard_transistors},
                                {"soft", r.reference_tcam_48x128.soft_transistors},
                                {"soft_vs_hard", r.reference_tcam_48x128.ratio}};
  j["notes"] = r.notes;
  return j;
}

inline std::string report_to_text(const CostReport& r) {
  std::ostringstream out;
  char line[200];
  out << "cost report: " << (r.scenario.empty() ? "(unnamed)" : r.scenario) << "\n";
  std::snprintf(line, sizeof line, "  %-26s %u bits @ %.3f MHz%s\n", "bus", r.bus_width_bits,
                r.frequency_hz / 1e6, r.frequency_interpolated ? " (interpolated)" : "");
  out << line;
  std::snprintf(line, sizeof line, "  %-26s %.3f Gb/s per pipe, %.3f Gb/s x%u pipes\n", "throughput",
                r.per_pipe_throughput_bps / 1e9, r.aggregate_throughput_bps / 1e9, r.pipes);
  out << line;
  for (const auto& t : r.tables) {
    std::snprintf(line, sizeof line, "  table %-19s %s %ux%llu, %llu bits", t.name.c_str(),
                  table_kind_name(t.kind), t.key_width, static_cast<unsigned long long>(t.capacity),
                  static_cast<unsigned long long>(t.memory_bits));
    out << line;
    if (t.overhead_formula) {
      std::snprintf(line, sizeof line, " (overhead %.3fx formula, %.3fx measured)", *t.overhead_formula,
                    *t.overhead_measured);
      out << line;
    }
    if (t.silicon) {
      std::snprintf(line, sizeof line, "; %llu hard vs %llu soft transistors (%.2fx)",
                    static_cast<unsigned long long>(t.silicon->hard_transistors),
                    static_cast<unsigned long long>(t.silicon->soft_transistors), t.silicon->ratio);
      out << line;
    }
    if (t.lpm) {
      std::snprintf(line, sizeof line, " (%llu trie nodes x %u bits)",
                    static_cast<unsigned long long>(t.lpm->node_count), t.lpm->node_bits);
      out << line;
    }
    out << "\n";
  }
  std::snprintf(line, sizeof line, "  %-26s %llu bits\n", "total table memory",
                static_cast<unsigned long long>(r.total_table_bits));
  out << line;
  std::snprintf(line, sizeof line, "  %-26s %llu B (rtt), %llu B/port + %llu B total (replication)\n",
                "buffers", static_cast<unsigned long long>(r.rtt_buffer_bytes),
                static_cast<unsigned long long>(r.replication.per_port_bytes),
                static_cast<unsigned long long>(r.replication.total_bytes));
  out << line;
  if (r.scheduler_cam_bits) {
    std::snprintf(line, sizeof line, "  %-26s %llu bits\n", "scheduler range CAM",
                  static_cast<unsigned long long>(r.scheduler_cam_bits));
    out << line;
  }
  std::snprintf(line, sizeof line, "  %-26s %llu hard vs %llu soft transistors (%.2fx)\n",
                "reference TCAM 48x128", static_cast<unsigned long long>(r.reference_tcam_48x128.hard_transistors),
                static_cast<unsigned long long>(r.reference_tcam_48x128.soft_transistors),
                r.reference_tcam_48x128.ratio);
  out << line;
  for (const auto& n : r.notes) out << "  note: " << n << "\n";
  return out.str();
}

/// Bus-width sweep for plotting throughput and the resource law: one row
/// per 64-bit step. The resource proxy is relative to a 64-bit bus
/// (resources scale linearly with width); frequency rows between
/// calibration anchors are marked interpolated.
inline std::string sweep_csv(const PlatformConfig& platform) {
  std::ostringstream out;
  out << "bus_width_bits,frequency_hz,throughput_bps,resource_proxy,calibration\n";
  char line[160];
  for (uint32_t w = 64; w <= kMaxBusWidthBits; w += 64) {
    const Frequency f = frequency_for(platform, w);
    std::snprintf(line, sizeof line, "%u,%.1f,%.1f,%.2f,%s\n", w, f.hz, throughput_bps(w, f.hz),
                  double(w) / 64.0, f.interpolated ? "interpolated" : "anchor");
    out << line;
  }
  return out.str();
}

}  // namespace pisa::cost

#endif  // PISA_REPORT_IO_HPP

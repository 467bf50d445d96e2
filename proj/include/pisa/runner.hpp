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

#ifndef PISA_RUNNER_HPP
#define PISA_RUNNER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "pisa/action.hpp"
#include "pisa/deparser.hpp"
#include "pisa/packet.hpp"
#include "pisa/parser.hpp"
#include "pisa/scheduler.hpp"
#include "pisa/spec.hpp"
#include "pisa/tables_io.hpp"
#include "pisa/trace.hpp"

namespace pisa {

// Drop reasons, the vocabulary of output-trace dispositions and stats.
inline constexpr const char* kDropParseTruncated = "parse_truncated";
inline constexpr const char* kDropNoTransition = "parse_no_transition";
inline constexpr const char* kDropInvalidField = "action_invalid_field";
inline constexpr const char* kDropByRule = "drop_action";
inline constexpr const char* kDropTableMiss = "table_miss";
inline constexpr const char* kDropQueueFull = "queue_full";
inline constexpr const char* kDropBufferFull = "buffer_full";

struct TableStats {
  uint64_t hits = 0;
  uint64_t misses = 0;
};

struct RunStats {
  uint64_t packets_in = 0;
  uint64_t forwarded = 0;
  std::map<std::string, uint64_t> dropped_by_reason;
  std::map<std::string, TableStats> tables;
  uint64_t buffer_high_water_bytes = 0;

  uint64_t dropped_total() const {
    uint64_t n = 0;
    for (const auto& [r, c] : dropped_by_reason) n += c;
    return n;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["packets_in"] = packets_in;
    j["forwarded"] = forwarded;
    j["dropped"] = dropped_by_reason;
    j["dropped_total"] = dropped_total();
    nlohmann::json t = nlohmann::json::object();
    for (const auto& [name, s] : tables) t[name] = {{"hits", s.hits}, {"misses", s.misses}};
    j["tables"] = t;
    j["buffer_high_water_bytes"] = buffer_high_water_bytes;
    return j;
  }
};

/// Executes a validated pipeline spec over packet traces: parse, the
/// match-action table sequence, scheduling, deparse. Packets run to
/// completion one at a time in arrival order; the scheduler drains once
/// the input is exhausted, so the output order is the scheduler's
/// emission order. Per-packet drops are data (recorded and counted),
/// never process failures.
class PipelineRuntime {
 public:
  explicit PipelineRuntime(const PipelineSpec& spec, std::optional<uint64_t> seed_override = std::nullopt)
      : spec_(spec),
        seed_(seed_override.value_or(spec.seed)),
        buffer_(spec.scheduler.buffer_bytes) {
    for (const auto& t : spec_.tables) {
      tables_.emplace_back(spec_, t, seed_);
      tables_.back().populate(spec_);
    }
    const size_t cap = spec_.scheduler.capacity_entries;
    if (spec_.scheduler.kind == SchedulerKind::Systolic)
      systolic_.emplace(cap);
    else
      pifo_.emplace(cap);
  }

  struct Output {
    std::vector<TraceRecord> records;
    RunStats stats;
  };

  Output run(const std::vector<TraceRecord>& input) {
    Output out;
    out.stats.packets_in = input.size();
    for (const auto& t : spec_.tables) out.stats.tables[t.name];  // zero rows for every table

    std::unordered_map<uint64_t, TraceRecord> pending;  // buffer handle -> emission skeleton

    for (const auto& rec : input) {
      Packet pkt{rec.bytes, rec.seq, rec.port};
      process_one(pkt, out, pending);
    }

    // input exhausted: drain the scheduler in emission order
    for (;;) {
      std::optional<RankedEntry> e = systolic_ ? systolic_->pop() : pifo_->pop();
      if (systolic_) systolic_->settle();
      if (!e) break;
      TraceRecord rec = std::move(pending.at(e->pkt));
      pending.erase(e->pkt);
      rec.bytes = buffer_.release(e->pkt);
      rec.disposition = "forwarded";
      out.records.push_back(std::move(rec));
      ++out.stats.forwarded;
    }

    out.stats.buffer_high_water_bytes = buffer_.high_water_bytes();
    return out;
  }

 private:
  void drop(const Packet& pkt, Output& out, const char* reason) {
    TraceRecord rec;
    rec.direction = TraceRecord::Direction::Out;
    rec.seq = pkt.arrival_seq;
    rec.port = pkt.ingress_port;
    rec.bytes = pkt.bytes;
    rec.disposition = std::string("dropped:") + reason;
    out.records.push_back(std::move(rec));
    ++out.stats.dropped_by_reason[reason];
  }

  void process_one(const Packet& pkt, Output& out, std::unordered_map<uint64_t, TraceRecord>& pending) {
    ParseResult parsed = parse(pkt, spec_.parse_graph, spec_);
    if (!parsed.ok()) {
      drop(pkt, out, parsed.status == ParseStatus::Truncated ? kDropParseTruncated : kDropNoTransition);
      return;
    }
    ParsedPacket pp = std::move(parsed.packet);

    for (size_t i = 0; i < tables_.size(); ++i) {
      const TableDecl& decl = spec_.tables[i];
      TableStats& ts = out.stats.tables[decl.name];

      std::optional<ActionBinding> binding;
      KeyResult key = extract_key(spec_, pp, decl.key_fields);
      if (key.ok()) binding = tables_[i].lookup(*key.key);
      // an unextractable key (invalid header reference) takes the miss path

      std::string action_ref;
      BitVec action_data;
      if (binding) {
        ++ts.hits;
        action_ref = binding->action_ref;
        action_data = binding->action_data;
      } else {
        ++ts.misses;
        if (decl.default_action.empty()) continue;
        action_ref = decl.default_action;
        if (action_ref == kDropAction) {
          drop(pkt, out, kDropTableMiss);
          return;
        }
        action_data = BitVec(spec_.action(action_ref)->data_bits());  // default actions run with zeroed data
      }

      if (action_ref == kDropAction) {
        drop(pkt, out, kDropByRule);
        return;
      }
      auto [next, status] = execute(spec_, *spec_.action(action_ref), std::move(pp), action_data);
      pp = std::move(next);
      if (!status.ok()) {
        drop(pkt, out, kDropInvalidField);
        return;
      }
    }

    // rank comes from meta.rank when declared; fifo schedulers ignore it
    uint64_t rank = 0;
    if (spec_.scheduler.kind != SchedulerKind::Fifo) {
      if (auto r = read_field(spec_, pp, {kMetaHeader, "rank"})) {
        rank = r->width() <= 64 ? r->to_u64() : 0;
        if (spec_.scheduler.rank_bits < 64) rank &= (uint64_t(1) << spec_.scheduler.rank_bits) - 1;
      }
    }

    AdmitResult admitted = buffer_.admit(deparse(pp, spec_.deparse_sequence));
    if (!admitted.stored()) {
      drop(pkt, out, kDropBufferFull);
      return;
    }

    const RankedEntry entry{rank, admitted.handle, pkt.arrival_seq};
    const PushOutcome pushed = systolic_ ? systolic_->push(entry) : pifo_->push(entry);
    if (systolic_) systolic_->settle();
    if (pushed == PushOutcome::Full) {
      buffer_.release(admitted.handle);
      drop(pkt, out, kDropQueueFull);
      return;
    }

    TraceRecord skeleton;
    skeleton.direction = TraceRecord::Direction::Out;
    skeleton.seq = pkt.arrival_seq;
    skeleton.port = pkt.ingress_port;
    pending.emplace(admitted.handle, std::move(skeleton));
  }

  PipelineSpec spec_;  // runtimes own a copy of their spec
  uint64_t seed_;
  std::vector<MatchTable> tables_;
  PacketBuffer buffer_;
  std::optional<PifoQueue> pifo_;
  std::optional<SystolicQueue> systolic_;
};

}  // namespace pisa

#endif  // PISA_RUNNER_HPP

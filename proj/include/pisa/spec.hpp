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

#ifndef PISA_SPEC_HPP
#define PISA_SPEC_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pisa/bitvec.hpp"

namespace pisa {

// Reserved names in the pipeline description. "meta" is the implicit
// always-valid pseudo-header holding per-packet metadata; "accept" is the
// terminal parse node; "drop" is the builtin table action.
inline constexpr const char* kMetaHeader = "meta";
inline constexpr const char* kAcceptNode = "accept";
inline constexpr const char* kDropAction = "drop";

inline constexpr uint32_t kMaxFieldBits = 128;

// A transposed-memory chunk allocates 2^w words; beyond this the
// emulation stops being representable at desk scale.
inline constexpr uint32_t kMaxChunkBits = 28;

struct FieldDef {
  std::string name;
  uint32_t width = 0;

  bool operator==(const FieldDef&) const = default;
};

/// A fixed-width protocol header: an ordered list of named fields.
class HeaderType {
 public:
  HeaderType() = default;
  HeaderType(std::string name, std::vector<FieldDef> fields)
      : name_(std::move(name)), fields_(std::move(fields)) {
    for (const auto& f : fields_) total_bits_ += f.width;
  }

  const std::string& name() const { return name_; }
  const std::vector<FieldDef>& fields() const { return fields_; }
  uint32_t total_bits() const { return total_bits_; }

  /// Bit offset of a field within the header, in wire order.
  std::optional<uint32_t> field_offset(const std::string& field) const {
    uint32_t off = 0;
    for (const auto& f : fields_) {
      if (f.name == field) return off;
      off += f.width;
    }
    return std::nullopt;
  }

  const FieldDef* field(const std::string& name) const {
    for (const auto& f : fields_)
      if (f.name == name) return &f;
    return nullptr;
  }

  bool operator==(const HeaderType&) const = default;

 private:
  std::string name_;
  std::vector<FieldDef> fields_;
  uint32_t total_bits_ = 0;
};

/// Reference to a field of a header (or of the "meta" pseudo-header).
struct FieldRef {
  std::string header;
  std::string field;

  std::string str() const { return header + "." + field; }
  bool operator==(const FieldRef&) const = default;
  auto operator<=>(const FieldRef&) const = default;
};

/// One parse-graph node: the header extracted at this state, the selector
/// field that drives the transition, explicit (value -> next) edges and an
/// optional default edge. A node with no transitions and no default
/// accepts after extraction.
struct ParseNode {
  std::string header;
  std::string selector;                                   // empty if no value edges
  std::vector<std::pair<uint64_t, std::string>> transitions;
  std::optional<std::string> fallback;                    // the default edge

  const std::string* next_for(uint64_t value) const {
    for (const auto& [v, to] : transitions)
      if (v == value) return &to;
    return nullptr;
  }
};

class ParseGraph {
 public:
  std::string start;
  std::vector<ParseNode> nodes;

  const ParseNode* node(const std::string& header) const {
    for (const auto& n : nodes)
      if (n.header == header) return &n;
    return nullptr;
  }

  /// Kahn topological sort; nullopt if the graph has a cycle.
  std::optional<std::vector<std::string>> topo_order() const {
    std::map<std::string, int> indegree;
    for (const auto& n : nodes) indegree.try_emplace(n.header, 0);
    auto bump = [&](const std::string& to) {
      if (to != kAcceptNode && indegree.count(to)) ++indegree[to];
    };
    for (const auto& n : nodes) {
      for (const auto& [v, to] : n.transitions) bump(to);
      if (n.fallback) bump(*n.fallback);
    }
    std::vector<std::string> ready, order;
    for (const auto& [h, d] : indegree)
      if (d == 0) ready.push_back(h);
    while (!ready.empty()) {
      std::string h = ready.back();
      ready.pop_back();
      order.push_back(h);
      const ParseNode* n = node(h);
      if (!n) continue;
      auto relax = [&](const std::string& to) {
        if (to != kAcceptNode && indegree.count(to) && --indegree[to] == 0) ready.push_back(to);
      };
      for (const auto& [v, to] : n->transitions) relax(to);
      if (n->fallback) relax(*n->fallback);
    }
    if (order.size() != indegree.size()) return std::nullopt;
    return order;
  }
};

enum class TableKind { Exact, Ternary, Lpm };

inline const char* table_kind_name(TableKind k) {
  switch (k) {
    case TableKind::Exact: return "exact";
    case TableKind::Ternary: return "ternary";
    case TableKind::Lpm: return "lpm";
  }
  return "?";
}

struct TableDecl {
  std::string name;
  TableKind kind = TableKind::Exact;
  std::vector<FieldRef> key_fields;
  std::optional<uint32_t> declared_key_width;  // validated against the field sum when present
  uint64_t capacity = 0;
  std::optional<uint32_t> chunk_width;         // ternary only; defaults to log2(lutram_depth)
  std::vector<std::string> actions;
  std::string default_action;                  // "", "drop", or an action name
  std::vector<std::string> entries;            // inline population lines
  std::string entries_file;                    // or a file, relative to the spec document
};

enum class Opcode {
  Add,
  Sub,
  And,
  Or,
  Xor,
  Not,
  ShlConst,
  ShrConst,
  SetField,
  SetValid,
  SetInvalid,
  Select,
  ChecksumIpv4,
};

enum class CmpRel { Eq, Ne, Lt, Gt, Le, Ge };

struct Operand {
  enum Kind { Field, Param, Const } kind = Const;
  FieldRef field;       // Kind::Field
  std::string param;    // Kind::Param
  BitVec constant;      // Kind::Const

  static Operand make_field(FieldRef f) { return {Field, std::move(f), {}, {}}; }
  static Operand make_param(std::string p) { return {Param, {}, std::move(p), {}}; }
  static Operand make_const(BitVec c) { return {Const, {}, {}, std::move(c)}; }
};

struct Comparison {
  Operand lhs;
  CmpRel rel = CmpRel::Eq;
  Operand rhs;
};

struct ActionStep {
  Opcode op = Opcode::SetField;
  FieldRef dst;                   // all ops except SetValid/SetInvalid
  std::string dst_header;         // SetValid/SetInvalid, and the source header of ChecksumIpv4
  std::vector<Operand> srcs;
  uint32_t shift_amount = 0;      // ShlConst/ShrConst; fixed at load time
  std::optional<Comparison> cmp;  // Select
};

struct ActionParam {
  std::string name;
  uint32_t width = 0;
};

/// A straight-line program over header/metadata fields. Per-entry action
/// data binds to `params` in declaration order.
struct ActionProgram {
  std::string name;
  std::vector<ActionParam> params;
  std::vector<ActionStep> steps;

  uint32_t data_bits() const {
    uint32_t n = 0;
    for (const auto& p : params) n += p.width;
    return n;
  }

  std::optional<uint32_t> param_offset(const std::string& name) const {
    uint32_t off = 0;
    for (const auto& p : params) {
      if (p.name == name) return off;
      off += p.width;
    }
    return std::nullopt;
  }

  const ActionParam* param(const std::string& name) const {
    for (const auto& p : params)
      if (p.name == name) return &p;
    return nullptr;
  }
};

enum class SchedulerKind { Fifo, Pifo, Systolic };

inline const char* scheduler_kind_name(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::Fifo: return "fifo";
    case SchedulerKind::Pifo: return "pifo";
    case SchedulerKind::Systolic: return "systolic";
  }
  return "?";
}

struct SchedulerConfig {
  SchedulerKind kind = SchedulerKind::Fifo;
  uint64_t capacity_entries = 1024;
  uint32_t rank_bits = 16;
  uint64_t buffer_bytes = 1'250'000;
};

struct PlatformConfig {
  uint32_t bus_width_bits = 512;
  std::map<uint32_t, double> freq_table;  // bus width -> achievable Hz; empty = default calibration
  uint32_t lutram_depth = 32;
  uint32_t bram_depth = 512;
  uint32_t ports = 1;
  double port_rate_bps = 100e9;
  uint32_t pipes = 1;
  uint32_t max_pkt_bytes = 1518;
  double rtt_seconds = 100e-6;
};

/// The resolved pipeline description. Immutable after load; every other
/// module consumes it read-only.
struct PipelineSpec {
  int format_version = 1;
  std::string name;
  uint64_t seed = 0x9d0f2c13a7b45e61ULL;  // cuckoo hash seeding, overridable per run

  std::vector<HeaderType> headers;
  HeaderType metadata;  // the "meta" pseudo-header, always valid
  ParseGraph parse_graph;
  std::vector<TableDecl> tables;
  std::vector<ActionProgram> actions;
  std::vector<std::string> deparse_sequence;
  SchedulerConfig scheduler;
  PlatformConfig platform;

  std::string source_dir;  // directory of the loaded document, for entries_file resolution

  const HeaderType* header(const std::string& name) const {
    if (name == kMetaHeader) return &metadata;
    for (const auto& h : headers)
      if (h.name() == name) return &h;
    return nullptr;
  }

  const ActionProgram* action(const std::string& name) const {
    for (const auto& a : actions)
      if (a.name == name) return &a;
    return nullptr;
  }

  const TableDecl* table(const std::string& name) const {
    for (const auto& t : tables)
      if (t.name == name) return &t;
    return nullptr;
  }

  /// Width of a resolved field reference; nullopt if it does not resolve.
  std::optional<uint32_t> field_width(const FieldRef& ref) const {
    const HeaderType* h = header(ref.header);
    if (!h) return std::nullopt;
    const FieldDef* f = h->field(ref.field);
    if (!f) return std::nullopt;
    return f->width;
  }

  uint32_t table_key_width(const TableDecl& t) const {
    uint32_t w = 0;
    for (const auto& ref : t.key_fields) w += field_width(ref).value_or(0);
    return w;
  }

  uint32_t table_chunk_width(const TableDecl& t) const {
    if (t.chunk_width) return *t.chunk_width;
    uint32_t w = 0;
    for (uint32_t d = platform.lutram_depth; d > 1; d /= 2) ++w;
    return w == 0 ? 1 : w;
  }

  /// Widest action data any of the table's actions needs.
  uint32_t table_action_data_bits(const TableDecl& t) const {
    uint32_t bits = 0;
    for (const auto& name : t.actions)
      if (const ActionProgram* a = action(name)) bits = std::max(bits, a->data_bits());
    return bits;
  }
};

struct Violation {
  std::string element;
  std::string message;
};

/// Result of validate_spec: empty means the spec honors every invariant.
struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  void add(std::string element, std::string message) {
    violations.push_back({std::move(element), std::move(message)});
  }
  std::string str() const {
    std::string s;
    for (const auto& v : violations) s += v.element + ": " + v.message + "\n";
    return s;
  }
};

inline const std::set<std::string> kReservedNames = {kMetaHeader, kAcceptNode, kDropAction};

/// Checks every structural invariant of a (possibly hand-built) spec.
/// Violations are data, not failures; loading rejects documents whose
/// report is non-empty.
inline ValidationReport validate_spec(const PipelineSpec& spec) {
  ValidationReport r;

  // headers
  std::set<std::string> header_names;
  auto check_fields = [&](const HeaderType& h, const std::string& what) {
    if (h.fields().empty()) {
      r.add(what + " " + h.name(), "empty header (no fields)");
      return;
    }
    std::set<std::string> fnames;
    uint32_t sum = 0;
    for (const auto& f : h.fields()) {
      if (!fnames.insert(f.name).second) r.add(what + " " + h.name(), "duplicate field '" + f.name + "'");
      if (f.width == 0 || f.width > kMaxFieldBits)
        r.add(what + " " + h.name() + "." + f.name,
              "field width must be 1.." + std::to_string(kMaxFieldBits) + " bits");
      sum += f.width;
    }
    if (sum != h.total_bits()) r.add(what + " " + h.name(), "total_bits does not equal the field sum");
  };
  for (const auto& h : spec.headers) {
    if (kReservedNames.count(h.name())) r.add("header " + h.name(), "reserved name");
    if (!header_names.insert(h.name()).second) r.add("header " + h.name(), "duplicate header name");
    check_fields(h, "header");
    if (h.total_bits() % 8 != 0)
      r.add("header " + h.name(), "total width must be a whole number of bytes");
  }
  if (!spec.metadata.fields().empty()) check_fields(spec.metadata, "metadata");

  // parse graph
  const ParseGraph& g = spec.parse_graph;
  if (!spec.header(g.start) || g.start == kMetaHeader)
    r.add("parser", "start node '" + g.start + "' is not a declared header");
  std::set<std::string> node_names;
  std::set<std::string> targets;
  for (const auto& n : g.nodes) {
    const std::string el = "parser node " + n.header;
    if (!node_names.insert(n.header).second) r.add(el, "duplicate node");
    const HeaderType* h = n.header == kMetaHeader ? nullptr : spec.header(n.header);
    if (!h) {
      r.add(el, "not a declared header");
      continue;
    }
    auto check_target = [&](const std::string& to) {
      if (to != kAcceptNode) {
        targets.insert(to);
        if (!g.node(to)) r.add(el, "transition target '" + to + "' is not a parser node");
      }
    };
    if (!n.transitions.empty()) {
      const FieldDef* sel = h->field(n.selector);
      if (!sel)
        r.add(el, "selector '" + n.selector + "' is not a field of " + n.header);
      else if (sel->width > 64)
        r.add(el, "selector wider than 64 bits");
      std::set<uint64_t> seen;
      for (const auto& [v, to] : n.transitions) {
        if (!seen.insert(v).second) r.add(el, "duplicate transition value");
        if (sel && sel->width < 64 && (v >> sel->width) != 0)
          r.add(el, "transition value wider than the selector");
        check_target(to);
      }
    }
    if (n.fallback) check_target(*n.fallback);
  }
  if (node_names.count(g.start) == 0)
    r.add("parser", "start node '" + g.start + "' has no node definition");
  if (targets.count(g.start)) r.add("parser", "start node has an incoming edge");
  if (!g.topo_order()) r.add("parser", "parse graph not acyclic");

  // actions
  std::set<std::string> action_names;
  for (const auto& a : spec.actions) {
    const std::string el = "action " + a.name;
    if (kReservedNames.count(a.name)) r.add(el, "reserved name");
    if (!action_names.insert(a.name).second) r.add(el, "duplicate action name");
    std::set<std::string> pnames;
    for (const auto& p : a.params) {
      if (!pnames.insert(p.name).second) r.add(el, "duplicate param '" + p.name + "'");
      if (p.width == 0 || p.width > kMaxFieldBits) r.add(el, "param '" + p.name + "' width out of range");
    }
    if (a.steps.empty()) r.add(el, "step list empty");

    auto operand_width = [&](const Operand& o) -> std::optional<uint32_t> {
      switch (o.kind) {
        case Operand::Field: {
          auto w = spec.field_width(o.field);
          if (!w) r.add(el, "unresolved field reference '" + o.field.str() + "'");
          return w;
        }
        case Operand::Param: {
          const ActionParam* p = a.param(o.param);
          if (!p) {
            r.add(el, "unresolved param reference '$" + o.param + "'");
            return std::nullopt;
          }
          return p->width;
        }
        case Operand::Const:
          return o.constant.width();
      }
      return std::nullopt;
    };

    for (size_t i = 0; i < a.steps.size(); ++i) {
      const ActionStep& s = a.steps[i];
      const std::string sel = el + " step " + std::to_string(i);
      if (s.op == Opcode::SetValid || s.op == Opcode::SetInvalid) {
        if (!spec.header(s.dst_header) || s.dst_header == kMetaHeader)
          r.add(sel, "validity target '" + s.dst_header + "' is not a declared header");
        continue;
      }
      auto dst_w = spec.field_width(s.dst);
      if (!dst_w) {
        r.add(sel, "unresolved destination '" + s.dst.str() + "'");
        continue;
      }
      if (s.op == Opcode::ChecksumIpv4) {
        const HeaderType* h = spec.header(s.dst_header);
        if (!h || s.dst_header == kMetaHeader) {
          r.add(sel, "checksum source '" + s.dst_header + "' is not a declared header");
        } else {
          if (h->total_bits() != 160) r.add(sel, "checksum source must be a 20-byte header");
          if (s.dst.header != s.dst_header) r.add(sel, "checksum destination must be a field of the source header");
        }
        if (*dst_w != 16) r.add(sel, "checksum destination must be 16 bits wide");
        continue;
      }
      const size_t want = s.op == Opcode::Select ? 2
                          : (s.op == Opcode::Not || s.op == Opcode::SetField || s.op == Opcode::ShlConst ||
                             s.op == Opcode::ShrConst)
                              ? 1
                              : 2;
      if (s.srcs.size() != want) {
        r.add(sel, "wrong operand count");
        continue;
      }
      for (const auto& o : s.srcs) {
        auto w = operand_width(o);
        if (w && *w > *dst_w) r.add(sel, "operand wider than destination");
      }
      if (s.op == Opcode::Select) {
        if (!s.cmp) {
          r.add(sel, "select without comparison");
        } else {
          for (const Operand* o : {&s.cmp->lhs, &s.cmp->rhs}) {
            auto w = operand_width(*o);
            if (w && *w > kMaxFieldBits) r.add(sel, "comparison operand wider than 128 bits");
          }
        }
      }
    }
  }

  // tables
  std::set<std::string> table_names;
  for (const auto& t : spec.tables) {
    const std::string el = "table " + t.name;
    if (!table_names.insert(t.name).second) r.add(el, "duplicate table name");
    if (t.capacity < 1) r.add(el, "capacity must be at least 1");
    if (t.key_fields.empty()) r.add(el, "no key fields");
    uint32_t sum = 0;
    for (const auto& ref : t.key_fields) {
      auto w = spec.field_width(ref);
      if (!w)
        r.add(el, "unresolved key field '" + ref.str() + "'");
      else
        sum += *w;
    }
    if (t.declared_key_width && *t.declared_key_width != sum)
      r.add(el, "declared key width " + std::to_string(*t.declared_key_width) +
                    " does not equal the key field sum " + std::to_string(sum));
    if (t.kind == TableKind::Ternary) {
      const uint32_t w = spec.table_chunk_width(t);
      if (w < 1 || w > sum) r.add(el, "chunk width must be in 1..key width");
      if (w > kMaxChunkBits)
        r.add(el, "chunk width above " + std::to_string(kMaxChunkBits) + " bits is not emulatable");
    }
    if (t.actions.empty()) r.add(el, "empty action set");
    for (const auto& name : t.actions)
      if (name != kDropAction && !spec.action(name)) r.add(el, "unresolved action '" + name + "'");
    if (!t.default_action.empty() && t.default_action != kDropAction && !spec.action(t.default_action))
      r.add(el, "unresolved default action '" + t.default_action + "'");
    if (!t.entries.empty() && !t.entries_file.empty())
      r.add(el, "both inline entries and an entries file given");
  }

  // deparser
  std::set<std::string> emitted;
  for (const auto& name : spec.deparse_sequence) {
    if (!spec.header(name) || name == kMetaHeader)
      r.add("deparser", "emission of undeclared header '" + name + "'");
    else if (!emitted.insert(name).second)
      r.add("deparser", "header '" + name + "' emitted twice");
  }

  // scheduler
  if (spec.scheduler.capacity_entries < 1) r.add("scheduler", "capacity_entries must be at least 1");
  if (spec.scheduler.rank_bits < 1 || spec.scheduler.rank_bits > 64)
    r.add("scheduler", "rank_bits must be in 1..64");

  // platform
  const PlatformConfig& p = spec.platform;
  bool width_ok = false;
  for (uint32_t w = 64; w <= 2048; w *= 2) width_ok |= (p.bus_width_bits == w);
  if (!width_ok) r.add("platform", "bus width must be a power-of-two multiple of 64 in 64..2048");
  auto pow2 = [](uint32_t v) { return v >= 2 && (v & (v - 1)) == 0; };
  if (!pow2(p.lutram_depth)) r.add("platform", "lutram_depth must be a power of two >= 2");
  if (!pow2(p.bram_depth)) r.add("platform", "bram_depth must be a power of two >= 2");
  if (p.pipes < 1) r.add("platform", "pipes must be at least 1");
  if (p.ports < p.pipes) r.add("platform", "ports must be at least the pipeline count");
  if (p.port_rate_bps <= 0) r.add("platform", "port_rate_bps must be positive");
  if (p.max_pkt_bytes < 1) r.add("platform", "max_pkt_bytes must be positive");
  if (p.rtt_seconds <= 0) r.add("platform", "rtt_seconds must be positive");
  double prev = 0;
  uint32_t prev_w = 0;
  for (const auto& [w, f] : p.freq_table) {
    if (f <= 0) r.add("platform", "frequency entries must be positive");
    if (w > 1280 && prev_w != 0 && f > prev)
      r.add("platform", "freq_table must be non-increasing beyond 1280 bits");
    prev = f;
    prev_w = w;
  }

  return r;
}

}  // namespace pisa

#endif  // PISA_SPEC_HPP

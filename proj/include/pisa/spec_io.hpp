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

#ifndef PISA_SPEC_IO_HPP
#define PISA_SPEC_IO_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pisa/spec.hpp"

namespace pisa {

using json = nlohmann::json;

/// Raised for any document that cannot be turned into a valid
/// PipelineSpec: syntax errors, shape errors, unresolved references,
/// duplicate names and invariant violations.
class SpecError : public std::runtime_error {
 public:
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

namespace spec_io_detail {

inline uint64_t parse_value(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<uint64_t>();
  if (j.is_number_integer()) {
    const int64_t v = j.get<int64_t>();
    if (v < 0) throw SpecError(where + ": negative value");
    return static_cast<uint64_t>(v);
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    try {
      if (s.starts_with("0x") || s.starts_with("0X")) return std::stoull(s.substr(2), nullptr, 16);
      return std::stoull(s);
    } catch (const std::exception&) {
      throw SpecError(where + ": bad numeric literal '" + s + "'");
    }
  }
  throw SpecError(where + ": expected a number");
}

inline uint32_t min_width(uint64_t v) {
  uint32_t w = 1;
  while (v >>= 1) ++w;
  return w;
}

inline FieldRef parse_field_ref(const std::string& s, const std::string& where) {
  const size_t dot = s.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == s.size())
    throw SpecError(where + ": '" + s + "' is not a header.field reference");
  return {s.substr(0, dot), s.substr(dot + 1)};
}

inline Operand parse_operand(const json& j, const std::string& where) {
  if (j.is_number()) {
    const uint64_t v = parse_value(j, where);
    return Operand::make_const(BitVec::from_u64(v, min_width(v)));
  }
  if (j.is_object()) {
    if (!j.contains("const") || !j.contains("width"))
      throw SpecError(where + ": constant object needs 'const' and 'width'");
    const uint32_t width = j.at("width").get<uint32_t>();
    if (j.at("const").is_string()) {
      auto v = BitVec::parse_hex(j.at("const").get<std::string>(), width);
      if (!v) throw SpecError(where + ": constant does not fit in " + std::to_string(width) + " bits");
      return Operand::make_const(*v);
    }
    return Operand::make_const(BitVec::from_u64(parse_value(j.at("const"), where), width));
  }
  if (!j.is_string()) throw SpecError(where + ": bad operand");
  const std::string s = j.get<std::string>();
  if (s.empty()) throw SpecError(where + ": empty operand");
  if (s[0] == '$') return Operand::make_param(s.substr(1));
  if (s.starts_with("0x") || s.starts_with("0X")) return Operand::make_const(BitVec::from_hex(s));
  return Operand::make_field(parse_field_ref(s, where));
}

inline CmpRel parse_rel(const std::string& s, const std::string& where) {
  if (s == "==") return CmpRel::Eq;
  if (s == "!=") return CmpRel::Ne;
  if (s == "<") return CmpRel::Lt;
  if (s == ">") return CmpRel::Gt;
  if (s == "<=") return CmpRel::Le;
  if (s == ">=") return CmpRel::Ge;
  throw SpecError(where + ": unknown relation '" + s + "'");
}

inline Opcode parse_opcode(const std::string& s, const std::string& where) {
  if (s == "add") return Opcode::Add;
  if (s == "sub") return Opcode::Sub;
  if (s == "and") return Opcode::And;
  if (s == "or") return Opcode::Or;
  if (s == "xor") return Opcode::Xor;
  if (s == "not") return Opcode::Not;
  if (s == "shl") return Opcode::ShlConst;
  if (s == "shr") return Opcode::ShrConst;
  if (s == "set_field") return Opcode::SetField;
  if (s == "set_valid") return Opcode::SetValid;
  if (s == "set_invalid") return Opcode::SetInvalid;
  if (s == "select") return Opcode::Select;
  if (s == "checksum_ipv4") return Opcode::ChecksumIpv4;
  throw SpecError(where + ": unknown opcode '" + s + "'");
}

inline const char* opcode_name(Opcode op) {
  switch (op) {
    case Opcode::Add: return "add";
    case Opcode::Sub: return "sub";
    case Opcode::And: return "and";
    case Opcode::Or: return "or";
    case Opcode::Xor: return "xor";
    case Opcode::Not: return "not";
    case Opcode::ShlConst: return "shl";
    case Opcode::ShrConst: return "shr";
    case Opcode::SetField: return "set_field";
    case Opcode::SetValid: return "set_valid";
    case Opcode::SetInvalid: return "set_invalid";
    case Opcode::Select: return "select";
    case Opcode::ChecksumIpv4: return "checksum_ipv4";
  }
  return "?";
}

inline const char* rel_name(CmpRel r) {
  switch (r) {
    case CmpRel::Eq: return "==";
    case CmpRel::Ne: return "!=";
    case CmpRel::Lt: return "<";
    case CmpRel::Gt: return ">";
    case CmpRel::Le: return "<=";
    case CmpRel::Ge: return ">=";
  }
  return "?";
}

inline std::vector<FieldDef> parse_field_list(const json& j, const std::string& where) {
  std::vector<FieldDef> fields;
  if (!j.is_array()) throw SpecError(where + ": field list must be an array");
  for (const auto& f : j) {
    if (!f.is_array() || f.size() != 2 || !f[0].is_string())
      throw SpecError(where + ": each field must be [name, width]");
    fields.push_back({f[0].get<std::string>(), f[1].get<uint32_t>()});
  }
  return fields;
}

inline json operand_to_json(const Operand& o) {
  switch (o.kind) {
    case Operand::Field: return o.field.str();
    case Operand::Param: return "$" + o.param;
    case Operand::Const: return json{{"const", "0x" + o.constant.to_hex()}, {"width", o.constant.width()}};
  }
  return nullptr;
}

}  // namespace spec_io_detail

/// Parses a JSON document into a PipelineSpec without semantic
/// validation. Throws SpecError on syntax or shape problems.
inline PipelineSpec parse_pipeline_document(const std::string& text, const std::string& source_dir = ".") {
  using namespace spec_io_detail;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("syntax error: ") + e.what());
  }

  try {
    PipelineSpec spec;
    spec.source_dir = source_dir;
    spec.format_version = j.value("format_version", 0);
    if (spec.format_version != 1)
      throw SpecError("unsupported format_version " + std::to_string(spec.format_version));
    spec.name = j.value("name", "");
    if (j.contains("seed")) spec.seed = j.at("seed").get<uint64_t>();

    if (!j.contains("headers") || !j.at("headers").is_array()) throw SpecError("missing 'headers' array");
    for (const auto& h : j.at("headers")) {
      const std::string name = h.value("name", "");
      if (name.empty()) throw SpecError("header without a name");
      spec.headers.emplace_back(name, parse_field_list(h.at("fields"), "header " + name));
    }

    if (j.contains("metadata"))
      spec.metadata = HeaderType(kMetaHeader, parse_field_list(j.at("metadata"), "metadata"));
    else
      spec.metadata = HeaderType(kMetaHeader, {{"rank", 16}});

    const json& parser = j.at("parser");
    spec.parse_graph.start = parser.value("start", "");
    for (const auto& n : parser.value("nodes", json::array())) {
      ParseNode node;
      node.header = n.value("header", "");
      const std::string el = "parser node " + node.header;
      node.selector = n.value("select", "");
      for (const auto& t : n.value("transitions", json::array())) {
        if (!t.is_array() || t.size() != 2)
          throw SpecError(el + ": each transition must be [value, next]");
        node.transitions.emplace_back(parse_value(t[0], el), t[1].get<std::string>());
      }
      if (!node.transitions.empty() && node.selector.empty())
        throw SpecError(el + ": transitions require a 'select' field");
      if (n.contains("default")) node.fallback = n.at("default").get<std::string>();
      spec.parse_graph.nodes.push_back(std::move(node));
    }

    for (const auto& a : j.value("actions", json::array())) {
      ActionProgram prog;
      prog.name = a.value("name", "");
      const std::string el = "action " + prog.name;
      if (prog.name.empty()) throw SpecError("action without a name");
      for (const auto& p : a.value("params", json::array())) {
        if (!p.is_array() || p.size() != 2) throw SpecError(el + ": each param must be [name, width]");
        prog.params.push_back({p[0].get<std::string>(), p[1].get<uint32_t>()});
      }
      for (const auto& s : a.value("steps", json::array())) {
        ActionStep step;
        step.op = parse_opcode(s.value("op", ""), el);
        if (step.op == Opcode::SetValid || step.op == Opcode::SetInvalid) {
          step.dst_header = s.value("header", "");
        } else {
          step.dst = parse_field_ref(s.value("dst", ""), el);
          if (step.op == Opcode::ChecksumIpv4) step.dst_header = s.value("header", "");
          for (const auto& src : s.value("srcs", json::array()))
            step.srcs.push_back(parse_operand(src, el));
          if (step.op == Opcode::ShlConst || step.op == Opcode::ShrConst)
            step.shift_amount = s.value("amount", 0u);
          if (step.op == Opcode::Select) {
            const json& c = s.at("cmp");
            if (!c.is_array() || c.size() != 3) throw SpecError(el + ": cmp must be [lhs, rel, rhs]");
            Comparison cmp;
            cmp.lhs = parse_operand(c[0], el);
            cmp.rel = parse_rel(c[1].get<std::string>(), el);
            cmp.rhs = parse_operand(c[2], el);
            step.cmp = std::move(cmp);
          }
        }
        prog.steps.push_back(std::move(step));
      }
      spec.actions.push_back(std::move(prog));
    }

    for (const auto& t : j.value("tables", json::array())) {
      TableDecl decl;
      decl.name = t.value("name", "");
      const std::string el = "table " + decl.name;
      if (decl.name.empty()) throw SpecError("table without a name");
      const std::string kind = t.value("kind", "");
      if (kind == "exact")
        decl.kind = TableKind::Exact;
      else if (kind == "ternary")
        decl.kind = TableKind::Ternary;
      else if (kind == "lpm")
        decl.kind = TableKind::Lpm;
      else
        throw SpecError(el + ": unknown kind '" + kind + "'");
      for (const auto& k : t.value("key", json::array()))
        decl.key_fields.push_back(parse_field_ref(k.get<std::string>(), el));
      if (t.contains("key_width")) decl.declared_key_width = t.at("key_width").get<uint32_t>();
      decl.capacity = t.value("capacity", 0ull);
      if (t.contains("chunk_width")) decl.chunk_width = t.at("chunk_width").get<uint32_t>();
      for (const auto& a : t.value("actions", json::array())) decl.actions.push_back(a.get<std::string>());
      decl.default_action = t.value("default_action", "");
      for (const auto& e : t.value("entries", json::array())) decl.entries.push_back(e.get<std::string>());
      decl.entries_file = t.value("entries_file", "");
      spec.tables.push_back(std::move(decl));
    }

    for (const auto& d : j.value("deparser", json::array()))
      spec.deparse_sequence.push_back(d.get<std::string>());

    if (j.contains("scheduler")) {
      const json& s = j.at("scheduler");
      const std::string kind = s.value("kind", "fifo");
      if (kind == "fifo")
        spec.scheduler.kind = SchedulerKind::Fifo;
      else if (kind == "pifo")
        spec.scheduler.kind = SchedulerKind::Pifo;
      else if (kind == "systolic")
        spec.scheduler.kind = SchedulerKind::Systolic;
      else
        throw SpecError("scheduler: unknown kind '" + kind + "'");
      spec.scheduler.capacity_entries = s.value("capacity_entries", spec.scheduler.capacity_entries);
      spec.scheduler.rank_bits = s.value("rank_bits", spec.scheduler.rank_bits);
      spec.scheduler.buffer_bytes = s.value("buffer_bytes", spec.scheduler.buffer_bytes);
    }

    if (j.contains("platform")) {
      const json& p = j.at("platform");
      PlatformConfig& pc = spec.platform;
      pc.bus_width_bits = p.value("bus_width_bits", pc.bus_width_bits);
      pc.lutram_depth = p.value("lutram_depth", pc.lutram_depth);
      pc.bram_depth = p.value("bram_depth", pc.bram_depth);
      pc.ports = p.value("ports", pc.ports);
      pc.port_rate_bps = p.value("port_rate_bps", pc.port_rate_bps);
      pc.pipes = p.value("pipes", pc.pipes);
      pc.max_pkt_bytes = p.value("max_pkt_bytes", pc.max_pkt_bytes);
      pc.rtt_seconds = p.value("rtt_seconds", pc.rtt_seconds);
      if (p.contains("freq_table")) {
        for (const auto& [k, v] : p.at("freq_table").items()) {
          uint32_t width = 0;
          try {
            width = static_cast<uint32_t>(std::stoul(k));
          } catch (const std::exception&) {
            throw SpecError("platform: freq_table key '" + k + "' is not a bus width");
          }
          pc.freq_table[width] = v.get<double>();
        }
      }
    }

    return spec;
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed document: ") + e.what());
  }
}

/// Serializes a spec back to its document form. load . serialize . load
/// is the identity on the resolved spec.
inline json spec_to_json(const PipelineSpec& spec) {
  using namespace spec_io_detail;
  json j;
  j["format_version"] = spec.format_version;
  j["name"] = spec.name;
  j["seed"] = spec.seed;

  j["headers"] = json::array();
  for (const auto& h : spec.headers) {
    json fields = json::array();
    for (const auto& f : h.fields()) fields.push_back(json::array({f.name, f.width}));
    j["headers"].push_back({{"name", h.name()}, {"fields", fields}});
  }
  json meta = json::array();
  for (const auto& f : spec.metadata.fields()) meta.push_back(json::array({f.name, f.width}));
  j["metadata"] = meta;

  json nodes = json::array();
  for (const auto& n : spec.parse_graph.nodes) {
    json node{{"header", n.header}};
    if (!n.selector.empty()) node["select"] = n.selector;
    if (!n.transitions.empty()) {
      json ts = json::array();
      char buf[32];
      for (const auto& [v, to] : n.transitions) {
        std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
        ts.push_back(json::array({std::string(buf), to}));
      }
      node["transitions"] = ts;
    }
    if (n.fallback) node["default"] = *n.fallback;
    nodes.push_back(std::move(node));
  }
  j["parser"] = {{"start", spec.parse_graph.start}, {"nodes", nodes}};

  json actions = json::array();
  for (const auto& a : spec.actions) {
    json prog{{"name", a.name}};
    json params = json::array();
    for (const auto& p : a.params) params.push_back(json::array({p.name, p.width}));
    prog["params"] = params;
    json steps = json::array();
    for (const auto& s : a.steps) {
      json step{{"op", opcode_name(s.op)}};
      if (s.op == Opcode::SetValid || s.op == Opcode::SetInvalid) {
        step["header"] = s.dst_header;
      } else {
        step["dst"] = s.dst.str();
        if (s.op == Opcode::ChecksumIpv4) step["header"] = s.dst_header;
        if (!s.srcs.empty()) {
          json srcs = json::array();
          for (const auto& o : s.srcs) srcs.push_back(operand_to_json(o));
          step["srcs"] = srcs;
        }
        if (s.op == Opcode::ShlConst || s.op == Opcode::ShrConst) step["amount"] = s.shift_amount;
        if (s.cmp)
          step["cmp"] =
              json::array({operand_to_json(s.cmp->lhs), rel_name(s.cmp->rel), operand_to_json(s.cmp->rhs)});
      }
      steps.push_back(std::move(step));
    }
    prog["steps"] = steps;
    actions.push_back(std::move(prog));
  }
  j["actions"] = actions;

  json tables = json::array();
  for (const auto& t : spec.tables) {
    json table{{"name", t.name}, {"kind", table_kind_name(t.kind)}, {"capacity", t.capacity}};
    json key = json::array();
    for (const auto& k : t.key_fields) key.push_back(k.str());
    table["key"] = key;
    if (t.declared_key_width) table["key_width"] = *t.declared_key_width;
    if (t.chunk_width) table["chunk_width"] = *t.chunk_width;
    table["actions"] = t.actions;
    if (!t.default_action.empty()) table["default_action"] = t.default_action;
    if (!t.entries.empty()) table["entries"] = t.entries;
    if (!t.entries_file.empty()) table["entries_file"] = t.entries_file;
    tables.push_back(std::move(table));
  }
  j["tables"] = tables;

  j["deparser"] = spec.deparse_sequence;
  j["scheduler"] = {{"kind", scheduler_kind_name(spec.scheduler.kind)},
                    {"capacity_entries", spec.scheduler.capacity_entries},
                    {"rank_bits", spec.scheduler.rank_bits},
                    {"buffer_bytes", spec.scheduler.buffer_bytes}};

  json freq = json::object();
  for (const auto& [w, f] : spec.platform.freq_table) freq[std::to_string(w)] = f;
  j["platform"] = {{"bus_width_bits", spec.platform.bus_width_bits},
                   {"lutram_depth", spec.platform.lutram_depth},
                   {"bram_depth", spec.platform.bram_depth},
                   {"ports", spec.platform.ports},
                   {"port_rate_bps", spec.platform.port_rate_bps},
                   {"pipes", spec.platform.pipes},
                   {"max_pkt_bytes", spec.platform.max_pkt_bytes},
                   {"rtt_seconds", spec.platform.rtt_seconds}};
  if (!spec.platform.freq_table.empty()) j["platform"]["freq_table"] = freq;
  return j;
}

inline std::string serialize_pipeline_spec(const PipelineSpec& spec) { return spec_to_json(spec).dump(2); }

/// Parse + validate; throws SpecError naming the offending elements if
/// any invariant is violated.
inline PipelineSpec load_pipeline_spec(const std::string& text, const std::string& source_dir = ".") {
  PipelineSpec spec = parse_pipeline_document(text, source_dir);
  ValidationReport report = validate_spec(spec);
  if (!report.ok()) throw SpecError("invalid pipeline spec:\n" + report.str());
  return spec;
}

inline PipelineSpec load_pipeline_spec_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open spec file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_pipeline_spec(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace pisa

#endif  // PISA_SPEC_IO_HPP

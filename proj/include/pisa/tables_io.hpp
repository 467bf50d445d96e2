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

#ifndef PISA_TABLES_IO_HPP
#define PISA_TABLES_IO_HPP

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pisa/exact_table.hpp"
#include "pisa/lpm.hpp"
#include "pisa/spec.hpp"
#include "pisa/tcam.hpp"

namespace pisa {

class TableIoError : public std::runtime_error {
 public:
  explicit TableIoError(const std::string& what) : std::runtime_error(what) {}
};

/// The lookup result every table kind produces: which action to run and
/// the entry's bound action data.
struct ActionBinding {
  std::string action_ref;
  BitVec action_data;
};

/// One match-action table instance, populated from entry lines in the
/// format documented in docs/tables.md:
///
///   exact   <key-hex>              <priority|-> <action> <data-hex|->
///   ternary <value-hex>/<mask-hex> <priority>   <action> <data-hex|->
///   lpm     <bits-hex>/<len>       <priority|-> <action> <data-hex|->
class MatchTable {
 public:
  MatchTable(const PipelineSpec& spec, const TableDecl& decl, uint64_t seed)
      : decl_(&decl), key_width_(spec.table_key_width(decl)) {
    switch (decl.kind) {
      case TableKind::Exact:
        exact_.emplace(key_width_, decl.capacity, seed);
        break;
      case TableKind::Ternary:
        tcam_.emplace(key_width_, decl.capacity, spec.table_chunk_width(decl));
        break;
      case TableKind::Lpm:
        lpm_.emplace(key_width_);
        break;
    }
  }

  const TableDecl& decl() const { return *decl_; }
  uint32_t key_width() const { return key_width_; }

  ExactTable& exact() { return *exact_; }
  TransposedTcam& tcam() { return *tcam_; }
  LpmTrie& lpm() { return *lpm_; }
  const LpmTrie& lpm() const { return *lpm_; }
  const TransposedTcam& tcam() const { return *tcam_; }

  std::optional<ActionBinding> lookup(const BitVec& key) const {
    switch (decl_->kind) {
      case TableKind::Exact:
        if (auto e = exact_->lookup(key)) return ActionBinding{e->action_ref, e->action_data};
        return std::nullopt;
      case TableKind::Ternary:
        if (auto m = tcam_->lookup(key)) return ActionBinding{m->action_ref, m->action_data};
        return std::nullopt;
      case TableKind::Lpm:
        if (auto m = lpm_->lookup(key)) return ActionBinding{m->action_ref, m->action_data};
        return std::nullopt;
    }
    return std::nullopt;
  }

  /// Parses and inserts one population line. `where` names the source for
  /// diagnostics.
  void add_entry(const PipelineSpec& spec, const std::string& line, const std::string& where) {
    std::istringstream in(line);
    std::string kind, keyspec, prio_s, action, data_s;
    if (!(in >> kind >> keyspec >> prio_s >> action >> data_s))
      throw TableIoError(where + ": expected '<kind> <key> <priority> <action> <data>'");
    std::string extra;
    if (in >> extra) throw TableIoError(where + ": trailing tokens after entry");

    if (kind != table_kind_name(decl_->kind))
      throw TableIoError(where + ": entry kind '" + kind + "' does not match table kind '" +
                         table_kind_name(decl_->kind) + "'");

    bool allowed = action == kDropAction;
    for (const auto& a : decl_->actions) allowed |= (a == action);
    if (!allowed) throw TableIoError(where + ": action '" + action + "' is not in the table's action set");

    uint32_t data_bits = 0;
    if (action != kDropAction) {
      const ActionProgram* prog = spec.action(action);
      if (!prog) throw TableIoError(where + ": unknown action '" + action + "'");
      data_bits = prog->data_bits();
    }
    BitVec data(data_bits);
    if (data_s != "-") {
      auto v = BitVec::parse_hex(data_s, data_bits);
      if (!v) throw TableIoError(where + ": action data does not fit in " + std::to_string(data_bits) + " bits");
      data = *v;
    }

    uint32_t priority = 0;
    if (prio_s != "-") {
      try {
        priority = static_cast<uint32_t>(std::stoul(prio_s));
      } catch (const std::exception&) {
        throw TableIoError(where + ": bad priority '" + prio_s + "'");
      }
    } else if (decl_->kind == TableKind::Ternary) {
      throw TableIoError(where + ": ternary entries require a numeric priority");
    }

    switch (decl_->kind) {
      case TableKind::Exact: {
        auto key = BitVec::parse_hex(keyspec, key_width_);
        if (!key) throw TableIoError(where + ": key does not fit in " + std::to_string(key_width_) + " bits");
        if (exact_->insert({*key, action, data}) == InsertOutcome::Full)
          throw TableIoError(where + ": table is full");
        break;
      }
      case TableKind::Ternary: {
        const size_t slash = keyspec.find('/');
        if (slash == std::string::npos) throw TableIoError(where + ": ternary key must be value/mask");
        auto value = BitVec::parse_hex(keyspec.substr(0, slash), key_width_);
        auto mask = BitVec::parse_hex(keyspec.substr(slash + 1), key_width_);
        if (!value || !mask) throw TableIoError(where + ": value/mask does not fit the key width");
        if (tcam_->insert(TernaryRule::make(*value, *mask, priority, action, data)) ==
            TransposedTcam::Outcome::Full)
          throw TableIoError(where + ": table is full");
        break;
      }
      case TableKind::Lpm: {
        const size_t slash = keyspec.find('/');
        if (slash == std::string::npos) throw TableIoError(where + ": lpm key must be bits/length");
        auto bits = BitVec::parse_hex(keyspec.substr(0, slash), key_width_);
        uint32_t length = 0;
        try {
          length = static_cast<uint32_t>(std::stoul(keyspec.substr(slash + 1)));
        } catch (const std::exception&) {
          throw TableIoError(where + ": bad prefix length");
        }
        if (!bits || length > key_width_) throw TableIoError(where + ": prefix does not fit the key width");
        try {
          lpm_->insert(Prefix::make(*bits, length, action, data));
        } catch (const std::invalid_argument& e) {
          throw TableIoError(where + ": " + e.what());
        }
        break;
      }
    }
  }

  /// Loads the declaration's inline entries and/or entries file.
  void populate(const PipelineSpec& spec) {
    size_t n = 0;
    for (const auto& line : decl_->entries)
      if (!skippable(line)) add_entry(spec, line, decl_->name + " entry " + std::to_string(++n));
    if (!decl_->entries_file.empty()) {
      const auto path = std::filesystem::path(spec.source_dir) / decl_->entries_file;
      std::ifstream in(path);
      if (!in) throw TableIoError(decl_->name + ": cannot open entries file " + path.string());
      std::string line;
      size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (skippable(line)) continue;
        add_entry(spec, line, path.filename().string() + ":" + std::to_string(lineno));
      }
    }
  }

 private:
  static bool skippable(const std::string& line) {
    for (char c : line)
      if (!isspace(static_cast<unsigned char>(c))) return c == '#';
    return true;
  }

  const TableDecl* decl_;
  uint32_t key_width_;
  std::optional<ExactTable> exact_;
  std::optional<TransposedTcam> tcam_;
  std::optional<LpmTrie> lpm_;
};

}  // namespace pisa

#endif  // PISA_TABLES_IO_HPP

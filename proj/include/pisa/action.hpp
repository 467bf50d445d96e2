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

#ifndef PISA_ACTION_HPP
#define PISA_ACTION_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

#include "pisa/packet.hpp"
#include "pisa/spec.hpp"

namespace pisa {

/// Standard Internet checksum (ones-complement of the ones-complement
/// sum of the ten 16-bit words) over a 20-byte IPv4 header whose checksum
/// field has been zeroed.
inline uint16_t ipv4_checksum(std::span<const uint8_t> header_bytes) {
  if (header_bytes.size() != 20) throw std::invalid_argument("IPv4 checksum needs exactly 20 octets");
  uint32_t sum = 0;
  for (size_t i = 0; i < 20; i += 2) sum += (uint32_t(header_bytes[i]) << 8) | header_bytes[i + 1];
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<uint16_t>(~sum & 0xffff);
}

enum class ExecStatus { Ok, InvalidFieldAccess };

struct ExecResult {
  ExecStatus status = ExecStatus::Ok;
  std::string offending;  // the field or header that was accessed while invalid

  bool ok() const { return status == ExecStatus::Ok; }
};

namespace action_detail {

struct OperandError {};

inline BitVec read_operand(const PipelineSpec& spec, const ActionProgram& prog, const ParsedPacket& pp,
                           const BitVec& action_data, const Operand& o, std::string& offending) {
  switch (o.kind) {
    case Operand::Field: {
      auto v = read_field(spec, pp, o.field);
      if (!v) {
        offending = o.field.str();
        throw OperandError{};
      }
      return *v;
    }
    case Operand::Param: {
      const auto off = prog.param_offset(o.param);
      const ActionParam* p = prog.param(o.param);
      if (!off || !p) throw std::logic_error("unresolved param survived validation");
      return action_data.slice(*off, p->width);
    }
    case Operand::Const:
      return o.constant;
  }
  throw std::logic_error("bad operand kind");
}

inline bool compare(CmpRel rel, const BitVec& lhs, const BitVec& rhs) {
  const int c = lhs.compare(rhs);
  switch (rel) {
    case CmpRel::Eq: return c == 0;
    case CmpRel::Ne: return c != 0;
    case CmpRel::Lt: return c < 0;
    case CmpRel::Gt: return c > 0;
    case CmpRel::Le: return c <= 0;
    case CmpRel::Ge: return c >= 0;
  }
  return false;
}

}  // namespace action_detail

/// Runs an action program against a parsed packet. Steps execute in
/// order, each observing its predecessors' writes; arithmetic is modular
/// in the destination field width and narrower operands zero-extend.
/// Touching a field of an invalid header stops execution with
/// InvalidFieldAccess (the caller drops the packet).
///
/// Pure in (prog, pp, action_data): the input packet is taken by value
/// and the updated copy returned alongside the status.
inline std::pair<ParsedPacket, ExecResult> execute(const PipelineSpec& spec, const ActionProgram& prog,
                                                   ParsedPacket pp, const BitVec& action_data) {
  using namespace action_detail;
  ExecResult res;

  for (const ActionStep& step : prog.steps) {
    if (step.op == Opcode::SetValid) {
      // freshly validated headers start zero-filled; already-valid ones keep their bytes
      if (!pp.valid(step.dst_header))
        pp.make_valid(step.dst_header, BitVec(spec.header(step.dst_header)->total_bits()));
      continue;
    }
    if (step.op == Opcode::SetInvalid) {
      pp.make_invalid(step.dst_header);
      continue;
    }

    const auto dst_width_opt = spec.field_width(step.dst);
    if (!dst_width_opt) throw std::logic_error("unresolved destination survived validation");
    const uint32_t dst_width = *dst_width_opt;
    if (!pp.valid(step.dst.header)) {
      res.status = ExecStatus::InvalidFieldAccess;
      res.offending = step.dst.str();
      return {std::move(pp), res};
    }

    try {
      auto src = [&](size_t i) {
        return read_operand(spec, prog, pp, action_data, step.srcs[i], res.offending).zext(dst_width);
      };

      BitVec out(dst_width);
      switch (step.op) {
        case Opcode::Add: out = src(0).add(src(1)); break;
        case Opcode::Sub: out = src(0).sub(src(1)); break;
        case Opcode::And: out = src(0).and_(src(1)); break;
        case Opcode::Or: out = src(0).or_(src(1)); break;
        case Opcode::Xor: out = src(0).xor_(src(1)); break;
        case Opcode::Not: out = src(0).not_(); break;
        case Opcode::ShlConst: out = src(0).shl(step.shift_amount); break;
        case Opcode::ShrConst: out = src(0).shr(step.shift_amount); break;
        case Opcode::SetField: out = src(0); break;
        case Opcode::Select: {
          const BitVec lhs = read_operand(spec, prog, pp, action_data, step.cmp->lhs, res.offending);
          const BitVec rhs = read_operand(spec, prog, pp, action_data, step.cmp->rhs, res.offending);
          out = compare(step.cmp->rel, lhs, rhs) ? src(0) : src(1);
          break;
        }
        case Opcode::ChecksumIpv4: {
          if (!pp.valid(step.dst_header)) {
            res.status = ExecStatus::InvalidFieldAccess;
            res.offending = step.dst_header;
            return {std::move(pp), res};
          }
          const HeaderType* h = spec.header(step.dst_header);
          BitVec image = pp.header_values.at(step.dst_header);
          image.write_slice(*h->field_offset(step.dst.field), BitVec(16));  // checksum field zeroed
          const uint16_t sum = ipv4_checksum(image.bytes());
          out = BitVec::from_u64(sum, 16);
          break;
        }
        case Opcode::SetValid:
        case Opcode::SetInvalid:
          break;  // handled above
      }
      write_field(spec, pp, step.dst, out);
    } catch (const OperandError&) {
      res.status = ExecStatus::InvalidFieldAccess;
      return {std::move(pp), res};
    }
  }
  return {std::move(pp), res};
}

}  // namespace pisa

#endif  // PISA_ACTION_HPP

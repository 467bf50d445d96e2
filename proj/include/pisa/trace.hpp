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

#ifndef PISA_TRACE_HPP
#define PISA_TRACE_HPP

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pisa {

class TraceError : public std::runtime_error {
 public:
  explicit TraceError(const std::string& what) : std::runtime_error(what) {}
};

/// One line of a packet trace. Input files carry `seq port hex`; output
/// files carry `seq port disposition hex` where disposition is
/// `forwarded` or `dropped:<reason>`. Lines starting with '#' and blank
/// lines are skipped; seq must be strictly increasing within a file.
struct TraceRecord {
  enum class Direction { In, Out };

  Direction direction = Direction::In;
  uint64_t seq = 0;
  uint32_t port = 0;
  std::vector<uint8_t> bytes;
  std::string disposition;  // empty for input records

  bool forwarded() const { return disposition == "forwarded"; }
};

namespace trace_detail {

inline std::vector<uint8_t> parse_hex_bytes(const std::string& hex, const std::string& where) {
  if (hex.size() < 2 || hex.size() % 2 != 0)
    throw TraceError(where + ": packet hex must be a nonzero even number of digits");
  std::vector<uint8_t> bytes(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); ++i) {
    const char c = hex[i];
    int d;
    if (c >= '0' && c <= '9')
      d = c - '0';
    else if (c >= 'a' && c <= 'f')
      d = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      d = c - 'A' + 10;
    else
      throw TraceError(where + ": bad hex digit '" + std::string(1, c) + "'");
    bytes[i / 2] = static_cast<uint8_t>(bytes[i / 2] << 4 | d);
  }
  return bytes;
}

inline std::string to_hex(const std::vector<uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s(bytes.size() * 2, '0');
  for (size_t i = 0; i < bytes.size(); ++i) {
    s[2 * i] = digits[bytes[i] >> 4];
    s[2 * i + 1] = digits[bytes[i] & 0xf];
  }
  return s;
}

}  // namespace trace_detail

inline std::vector<TraceRecord> read_input_trace(std::istream& in) {
  std::vector<TraceRecord> records;
  std::string line;
  size_t lineno = 0;
  bool have_prev = false;
  uint64_t prev_seq = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    TraceRecord r;
    std::string hex;
    if (!(ls >> r.seq >> r.port >> hex)) throw TraceError(where + ": expected '<seq> <port> <hex>'");
    std::string extra;
    if (ls >> extra) throw TraceError(where + ": trailing tokens");
    r.bytes = trace_detail::parse_hex_bytes(hex, where);
    if (have_prev && r.seq <= prev_seq) throw TraceError(where + ": seq not strictly increasing");
    prev_seq = r.seq;
    have_prev = true;
    records.push_back(std::move(r));
  }
  return records;
}

inline void write_output_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  out << "# seq port disposition hex\n";
  for (const auto& r : records)
    out << r.seq << " " << r.port << " " << r.disposition << " " << trace_detail::to_hex(r.bytes) << "\n";
}

inline std::vector<TraceRecord> read_output_trace(std::istream& in) {
  std::vector<TraceRecord> records;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    const size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    TraceRecord r;
    r.direction = TraceRecord::Direction::Out;
    std::string hex;
    if (!(ls >> r.seq >> r.port >> r.disposition >> hex))
      throw TraceError(where + ": expected '<seq> <port> <disposition> <hex>'");
    r.bytes = trace_detail::parse_hex_bytes(hex, where);
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace pisa

#endif  // PISA_TRACE_HPP

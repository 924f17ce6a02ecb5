// Copyright 2026 The majcert Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Text formats for truth tables.
//
// Boolean class file:
//   n=<int>
//   <hex table>          one function per line
// A table is the integer sum_x f(x) 2^x written in hex, most significant
// digit first, zero-padded to ceil(2^n / 4) digits.
//
// Real class file: CSV, one row per function, 2^n decimal values in input
// order. n is implied by the row length.

#pragma once

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "majcert/core.hpp"

namespace majcert::io {

inline char hex_digit(unsigned v) { return "0123456789abcdef"[v & 15U]; }

inline unsigned hex_value(char c) {
  if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
  if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
  if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
  throw RejectedInput(std::string("invalid hex digit '") + c + "'");
}

/// Input x as ceil(n/4) lowercase hex digits.
inline std::string input_hex(Input x, int n) {
  const int digits = std::max(1, (n + 3) / 4);
  std::string s(static_cast<std::size_t>(digits), '0');
  for (int i = digits - 1; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = hex_digit(x);
  return s;
}

inline Input parse_input_hex(const std::string& s, const InputDomain& d) {
  require(!s.empty(), "empty hex input");
  std::uint64_t v = 0;
  for (char c : s) {
    v = (v << 4) | hex_value(c);
    require(v < d.size(), "hex input " + s + " outside domain");
  }
  return static_cast<Input>(v);
}

inline std::string table_hex(const BooleanFunction& f) {
  const std::size_t bits = f.domain().size();
  const std::size_t digits = std::max<std::size_t>(1, (bits + 3) / 4);
  std::string s(digits, '0');
  for (std::size_t d = 0; d < digits; ++d) {
    unsigned v = 0;
    for (unsigned b = 0; b < 4; ++b) {
      const std::size_t x = 4 * d + b;
      if (x < bits && f(static_cast<Input>(x))) v |= 1U << b;
    }
    s[digits - 1 - d] = hex_digit(v);
  }
  return s;
}

inline BooleanFunction parse_table_hex(const std::string& s, const InputDomain& dom) {
  const std::size_t bits = dom.size();
  const std::size_t digits = std::max<std::size_t>(1, (bits + 3) / 4);
  require(s.size() == digits, "table hex must have " + std::to_string(digits) + " digits, got '" + s + "'");
  BooleanFunction f(dom);
  for (std::size_t d = 0; d < digits; ++d) {
    const unsigned v = hex_value(s[digits - 1 - d]);
    for (unsigned b = 0; b < 4; ++b) {
      const std::size_t x = 4 * d + b;
      const bool bit = (v >> b) & 1U;
      if (x >= bits) {
        require(!bit, "table hex sets bits beyond 2^n");
      } else {
        f.set(static_cast<Input>(x), bit);
      }
    }
  }
  return f;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline void write_truth_tables(std::ostream& os, const ConceptClass& s) {
  os << "n=" << s.domain().bits() << '\n';
  for (const auto& f : s) os << table_hex(f) << '\n';
}

inline ConceptClass read_truth_tables(std::istream& is) {
  std::string line;
  int n = -1;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    require(line.rfind("n=", 0) == 0, "truth-table file must start with 'n=<int>'");
    n = std::stoi(line.substr(2));
    break;
  }
  require(n > 0, "missing 'n=' header");
  const InputDomain dom(n);
  std::vector<BooleanFunction> fs;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    fs.push_back(parse_table_hex(line, dom));
  }
  return ConceptClass(std::move(fs));
}

/// Shortest round-trip decimal representation.
inline std::string format_real(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline void write_real_csv(std::ostream& os, const PConceptClass& s) {
  for (const auto& f : s) {
    bool first = true;
    for (double v : f.values()) {
      if (!first) os << ',';
      os << format_real(v);
      first = false;
    }
    os << '\n';
  }
}

inline PConceptClass read_real_csv(std::istream& is) {
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = trim(cell);
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw RejectedInput("non-numeric CSV cell '" + cell + "'");
      }
      require(used == cell.size(), "trailing characters in CSV cell '" + cell + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  require(!rows.empty(), "empty CSV");
  const std::size_t len = rows.front().size();
  require(len >= 2 && (len & (len - 1)) == 0, "CSV row length must be a power of two >= 2");
  const InputDomain dom(std::countr_zero(len));
  std::vector<RealFunction> fs;
  for (auto& r : rows) {
    require(r.size() == len, "CSV rows must all have 2^n values");
    fs.emplace_back(dom, std::move(r));
  }
  return PConceptClass(std::move(fs));
}

}  // namespace majcert::io

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

// JSON forms of classes, decompositions and protocols.
//
// Two number conventions are used. Summary numbers are rounded to 12
// significant digits (`rounded`) so reports diff cleanly. Values that a
// verifier must reproduce bit for bit (function tables, alpha, density
// matrix entries) are stored as shortest round-trip decimal strings
// (`exact`).

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <json.hpp>

#include "majcert/core.hpp"
#include "majcert/io.hpp"
#include "majcert/majcert.hpp"
#include "majcert/protocol.hpp"
#include "majcert/quantum.hpp"
#include "majcert/real_majcert.hpp"

namespace majcert::json_io {

using Json = nlohmann::json;

/// v rounded to 12 significant digits, as a JSON number.
inline Json rounded(double v) {
  if (!std::isfinite(v)) return Json(nullptr);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  const double r = std::strtod(buf, nullptr);
  if (r == std::floor(r) && std::abs(r) < 9.0e15) return Json(static_cast<std::int64_t>(r));
  return Json(r);
}

inline Json exact(double v) { return Json(io::format_real(v)); }

inline double parse_exact(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  require(end != s.c_str() && *end == '\0', "malformed number '" + s + "'");
  return v;
}

inline Json inputs_to_json(const InputSet& xs, int n) {
  Json a = Json::array();
  for (Input x : xs) a.push_back(io::input_hex(x, n));
  return a;
}

inline InputSet inputs_from_json(const Json& j, const InputDomain& d) {
  std::vector<Input> xs;
  for (const auto& e : j) xs.push_back(io::parse_input_hex(e.get<std::string>(), d));
  return make_input_set(std::move(xs));
}

inline Json table_to_json(const RealFunction& f) {
  Json a = Json::array();
  for (double v : f.values()) a.push_back(exact(v));
  return a;
}

inline RealFunction table_from_json(const Json& j, const InputDomain& d) {
  std::vector<double> v;
  for (const auto& e : j) v.push_back(parse_exact(e));
  require(v.size() == d.size(), "function table has the wrong length");
  return RealFunction(d, std::move(v));
}

// ---------------------------------------------------------------------------
// Classes

inline Json class_to_json(const ConceptClass& s) {
  Json t = Json::array();
  for (const auto& f : s) t.push_back(io::table_hex(f));
  return {{"n", s.domain().bits()}, {"tables", t}};
}

inline ConceptClass boolean_class_from_json(const Json& j) {
  const InputDomain d(j.at("n").get<int>());
  std::vector<BooleanFunction> fs;
  for (const auto& t : j.at("tables")) fs.push_back(io::parse_table_hex(t.get<std::string>(), d));
  return ConceptClass(std::move(fs));
}

inline Json class_to_json(const PConceptClass& s) {
  Json t = Json::array();
  for (const auto& f : s) t.push_back(table_to_json(f));
  return {{"n", s.domain().bits()}, {"tables", t}};
}

inline PConceptClass real_class_from_json(const Json& j) {
  const InputDomain d(j.at("n").get<int>());
  std::vector<RealFunction> fs;
  for (const auto& t : j.at("tables")) fs.push_back(table_from_json(t, d));
  return PConceptClass(std::move(fs));
}

// ---------------------------------------------------------------------------
// Boolean decompositions

inline Json certificate_to_json(const Certificate& c) {
  const int n = c.domain().bits();
  Json pts = Json::array(), bits = Json::array();
  for (auto [x, b] : c.assignments()) {
    pts.push_back(io::input_hex(x, n));
    bits.push_back(b ? 1 : 0);
  }
  return {{"points", pts}, {"bits", bits}};
}

inline Certificate certificate_from_json(const Json& j, const InputDomain& d) {
  Certificate c(d);
  const auto& pts = j.at("points");
  const auto& bits = j.at("bits");
  require(pts.size() == bits.size(), "certificate points and bits differ in length");
  for (std::size_t i = 0; i < pts.size(); ++i)
    c.assign(io::parse_input_hex(pts[i].get<std::string>(), d), bits[i].get<int>() != 0);
  return c;
}

/// Functions are stored as member indices into the accompanying class.
inline Json decomposition_to_json(const MajorityDecomposition& d, bool verified) {
  Json certs = Json::array();
  for (const auto& c : d.certs) certs.push_back(certificate_to_json(c));
  return {{"target", io::table_hex(d.target)}, {"m", d.m}, {"certs", certs}, {"funcs", d.indices},
          {"seed", d.seed}, {"verified", verified}};
}

template <class Decomp = MajorityDecomposition>
Decomp decomposition_from_json(const Json& j, const ConceptClass& s) {
  const InputDomain dom = s.domain();
  Decomp d;
  d.target = io::parse_table_hex(j.at("target").get<std::string>(), dom);
  d.m = j.at("m").get<std::size_t>();
  d.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("certs")) d.certs.push_back(certificate_from_json(c, dom));
  for (const auto& i : j.at("funcs")) {
    const auto idx = i.get<std::size_t>();
    require(idx < s.size(), "decomposition refers to a member outside the class");
    d.indices.push_back(idx);
    d.funcs.push_back(s[idx]);
  }
  require(d.certs.size() == d.m && d.funcs.size() == d.m, "decomposition has inconsistent m");
  return d;
}

// ---------------------------------------------------------------------------
// Real decompositions

inline Json real_decomposition_to_json(const RealDecomposition& d, bool verified) {
  const int n = d.target.domain().bits();
  Json pts = Json::array();
  for (const auto& x : d.points) pts.push_back(inputs_to_json(x, n));
  return {{"target", table_to_json(d.target)},
          {"m", d.m},
          {"alpha", exact(d.alpha)},
          {"eps", exact(d.eps)},
          {"points", pts},
          {"funcs", d.indices},
          {"seed", d.seed},
          {"verified", verified}};
}

inline RealDecomposition real_decomposition_from_json(const Json& j, const PConceptClass& s) {
  const InputDomain dom = s.domain();
  RealDecomposition d;
  d.target = table_from_json(j.at("target"), dom);
  d.m = j.at("m").get<std::size_t>();
  d.alpha = parse_exact(j.at("alpha"));
  d.eps = parse_exact(j.at("eps"));
  d.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& x : j.at("points")) d.points.push_back(inputs_from_json(x, dom));
  for (const auto& i : j.at("funcs")) {
    const auto idx = i.get<std::size_t>();
    require(idx < s.size(), "decomposition refers to a member outside the class");
    d.indices.push_back(idx);
    d.funcs.push_back(s[idx]);
  }
  require(d.points.size() == d.m && d.funcs.size() == d.m, "decomposition has inconsistent m");
  return d;
}

// ---------------------------------------------------------------------------
// Quantum objects

/// Row-major entries as [re, im] decimal pairs.
inline Json state_to_json(const DensityMatrix& rho) {
  Json e = Json::array();
  for (Eigen::Index i = 0; i < rho.dim(); ++i)
    for (Eigen::Index k = 0; k < rho.dim(); ++k)
      e.push_back(Json::array({exact(rho.matrix()(i, k).real()), exact(rho.matrix()(i, k).imag())}));
  return {{"qubits", rho.qubits()}, {"entries", e}};
}

inline DensityMatrix state_from_json(const Json& j) {
  const int q = j.at("qubits").get<int>();
  require(q >= 1 && q <= kMaxQubits, "state qubit count out of range");
  const Eigen::Index dim = Eigen::Index{1} << q;
  const auto& e = j.at("entries");
  require(static_cast<Eigen::Index>(e.size()) == dim * dim, "state has the wrong number of entries");
  CMatrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index k = 0; k < dim; ++k) {
      const auto& c = e[static_cast<std::size_t>(i * dim + k)];
      m(i, k) = Complex(parse_exact(c.at(0)), parse_exact(c.at(1)));
    }
  return DensityMatrix(q, std::move(m));
}

inline Json protocol_to_json(const AdviceProtocol& p) {
  Json pts = Json::array(), tgt = Json::array(), states = Json::array();
  for (std::size_t i = 0; i < p.m(); ++i) {
    pts.push_back(inputs_to_json(p.points[i], p.n));
    Json r = Json::array();
    for (auto [z, v] : p.targets[i]) r.push_back(exact(v));
    tgt.push_back(r);
  }
  for (const auto& s : p.states) states.push_back(state_to_json(s));
  return {{"circuit", p.circuit.format()},
          {"n", p.n},
          {"advice_qubits", p.advice_qubits},
          {"language", io::table_hex(p.language)},
          {"alpha", exact(p.alpha)},
          {"denominator_bits", p.denominator_bits},
          {"points", pts},
          {"targets", tgt},
          {"states", states},
          {"register_state", p.register_state},
          {"target", table_to_json(p.target)},
          {"compiled", class_to_json(p.compiled_class())}};
}

/// Everything A and B need; the decomposition itself is not restored.
inline AdviceProtocol protocol_from_json(const Json& j) {
  AdviceProtocol p;
  p.circuit = Circuit::parse(j.at("circuit").get<std::string>());
  p.n = j.at("n").get<int>();
  const InputDomain dom(p.n);
  p.advice_qubits = j.at("advice_qubits").get<int>();
  p.language = io::parse_table_hex(j.at("language").get<std::string>(), dom);
  p.alpha = parse_exact(j.at("alpha"));
  p.denominator_bits = j.at("denominator_bits").get<int>();
  const auto& pts = j.at("points");
  const auto& tgt = j.at("targets");
  require(pts.size() == tgt.size(), "protocol points and targets differ in length");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    p.points.push_back(inputs_from_json(pts[i], dom));
    require(tgt[i].size() == p.points.back().size(), "one target per constrained input");
    std::map<Input, double> r;
    std::size_t k = 0;
    for (Input z : p.points.back()) r[z] = parse_exact(tgt[i][k++]);
    p.targets.push_back(std::move(r));
  }
  for (const auto& s : j.at("states")) p.states.push_back(state_from_json(s));
  p.register_state = j.at("register_state").get<std::vector<std::size_t>>();
  require(p.register_state.size() == p.m(), "one state index per register");
  for (auto s : p.register_state) require(s < p.states.size(), "register refers to a missing state");
  p.target = table_from_json(j.at("target"), dom);
  p.compiled = real_class_from_json(j.at("compiled")).members();
  return p;
}

}  // namespace majcert::json_io

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

// Seeded generators for the class families used by the experiment suites.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "majcert/core.hpp"
#include "majcert/errors.hpp"
#include "majcert/protocol.hpp"
#include "majcert/quantum.hpp"
#include "majcert/random.hpp"
#include "majcert/winnowing.hpp"

namespace majcert {

enum class ClassKind { random_boolean, point_functions, random_pconcept, constants_grid, l2_family, quantum_induced };

inline const char* class_kind_name(ClassKind k) {
  switch (k) {
    case ClassKind::random_boolean: return "random-boolean";
    case ClassKind::point_functions: return "point-functions";
    case ClassKind::random_pconcept: return "random-pconcept";
    case ClassKind::constants_grid: return "constants-grid";
    case ClassKind::l2_family: return "l2-family";
    case ClassKind::quantum_induced: return "quantum-induced";
  }
  return "?";
}

inline ClassKind parse_class_kind(const std::string& s) {
  for (auto k : {ClassKind::random_boolean, ClassKind::point_functions, ClassKind::random_pconcept,
                 ClassKind::constants_grid, ClassKind::l2_family, ClassKind::quantum_induced})
    if (s == class_kind_name(k)) return k;
  throw RejectedInput("unknown class kind '" + s + "'");
}

inline bool is_boolean_kind(ClassKind k) {
  return k == ClassKind::random_boolean || k == ClassKind::point_functions;
}

struct ClassParams {
  int n = 3;
  std::size_t size = 8;    // members requested (random kinds, l2 sampling)
  double flip = 0.5;       // random-boolean: members are f0 xor Bernoulli(flip) noise
  std::size_t points = 0;  // point-functions: number of points, 0 = all 2^n
  std::size_t levels = 11; // constants-grid
  std::size_t grid = 0;    // random-pconcept: values on multiples of 1/grid, 0 = continuous
  int qubits = 1;          // quantum-induced
};

/// A generated class; exactly one of `boolean` / `real` is set. Member 0 is
/// the designated target f*.
struct GeneratedClass {
  ClassKind kind = ClassKind::random_boolean;
  std::optional<ConceptClass> boolean;
  std::optional<PConceptClass> real;

  std::size_t size() const { return boolean ? boolean->size() : real->size(); }
  int bits() const { return boolean ? boolean->domain().bits() : real->domain().bits(); }
};

/// Two-input demo: Hadamard on bit 0, bit flip on bit 1, read the advice
/// qubit. Input bits above 1 are ignored.
inline Circuit advice_demo_circuit(int n) {
  require(n >= 1, "demo circuit needs at least one input bit");
  Circuit q(1, 0);
  q.add({GateKind::H, 0, -1, InputCondition{0, true}});
  if (n >= 2) q.add({GateKind::X, 0, -1, InputCondition{1, true}});
  return q;
}

/// Advice with Bloch vector (0.6, 0, 0.6): acceptance 0.2 or 0.8 on the demo
/// circuit, deciding "bit 1 is set" with margin 0.2.
inline DensityMatrix advice_demo_state() { return DensityMatrix::from_bloch(0.6, 0.0, 0.6); }

inline BooleanFunction advice_demo_language(int n) {
  return BooleanFunction::from_predicate(InputDomain(n), [](Input x) { return ((x >> 1) & 1U) != 0; });
}

namespace detail {

inline std::size_t max_boolean_functions(int n) {
  return n >= 6 ? SIZE_MAX : (std::size_t{1} << (std::size_t{1} << n));
}

}  // namespace detail

inline GeneratedClass generate_class(ClassKind kind, const ClassParams& p, std::uint64_t seed) {
  GeneratedClass out;
  out.kind = kind;
  Rng rng(Rng::derive(seed, class_kind_name(kind)));
  require(p.n >= 1, "n must be positive");
  const int cap = is_boolean_kind(kind) ? kMaxBooleanBits : kMaxRealBits;
  if (p.n > cap) throw CapExceeded("n=" + std::to_string(p.n) + " exceeds the cap of " + std::to_string(cap));
  const InputDomain dom(p.n);

  switch (kind) {
    case ClassKind::random_boolean: {
      require(p.size >= 1, "class size must be positive");
      if (p.size > detail::max_boolean_functions(p.n))
        throw CapExceeded("only " + std::to_string(detail::max_boolean_functions(p.n)) +
                          " Boolean functions exist on n=" + std::to_string(p.n));
      require(p.flip > 0.0 && p.flip <= 0.5, "flip probability must lie in (0, 0.5]");
      const auto base = BooleanFunction::from_predicate(dom, [&](Input) { return rng.coin(); });
      std::vector<BooleanFunction> fs{base};
      std::size_t guard = 0;
      while (fs.size() < p.size) {
        if (++guard > 1000 * p.size) throw CapExceeded("could not draw enough distinct functions");
        auto noise = BooleanFunction::from_predicate(dom, [&](Input) { return rng.uniform() < p.flip; });
        auto f = base ^ noise;
        bool dup = false;
        for (const auto& g : fs) dup = dup || g == f;
        if (!dup) fs.push_back(std::move(f));
      }
      out.boolean.emplace(std::move(fs));
      break;
    }
    case ClassKind::point_functions: {
      const std::size_t count = p.points == 0 ? dom.size() : p.points;
      require(count <= dom.size(), "more points requested than inputs exist");
      std::vector<Input> ys = dom.all_inputs();
      // partial Fisher-Yates for a seeded subset; all points keep index order
      if (count < dom.size()) {
        for (std::size_t i = 0; i < count; ++i) std::swap(ys[i], ys[i + rng.below(ys.size() - i)]);
        ys.resize(count);
        std::sort(ys.begin(), ys.end());
      }
      std::vector<BooleanFunction> fs{BooleanFunction::constant(dom, false)};
      for (Input y : ys) fs.push_back(BooleanFunction::point(dom, y));
      out.boolean.emplace(std::move(fs));
      break;
    }
    case ClassKind::random_pconcept: {
      require(p.size >= 1, "class size must be positive");
      std::vector<RealFunction> fs;
      std::size_t guard = 0;
      while (fs.size() < p.size) {
        if (++guard > 1000 * p.size) throw CapExceeded("could not draw enough distinct functions");
        auto f = RealFunction::from_fn(dom, [&](Input) {
          if (p.grid == 0) return rng.uniform();
          return static_cast<double>(rng.below(p.grid + 1)) / static_cast<double>(p.grid);
        });
        bool dup = false;
        for (const auto& g : fs) dup = dup || g == f;
        if (!dup) fs.push_back(std::move(f));
      }
      out.real.emplace(std::move(fs));
      break;
    }
    case ClassKind::constants_grid: {
      require(p.levels >= 2, "constants grid needs at least two levels");
      std::vector<RealFunction> fs;
      for (std::size_t i = 0; i < p.levels; ++i)
        fs.push_back(RealFunction::constant(dom, static_cast<double>(i) / static_cast<double>(p.levels - 1)));
      out.real.emplace(std::move(fs));
      break;
    }
    case ClassKind::l2_family: {
      const L2Family fam(p.n);
      if (p.n <= 3) {
        out.real.emplace(fam.enumerate());
      } else {
        require(p.size >= 1, "class size must be positive");
        std::vector<RealFunction> fs;
        std::size_t guard = 0;
        while (fs.size() < p.size) {
          if (++guard > 1000 * p.size) throw CapExceeded("could not draw enough distinct functions");
          auto f = fam.sample(rng);
          bool dup = false;
          for (const auto& g : fs) dup = dup || g == f;
          if (!dup) fs.push_back(std::move(f));
        }
        out.real.emplace(std::move(fs));
      }
      break;
    }
    case ClassKind::quantum_induced: {
      require(p.qubits >= 1 && p.qubits <= 2, "quantum-induced classes use 1 or 2 advice qubits");
      // with two qubits a CNOT first copies the second advice qubit's
      // parity into the readout
      Circuit q(p.qubits, 0);
      if (p.qubits == 2) q.add({GateKind::CNOT, 0, 1, std::nullopt});
      for (const auto& g : advice_demo_circuit(p.n).gates()) q.add(g);
      std::vector<DensityMatrix> states;
      states.reserve(p.size);
      for (std::size_t i = 0; i < p.size; ++i) states.push_back(random_mixed_state(p.qubits, rng));
      out.real.emplace(induced_pconcept(q, p.n, states));
      break;
    }
  }
  return out;
}

}  // namespace majcert

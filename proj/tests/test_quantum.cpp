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

#include <gtest/gtest.h>

#include <cmath>

#include "majcert/classes.hpp"
#include "majcert/quantum.hpp"

namespace majcert {
namespace {

/// Acceptance probability of a pure state by direct state-vector simulation.
double vector_accept(const Circuit& q, Input x, CVector psi) {
  const Eigen::Index extra = Eigen::Index{1} << q.qubits();
  CVector v = CVector::Zero(extra);
  v.head(psi.size()) = psi / psi.norm();  // remaining qubits in |0>
  const double s = 1.0 / std::sqrt(2.0);
  for (const auto& g : q.gates()) {
    if (g.when && (((x >> g.when->bit) & 1U) != 0) != g.when->value) continue;
    const Eigen::Index t = Eigen::Index{1} << g.target;
    CVector w = v;
    for (Eigen::Index i = 0; i < extra; ++i) {
      const bool one = (i & t) != 0;
      switch (g.kind) {
        case GateKind::X: w(i) = v(i ^ t); break;
        case GateKind::Z: w(i) = one ? -v(i) : v(i); break;
        case GateKind::T: w(i) = one ? v(i) * std::polar(1.0, M_PI / 4) : v(i); break;
        case GateKind::H: w(i) = one ? s * (v(i ^ t) - v(i)) : s * (v(i) + v(i ^ t)); break;
        case GateKind::CNOT: w(i) = (i & (Eigen::Index{1} << g.control)) ? v(i ^ t) : v(i); break;
      }
    }
    v = w;
  }
  double p = 0.0;
  for (Eigen::Index i = 0; i < extra; ++i)
    if (i & (Eigen::Index{1} << q.accept_qubit())) p += std::norm(v(i));
  return p;
}

Circuit random_circuit(int qubits, int n, Rng& rng) {
  Circuit c(qubits, static_cast<int>(rng.below(static_cast<std::uint64_t>(qubits))));
  std::vector<GateKind> kinds{GateKind::H, GateKind::T, GateKind::X, GateKind::Z};
  if (qubits >= 2) kinds.push_back(GateKind::CNOT);
  for (int i = 0; i < 12; ++i) {
    Gate g;
    g.kind = kinds[rng.below(kinds.size())];
    g.target = static_cast<int>(rng.below(static_cast<std::uint64_t>(qubits)));
    if (g.kind == GateKind::CNOT) g.control = (g.target + 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(qubits - 1)))) % qubits;
    if (rng.coin()) g.when = InputCondition{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), rng.coin()};
    c.add(g);
  }
  return c;
}

TEST(DensityMatrix, ValidatesItsInput) {
  CMatrix m = CMatrix::Zero(2, 2);
  EXPECT_THROW(DensityMatrix(1, m), RejectedInput);  // trace 0
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix(1, m), RejectedInput);  // negative eigenvalue
  m(0, 0) = 0.5;
  m(1, 1) = 0.5;
  m(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix(1, m), RejectedInput);  // not Hermitian
  EXPECT_THROW(DensityMatrix::from_bloch(1.0, 1.0, 0.0), RejectedInput);  // outside the ball
  EXPECT_THROW(DensityMatrix::maximally_mixed(7), RejectedInput);
}

TEST(DensityMatrix, TensorAndPartialTraceInvert) {
  Rng rng(100);
  const auto a = random_mixed_state(1, rng), b = random_mixed_state(2, rng);
  const auto ab = a.tensor(b);
  EXPECT_EQ(ab.qubits(), 3);
  EXPECT_LE(ab.partial_trace(0, 1).max_abs_difference(a), 1e-12);
  EXPECT_LE(ab.partial_trace(1, 2).max_abs_difference(b), 1e-12);
}

TEST(DensityMatrix, PurificationRoundTrips) {
  Rng rng(101);
  for (int q = 1; q <= 3; ++q) {
    const auto rho = random_mixed_state(q, rng);
    EXPECT_LE(state_from_purification(q, purification_of(rho)).max_abs_difference(rho), 1e-10);
  }
}

TEST(Circuit, IdentityOnOneAcceptsWithCertainty) {
  const Circuit id(1, 0);
  EXPECT_NEAR(accept_probability(id, 0, DensityMatrix::basis(1, 1)), 1.0, 1e-15);
  EXPECT_NEAR(accept_probability(id, 0, DensityMatrix::basis(1, 0)), 0.0, 1e-15);
}

TEST(Circuit, HadamardOnZeroIsFair) {
  Circuit h(1, 0);
  h.add({GateKind::H, 0, -1, std::nullopt});
  EXPECT_NEAR(accept_probability(h, 0, DensityMatrix::basis(1, 0)), 0.5, 1e-15);
  EXPECT_NEAR(accept_probability(h, 0, DensityMatrix::maximally_mixed(1)), 0.5, 1e-15);
}

TEST(Circuit, ConditionsSelectGates) {
  Circuit c(1, 0);
  c.add({GateKind::X, 0, -1, InputCondition{2, true}});
  EXPECT_EQ(accept_probability(c, 0b000, DensityMatrix::basis(1, 0)), 0.0);
  EXPECT_EQ(accept_probability(c, 0b100, DensityMatrix::basis(1, 0)), 1.0);
  EXPECT_EQ(c.input_bits_used(), 3);
  EXPECT_THROW(induced_function(c, 2, DensityMatrix::basis(1, 0)), RejectedInput);
}

TEST(Circuit, AncillaStartsInZero) {
  Circuit c(2, 1);
  c.add({GateKind::CNOT, 1, 0, std::nullopt});  // copies the advice bit
  EXPECT_NEAR(accept_probability(c, 0, DensityMatrix::basis(1, 1)), 1.0, 1e-15);
  EXPECT_NEAR(accept_probability(c, 0, DensityMatrix::from_bloch(0, 0, 0.4)), 0.3, 1e-15);
}

TEST(Circuit, ParseAndFormatRoundTrip) {
  const std::string text = "qubits=3 accept=2\nH 0\nCNOT 2 0 if 1=0\nT 1 if 0=1\nX 2\nZ 0\n";
  const auto c = Circuit::parse(text);
  EXPECT_EQ(c.format(), text);
  EXPECT_EQ(Circuit::parse(c.format()), c);
  const auto commented = Circuit::parse("# demo\nqubits=1 accept=0  # one qubit\n\nH 0 if 0=1\n");
  EXPECT_EQ(commented.gates().size(), 1u);
}

TEST(Circuit, ParseRejectsMalformedText) {
  EXPECT_THROW(Circuit::parse(""), RejectedInput);
  EXPECT_THROW(Circuit::parse("H 0\n"), RejectedInput);
  EXPECT_THROW(Circuit::parse("qubits=1 accept=0\nY 0\n"), RejectedInput);
  EXPECT_THROW(Circuit::parse("qubits=1 accept=0\nH 1\n"), RejectedInput);
  EXPECT_THROW(Circuit::parse("qubits=2 accept=0\nCNOT 0 0\n"), RejectedInput);
  EXPECT_THROW(Circuit::parse("qubits=1 accept=0\nH 0 if 0=2\n"), RejectedInput);
  EXPECT_THROW(Circuit::parse("qubits=1 accept=0\nH 0 when 0=1\n"), RejectedInput);
  EXPECT_THROW(Circuit::parse("qubits=1 accept=1\n"), RejectedInput);
}

TEST(Evolve, MatchesStateVectorSimulation) {
  Rng rng(102);
  for (int trial = 0; trial < 100; ++trial) {
    const int adv = 1 + static_cast<int>(rng.below(2));
    const int qubits = adv + static_cast<int>(rng.below(2));
    const auto c = random_circuit(qubits, 3, rng);
    const CVector psi = gaussian_vector(Eigen::Index{1} << adv, rng);
    const auto rho = DensityMatrix::pure(psi);
    for (Input x = 0; x < 8; ++x) EXPECT_NEAR(accept_probability(c, x, rho), vector_accept(c, x, psi), 1e-12);
  }
}

TEST(Evolve, MixtureAcceptanceIsTheEnsembleAverage) {
  Rng rng(103);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_circuit(2, 2, rng);
    std::vector<std::pair<double, DensityMatrix>> parts;
    std::vector<CVector> vecs;
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
      vecs.push_back(gaussian_vector(4, rng));
      const double w = rng.uniform() + 0.1;
      total += w;
      parts.emplace_back(w, DensityMatrix::pure(vecs.back()));
    }
    for (auto& p : parts) p.first /= total;
    const auto rho = DensityMatrix::mixture(parts);
    for (Input x = 0; x < 4; ++x) {
      double expect = 0.0;
      for (std::size_t k = 0; k < 3; ++k) expect += parts[k].first * vector_accept(c, x, vecs[k]);
      EXPECT_NEAR(accept_probability(c, x, rho), expect, 1e-12);
    }
  }
}

TEST(Evolve, AcceptanceIsAffineInTheState) {
  Rng rng(104);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_circuit(3, 2, rng);
    const auto rho = random_mixed_state(2, rng), sigma = random_mixed_state(2, rng);
    const double lam = rng.uniform();
    const auto mix = DensityMatrix::mixture({{lam, rho}, {1.0 - lam, sigma}});
    for (Input x = 0; x < 4; ++x)
      EXPECT_NEAR(accept_probability(c, x, mix),
                  lam * accept_probability(c, x, rho) + (1.0 - lam) * accept_probability(c, x, sigma), 1e-12);
  }
}

TEST(Evolve, PreservesTraceAndPositivity) {
  Rng rng(105);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = random_circuit(3, 2, rng);
    const auto rho = random_mixed_state(1, rng);
    for (Input x = 0; x < 4; ++x) {
      const auto out = evolve(c, x, rho);  // the constructor re-validates
      EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
      EXPECT_GE(out.min_eigenvalue(), -1e-12);
    }
  }
}

TEST(InducedClass, BasisStatesUnderReadoutAreConstants) {
  const Circuit readout(1, 0);
  const auto s = induced_pconcept(readout, 3, {DensityMatrix::basis(1, 0), DensityMatrix::basis(1, 1)});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0], RealFunction::constant(InputDomain(3), 0.0));
  EXPECT_EQ(s[1], RealFunction::constant(InputDomain(3), 1.0));
}

TEST(InducedClass, DemoCircuitDecidesBitOneWithMarginPointTwo) {
  const auto f = induced_function(advice_demo_circuit(2), 2, advice_demo_state());
  const double expect[4] = {0.2, 0.2, 0.8, 0.8};
  for (Input x = 0; x < 4; ++x) EXPECT_NEAR(f(x), expect[x], 1e-12);
  const auto lang = advice_demo_language(2);
  for (Input x = 0; x < 4; ++x) EXPECT_LE(std::fabs(f(x) - (lang(x) ? 1.0 : 0.0)), 0.2 + 1e-12);
}

TEST(InducedClass, RandomStatesGiveValidFunctions) {
  Rng rng(106);
  std::vector<DensityMatrix> states;
  for (int i = 0; i < 20; ++i) states.push_back(random_mixed_state(1, rng));
  const auto s = induced_pconcept(advice_demo_circuit(3), 3, states);
  EXPECT_LE(s.size(), 20u);
  for (const auto& f : s)
    for (Input x = 0; x < 8; ++x) {
      EXPECT_GE(f(x), 0.0);
      EXPECT_LE(f(x), 1.0);
    }
}

}  // namespace
}  // namespace majcert

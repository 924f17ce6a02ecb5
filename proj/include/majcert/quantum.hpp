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

// Exact density-matrix simulation on at most six qubits.
//
// Qubit q is bit q of the basis-state index. Circuits are gate lists over
// {H, T, CNOT, X, Z}; a gate may carry a condition "input bit b equals v",
// which is how the classical input selects the circuit. The accept qubit is
// measured in the computational basis and outcome 1 means accept.
//
// Circuit text format:
//   qubits=<int> accept=<int>
//   <gate> <target> [control] [if <bit>=<0|1>]
// Blank lines and text after '#' are ignored.

#pragma once

#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "majcert/core.hpp"
#include "majcert/io.hpp"
#include "majcert/random.hpp"

namespace majcert {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kMaxQubits = 6;
inline constexpr double kStateTolerance = 1e-9;

class DensityMatrix {
 public:
  /// Validated: Hermitian, unit trace, positive semidefinite (1e-9 slack).
  DensityMatrix(int qubits, CMatrix m) : qubits_(qubits), m_(std::move(m)) {
    require(qubits >= 1 && qubits <= kMaxQubits, "states are limited to 1..6 qubits");
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    require(m_.rows() == dim && m_.cols() == dim, "density matrix must be 2^q x 2^q");
    require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= kStateTolerance, "density matrix must be Hermitian");
    require(std::abs(m_.trace() - Complex(1.0, 0.0)) <= kStateTolerance, "density matrix must have trace 1");
    require(min_eigenvalue() >= -kStateTolerance, "density matrix must be positive semidefinite");
  }

  static DensityMatrix basis(int qubits, std::size_t index) {
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    require(static_cast<Eigen::Index>(index) < dim, "basis index out of range");
    CMatrix m = CMatrix::Zero(dim, dim);
    m(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(index)) = 1.0;
    return DensityMatrix(qubits, std::move(m));
  }

  static DensityMatrix pure(const CVector& psi) {
    const double norm = psi.norm();
    require(norm > 0.0, "zero state vector");
    int q = 0;
    while ((Eigen::Index{1} << q) < psi.size()) ++q;
    require((Eigen::Index{1} << q) == psi.size(), "state vector length must be a power of two");
    const CVector v = psi / norm;
    return DensityMatrix(q, v * v.adjoint());
  }

  static DensityMatrix maximally_mixed(int qubits) {
    const Eigen::Index dim = Eigen::Index{1} << qubits;
    return DensityMatrix(qubits, CMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  /// One qubit with Bloch vector (bx, by, bz), |b| <= 1.
  static DensityMatrix from_bloch(double bx, double by, double bz) {
    CMatrix m(2, 2);
    m << Complex(0.5 * (1 + bz), 0), Complex(0.5 * bx, -0.5 * by), Complex(0.5 * bx, 0.5 * by),
        Complex(0.5 * (1 - bz), 0);
    return DensityMatrix(1, std::move(m));
  }

  /// Convex combination; weights must be non-negative and sum to 1.
  static DensityMatrix mixture(const std::vector<std::pair<double, DensityMatrix>>& parts) {
    require(!parts.empty(), "empty mixture");
    const int q = parts.front().second.qubits();
    CMatrix m = CMatrix::Zero(parts.front().second.dim(), parts.front().second.dim());
    for (const auto& [w, rho] : parts) {
      require(rho.qubits() == q, "mixture parts must share a qubit count");
      require(w >= 0.0, "mixture weights must be non-negative");
      m += w * rho.matrix();
    }
    return DensityMatrix(q, std::move(m));
  }

  int qubits() const { return qubits_; }
  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }

  /// this (x) high, with this state on the low qubits.
  DensityMatrix tensor(const DensityMatrix& high) const {
    require(qubits_ + high.qubits_ <= kMaxQubits, "tensor product exceeds six qubits");
    const Eigen::Index a = dim(), b = high.dim();
    CMatrix m(a * b, a * b);
    for (Eigen::Index i1 = 0; i1 < b; ++i1)
      for (Eigen::Index j1 = 0; j1 < b; ++j1) m.block(i1 * a, j1 * a, a, a) = high.m_(i1, j1) * m_;
    return DensityMatrix(qubits_ + high.qubits_, std::move(m));
  }

  /// Reduced state of qubits [first, first + count).
  DensityMatrix partial_trace(int first, int count) const {
    require(first >= 0 && count >= 1 && first + count <= qubits_, "partial trace range out of bounds");
    const Eigen::Index lo = Eigen::Index{1} << first;
    const Eigen::Index mid = Eigen::Index{1} << count;
    const Eigen::Index hi = Eigen::Index{1} << (qubits_ - first - count);
    CMatrix r = CMatrix::Zero(mid, mid);
    for (Eigen::Index i = 0; i < mid; ++i)
      for (Eigen::Index j = 0; j < mid; ++j) {
        Complex acc = 0.0;
        for (Eigen::Index h = 0; h < hi; ++h)
          for (Eigen::Index l = 0; l < lo; ++l)
            acc += m_((h * mid + i) * lo + l, (h * mid + j) * lo + l);
        r(i, j) = acc;
      }
    return DensityMatrix(count, std::move(r));
  }

  double max_abs_difference(const DensityMatrix& o) const {
    require(qubits_ == o.qubits_, "qubit count mismatch");
    return (m_ - o.m_).cwiseAbs().maxCoeff();
  }

 private:
  int qubits_;
  CMatrix m_;
};

// ---------------------------------------------------------------------------
// Circuits

enum class GateKind { H, T, CNOT, X, Z };

struct InputCondition {
  int bit = 0;
  bool value = true;
  friend bool operator==(const InputCondition&, const InputCondition&) = default;
};

struct Gate {
  GateKind kind = GateKind::H;
  int target = 0;
  int control = -1;  // CNOT only
  std::optional<InputCondition> when;

  bool active(Input x) const { return !when || (((x >> when->bit) & 1U) != 0) == when->value; }
  friend bool operator==(const Gate&, const Gate&) = default;
};

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::T: return "T";
    case GateKind::CNOT: return "CNOT";
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
  }
  return "?";
}

inline GateKind parse_gate_name(const std::string& s) {
  if (s == "H") return GateKind::H;
  if (s == "T") return GateKind::T;
  if (s == "CNOT") return GateKind::CNOT;
  if (s == "X") return GateKind::X;
  if (s == "Z") return GateKind::Z;
  throw RejectedInput("unknown gate '" + s + "'");
}

class Circuit {
 public:
  Circuit(int qubits, int accept) : qubits_(qubits), accept_(accept) {
    require(qubits >= 1 && qubits <= kMaxQubits, "circuits are limited to 1..6 qubits");
    require(accept >= 0 && accept < qubits, "accept qubit out of range");
  }

  Circuit& add(Gate g) {
    require(g.target >= 0 && g.target < qubits_, "gate target out of range");
    if (g.kind == GateKind::CNOT) {
      require(g.control >= 0 && g.control < qubits_ && g.control != g.target, "CNOT needs a distinct control");
    } else {
      require(g.control == -1, "only CNOT takes a control");
    }
    if (g.when) require(g.when->bit >= 0 && g.when->bit < kMaxBooleanBits, "condition bit out of range");
    gates_.push_back(g);
    return *this;
  }

  int qubits() const { return qubits_; }
  int accept_qubit() const { return accept_; }
  const std::vector<Gate>& gates() const { return gates_; }

  /// Largest input bit referenced by a condition plus one (0 if none).
  int input_bits_used() const {
    int b = 0;
    for (const auto& g : gates_)
      if (g.when) b = std::max(b, g.when->bit + 1);
    return b;
  }

  static Circuit parse(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    std::optional<Circuit> c;
    while (std::getline(is, line)) {
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      line = io::trim(line);
      if (line.empty()) continue;
      std::istringstream ls(line);
      if (!c) {
        std::string a, b;
        ls >> a >> b;
        require(a.rfind("qubits=", 0) == 0 && b.rfind("accept=", 0) == 0,
                "circuit must start with 'qubits=<int> accept=<int>'");
        c.emplace(std::stoi(a.substr(7)), std::stoi(b.substr(7)));
        continue;
      }
      std::vector<std::string> tok;
      for (std::string t; ls >> t;) tok.push_back(t);
      Gate g;
      g.kind = parse_gate_name(tok.at(0));
      require(tok.size() >= 2, "gate line needs a target: '" + line + "'");
      g.target = std::stoi(tok[1]);
      std::size_t pos = 2;
      if (g.kind == GateKind::CNOT) {
        require(tok.size() >= 3, "CNOT needs a control: '" + line + "'");
        g.control = std::stoi(tok[2]);
        pos = 3;
      }
      if (pos < tok.size()) {
        require(tok[pos] == "if" && pos + 2 == tok.size(), "bad condition in '" + line + "'");
        const auto& cond = tok[pos + 1];
        const auto eq = cond.find('=');
        require(eq != std::string::npos, "condition must read '<bit>=<0|1>'");
        const std::string v = cond.substr(eq + 1);
        require(v == "0" || v == "1", "condition value must be 0 or 1");
        g.when = InputCondition{std::stoi(cond.substr(0, eq)), v == "1"};
      }
      c->add(g);
    }
    require(c.has_value(), "empty circuit description");
    return *c;
  }

  std::string format() const {
    std::ostringstream os;
    os << "qubits=" << qubits_ << " accept=" << accept_ << '\n';
    for (const auto& g : gates_) {
      os << gate_name(g.kind) << ' ' << g.target;
      if (g.kind == GateKind::CNOT) os << ' ' << g.control;
      if (g.when) os << " if " << g.when->bit << '=' << (g.when->value ? 1 : 0);
      os << '\n';
    }
    return os.str();
  }

  friend bool operator==(const Circuit&, const Circuit&) = default;

 private:
  int qubits_;
  int accept_;
  std::vector<Gate> gates_;
};

namespace detail {

inline void apply_one_qubit(CMatrix& m, const Eigen::Matrix2cd& u, int q) {
  const Eigen::Index dim = m.rows(), bit = Eigen::Index{1} << q;
  for (Eigen::Index i0 = 0; i0 < dim; ++i0) {
    if (i0 & bit) continue;
    const Eigen::Index i1 = i0 | bit;
    for (Eigen::Index c = 0; c < dim; ++c) {
      const Complex a = m(i0, c), b = m(i1, c);
      m(i0, c) = u(0, 0) * a + u(0, 1) * b;
      m(i1, c) = u(1, 0) * a + u(1, 1) * b;
    }
  }
  for (Eigen::Index j0 = 0; j0 < dim; ++j0) {
    if (j0 & bit) continue;
    const Eigen::Index j1 = j0 | bit;
    for (Eigen::Index r = 0; r < dim; ++r) {
      const Complex a = m(r, j0), b = m(r, j1);
      m(r, j0) = a * std::conj(u(0, 0)) + b * std::conj(u(0, 1));
      m(r, j1) = a * std::conj(u(1, 0)) + b * std::conj(u(1, 1));
    }
  }
}

inline void apply_cnot(CMatrix& m, int control, int target) {
  const Eigen::Index dim = m.rows(), cb = Eigen::Index{1} << control, tb = Eigen::Index{1} << target;
  auto perm = [&](Eigen::Index i) { return (i & cb) ? (i ^ tb) : i; };
  CMatrix out(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) out(perm(i), perm(j)) = m(i, j);
  m = std::move(out);
}

inline Eigen::Matrix2cd gate_matrix(GateKind k) {
  Eigen::Matrix2cd u;
  const double s = 1.0 / std::sqrt(2.0);
  switch (k) {
    case GateKind::H: u << s, s, s, -s; break;
    case GateKind::T: u << 1, 0, 0, std::polar(1.0, M_PI / 4); break;
    case GateKind::X: u << 0, 1, 1, 0; break;
    case GateKind::Z: u << 1, 0, 0, -1; break;
    case GateKind::CNOT: throw RejectedInput("CNOT is not a one-qubit gate");
  }
  return u;
}

}  // namespace detail

/// The state after running Q on input x, with rho on the low qubits and the
/// remaining circuit qubits starting in |0>.
inline DensityMatrix evolve(const Circuit& q, Input x, const DensityMatrix& rho) {
  require(rho.qubits() <= q.qubits(), "state has more qubits than the circuit");
  DensityMatrix state = rho;
  if (q.qubits() > rho.qubits()) state = rho.tensor(DensityMatrix::basis(q.qubits() - rho.qubits(), 0));
  CMatrix m = state.matrix();
  for (const auto& g : q.gates()) {
    if (!g.active(x)) continue;
    if (g.kind == GateKind::CNOT)
      detail::apply_cnot(m, g.control, g.target);
    else
      detail::apply_one_qubit(m, detail::gate_matrix(g.kind), g.target);
  }
  return DensityMatrix(q.qubits(), std::move(m));
}

/// Pr[Q(x, rho) accepts], exactly.
inline double accept_probability(const Circuit& q, Input x, const DensityMatrix& rho) {
  const DensityMatrix out = evolve(q, x, rho);
  const Eigen::Index bit = Eigen::Index{1} << q.accept_qubit();
  double p = 0.0;
  for (Eigen::Index i = 0; i < out.dim(); ++i)
    if (i & bit) p += out.matrix()(i, i).real();
  return std::clamp(p, 0.0, 1.0);
}

/// x -> Pr[Q(x, rho) accepts] on n input bits. Entries are snapped to
/// multiples of 2^-44 so that rounding noise does not split duplicates.
inline RealFunction induced_function(const Circuit& q, int n, const DensityMatrix& rho) {
  require(n <= kMaxRealBits, "induced functions are limited to n <= 14");
  require(q.input_bits_used() <= n, "circuit conditions on input bits beyond n");
  const InputDomain d(n);
  const double grid = std::ldexp(1.0, 44);
  return RealFunction::from_fn(d, [&](Input x) { return std::round(accept_probability(q, x, rho) * grid) / grid; });
}

inline PConceptClass induced_pconcept(const Circuit& q, int n, const std::vector<DensityMatrix>& states) {
  require(!states.empty(), "need at least one state");
  std::vector<RealFunction> fs;
  fs.reserve(states.size());
  for (const auto& s : states) {
    require(s.qubits() == states.front().qubits(), "states must share a qubit count");
    fs.push_back(induced_function(q, n, s));
  }
  return PConceptClass(std::move(fs));
}

// ---------------------------------------------------------------------------
// State sampling

inline CVector gaussian_vector(Eigen::Index dim, Rng& rng) {
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = rng.normal();
    v(i) = Complex(re, rng.normal());
  }
  return v;
}

inline DensityMatrix random_pure_state(int qubits, Rng& rng) {
  return DensityMatrix::pure(gaussian_vector(Eigen::Index{1} << qubits, rng));
}

/// Reduced state of a Gaussian-random pure state on 2p qubits.
inline DensityMatrix random_mixed_state(int qubits, Rng& rng) {
  require(2 * qubits <= kMaxQubits, "purified sampling is limited to 3 qubits");
  return random_pure_state(2 * qubits, rng).partial_trace(0, qubits);
}

/// State from purification parameters: 2 * 4^p reals, the real and
/// imaginary parts of a (not necessarily normalized) vector on 2p qubits.
inline DensityMatrix state_from_purification(int qubits, const std::vector<double>& params) {
  const Eigen::Index dim = Eigen::Index{1} << (2 * qubits);
  require(static_cast<Eigen::Index>(params.size()) == 2 * dim, "purification needs 2 * 4^p parameters");
  CVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v(i) = Complex(params[2 * i], params[2 * i + 1]);
  return DensityMatrix::pure(v).partial_trace(0, qubits);
}

/// Purification parameters of rho: sum_k sqrt(l_k) |v_k>|k>.
inline std::vector<double> purification_of(const DensityMatrix& rho) {
  require(2 * rho.qubits() <= kMaxQubits, "purification is limited to 3 qubits");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
  const Eigen::Index d = rho.dim();
  CVector v = CVector::Zero(d * d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double l = std::max(0.0, es.eigenvalues()(k));
    for (Eigen::Index i = 0; i < d; ++i) v(k * d + i) += std::sqrt(l) * es.eigenvectors()(i, k);
  }
  std::vector<double> p(static_cast<std::size_t>(2 * d * d));
  for (Eigen::Index i = 0; i < d * d; ++i) {
    p[static_cast<std::size_t>(2 * i)] = v(i).real();
    p[static_cast<std::size_t>(2 * i + 1)] = v(i).imag();
  }
  return p;
}

}  // namespace majcert

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

// Compiling quantum advice into a checkable two-machine protocol.
//
// A circuit Q and an advice state rho induce f_rho(x) = Pr[Q(x, rho)
// accepts]. A real decomposition of f_rho over a sampled class of induced
// functions gives register i a point set X_i and dyadic targets r_{i,z}.
// Machine A accepts m registers when every register i reproduces r_{i,z}
// to within 5 alpha on X_i; machine B picks a register uniformly and runs Q
// on it. Everything here is evaluated exactly, not by sampling.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "majcert/core.hpp"
#include "majcert/dimension.hpp"
#include "majcert/quantum.hpp"
#include "majcert/random.hpp"
#include "majcert/real_majcert.hpp"

namespace majcert {

/// m registers of p qubits each, held either as a product list or as one
/// joint state on m p <= 6 qubits (register i on qubits [i p, (i+1) p)).
class AdviceRegisters {
 public:
  static AdviceRegisters product(std::vector<DensityMatrix> regs) {
    require(!regs.empty(), "need at least one register");
    AdviceRegisters a;
    a.p_ = regs.front().qubits();
    for (const auto& r : regs) require(r.qubits() == a.p_, "registers must share a qubit count");
    a.count_ = regs.size();
    a.product_ = std::move(regs);
    return a;
  }

  static AdviceRegisters joint(DensityMatrix state, int register_qubits) {
    require(register_qubits >= 1 && state.qubits() % register_qubits == 0,
            "joint state must split into whole registers");
    AdviceRegisters a;
    a.p_ = register_qubits;
    a.count_ = static_cast<std::size_t>(state.qubits() / register_qubits);
    a.joint_ = std::move(state);
    return a;
  }

  std::size_t size() const { return count_; }
  int register_qubits() const { return p_; }
  bool is_joint() const { return joint_.has_value(); }
  const DensityMatrix& joint_state() const { return *joint_; }
  const std::vector<DensityMatrix>& product_states() const { return product_; }

  DensityMatrix reduced(std::size_t i) const {
    require(i < count_, "register index out of range");
    if (joint_) return joint_->partial_trace(static_cast<int>(i) * p_, p_);
    return product_[i];
  }

  std::vector<DensityMatrix> reduced_all() const {
    std::vector<DensityMatrix> out;
    out.reserve(count_);
    for (std::size_t i = 0; i < count_; ++i) out.push_back(reduced(i));
    return out;
  }

 private:
  AdviceRegisters() = default;
  int p_ = 1;
  std::size_t count_ = 0;
  std::vector<DensityMatrix> product_;
  std::optional<DensityMatrix> joint_;
};

struct AdviceProtocol {
  Circuit circuit{1, 0};
  int n = 1;
  int advice_qubits = 1;
  BooleanFunction language{InputDomain(1)};

  // classical advice
  std::vector<InputSet> points;                  // X_i
  std::vector<std::map<Input, double>> targets;  // r_{i,z}, z in X_i
  int denominator_bits = 0;                      // r_{i,z} are multiples of 2^-d
  double alpha = 0.0;                            // A accepts deviations <= 5 alpha

  // quantum advice: register i holds states[register_state[i]]
  std::vector<DensityMatrix> states;
  std::vector<std::size_t> register_state;

  // provenance of the classical advice
  RealFunction target = RealFunction::constant(InputDomain(1), 0.0);  // f_rho
  std::vector<RealFunction> compiled;  // the finite induced class
  RealDecomposition decomposition;
  double decomposition_alpha = 0.0;
  std::size_t alpha_halvings = 0;
  double soundness_bound = 0.0;  // worst |f_rho - avg g_i| over A-passing g_i in the class

  std::size_t m() const { return points.size(); }
  PConceptClass compiled_class() const { return PConceptClass(compiled); }

  AdviceRegisters honest_advice() const {
    std::vector<DensityMatrix> regs;
    regs.reserve(m());
    for (auto s : register_state) regs.push_back(states[s]);
    return AdviceRegisters::product(std::move(regs));
  }
};

/// Nearest multiple of 2^-d, ties rounded up.
inline double dyadic_round(double v, int d) {
  const double scale = std::ldexp(1.0, d);
  return std::floor(v * scale + 0.5) / scale;
}

namespace detail {

/// Worst |f*(x) - average g_i(x)| over choices g_i in S with
/// |g_i(z) - r_{i,z}| <= tol on X_i; infinity if some slot admits nothing.
inline double target_slot_worst_error(const PConceptClass& s, const RealFunction& fstar,
                                      const std::vector<InputSet>& points,
                                      const std::vector<std::map<Input, double>>& targets, double tol) {
  const std::size_t domain = s.domain().size();
  std::map<std::pair<InputSet, std::map<Input, double>>, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::vector<double> hi(domain, 0.0), lo(domain, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto key = std::make_pair(points[i], targets[i]);
    auto it = cache.find(key);
    if (it == cache.end()) {
      std::vector<double> h(domain, -1.0), l(domain, 2.0);
      bool any = false;
      for (const auto& g : s) {
        bool ok = true;
        for (auto [z, r] : targets[i])
          if (std::abs(g(z) - r) > tol) {
            ok = false;
            break;
          }
        if (!ok) continue;
        any = true;
        for (Input x = 0; x < domain; ++x) {
          h[x] = std::max(h[x], g(x));
          l[x] = std::min(l[x], g(x));
        }
      }
      if (!any) return std::numeric_limits<double>::infinity();
      it = cache.emplace(std::move(key), std::make_pair(std::move(h), std::move(l))).first;
    }
    for (Input x = 0; x < domain; ++x) {
      hi[x] += it->second.first[x];
      lo[x] += it->second.second[x];
    }
  }
  double worst = 0.0;
  const double m = static_cast<double>(points.size());
  for (Input x = 0; x < domain; ++x)
    worst = std::max({worst, std::abs(fstar(x) - hi[x] / m), std::abs(fstar(x) - lo[x] / m)});
  return worst;
}

}  // namespace detail

inline constexpr double kLanguageMargin = 0.2;
inline constexpr double kProtocolEps = 0.1;

/// Worst error of machine B's average over every per-register choice from
/// the compiled class that machine A accepts, against f_rho.
inline double conditional_soundness_error(const AdviceProtocol& p) {
  return detail::target_slot_worst_error(p.compiled_class(), p.target, p.points, p.targets, 5.0 * p.alpha);
}

/// Builds the protocol for advice rho_n and language table L.
///
/// The class is f_rho_n followed by the functions induced by `sample`
/// (first state kept per distinct function). r_{i,z} is f_i(z) rounded to
/// d = ceil(log2(1/alpha)) + 1 fractional bits. alpha starts at the
/// decomposition's alpha and is halved until every A-passing choice from the
/// class keeps B's average within eps of f_rho_n.
inline AdviceProtocol compile_advice(const Circuit& q, int n, const DensityMatrix& rho_n,
                                     const BooleanFunction& language, double eps,
                                     const std::vector<DensityMatrix>& sample, std::uint64_t seed) {
  require(language.domain().bits() == n, "language table must be over n input bits");
  require(q.qubits() >= rho_n.qubits(), "advice does not fit the circuit");
  const RealFunction fstar = induced_function(q, n, rho_n);
  for (Input x = 0; x < language.domain().size(); ++x)
    require(std::abs(fstar(x) - (language(x) ? 1.0 : 0.0)) <= kLanguageMargin + 1e-12,
            "advice state does not decide the language with margin 0.2 at input " + std::to_string(x));

  AdviceProtocol p;
  p.circuit = q;
  p.n = n;
  p.advice_qubits = rho_n.qubits();
  p.language = language;
  p.target = fstar;

  std::vector<DensityMatrix> reps;
  std::map<std::vector<double>, std::size_t> seen;
  auto add = [&](const DensityMatrix& rho) {
    require(rho.qubits() == rho_n.qubits(), "sampled states must match the advice size");
    RealFunction f = induced_function(q, n, rho);
    auto v = f.values();
    if (seen.emplace(std::vector<double>(v.begin(), v.end()), p.compiled.size()).second) {
      p.compiled.push_back(std::move(f));
      reps.push_back(rho);
    }
  };
  add(rho_n);
  for (const auto& s : sample) add(s);
  const PConceptClass cls(p.compiled);

  p.decomposition = real_majority_certificates(cls, fstar, eps, seed);
  const auto& d = p.decomposition;
  p.decomposition_alpha = d.alpha;
  p.points = d.points;

  double alpha = d.alpha;
  for (std::size_t h = 0;; ++h) {
    require(h < 40, "no protocol tolerance keeps the compiled class sound");
    const int bits = static_cast<int>(std::ceil(std::log2(1.0 / alpha))) + 1;
    std::vector<std::map<Input, double>> targets(d.m);
    for (std::size_t i = 0; i < d.m; ++i)
      for (Input z : d.points[i]) targets[i][z] = dyadic_round(d.funcs[i](z), bits);
    const double worst = detail::target_slot_worst_error(cls, fstar, d.points, targets, 5.0 * alpha);
    if (worst <= eps) {
      p.alpha = alpha;
      p.denominator_bits = bits;
      p.targets = std::move(targets);
      p.alpha_halvings = h;
      p.soundness_bound = worst;
      break;
    }
    alpha /= 2.0;
  }

  std::map<std::size_t, std::size_t> state_of_member;
  for (std::size_t i = 0; i < d.m; ++i) {
    const std::size_t member = d.indices[i];
    auto [it, fresh] = state_of_member.emplace(member, p.states.size());
    if (fresh) p.states.push_back(reps[member]);
    p.register_state.push_back(it->second);
  }
  return p;
}

struct VerifierReport {
  double deviation = 0.0;  // max over (i, z in X_i) of |Pr[Q(z, sigma_i)] - r_{i,z}|
  bool accept = false;
};

inline void require_register_shape(const AdviceProtocol& p, const AdviceRegisters& sigma) {
  require(sigma.size() == p.m(), "advice must have exactly m registers");
  require(sigma.register_qubits() == p.advice_qubits, "register size does not match the protocol");
}

/// Machine A. Depends on sigma only through its reduced registers.
inline VerifierReport verifier_A(const AdviceProtocol& p, const AdviceRegisters& sigma) {
  require_register_shape(p, sigma);
  VerifierReport r;
  for (std::size_t i = 0; i < p.m(); ++i) {
    const DensityMatrix reg = sigma.reduced(i);
    for (auto [z, t] : p.targets[i])
      r.deviation = std::max(r.deviation, std::abs(accept_probability(p.circuit, z, reg) - t));
  }
  r.accept = r.deviation <= 5.0 * p.alpha + 1e-12;
  return r;
}

/// Machine B: Pr[accept] = (1/m) sum_i Pr[Q(x, sigma_i) accepts].
inline double machine_B(const AdviceProtocol& p, const AdviceRegisters& sigma, Input x) {
  require_register_shape(p, sigma);
  require(p.language.domain().contains(x), "input outside domain");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.m(); ++i) acc += accept_probability(p.circuit, x, sigma.reduced(i));
  return acc / static_cast<double>(p.m());
}

/// max over x of |machine_B(x) - L(x)|.
inline double machine_B_error(const AdviceProtocol& p, const AdviceRegisters& sigma) {
  double e = 0.0;
  for (Input x = 0; x < p.language.domain().size(); ++x)
    e = std::max(e, std::abs(machine_B(p, sigma, x) - (p.language(x) ? 1.0 : 0.0)));
  return e;
}

/// Same protocol with A's tolerance scaled by `factor`.
inline AdviceProtocol with_inflated_alpha(AdviceProtocol p, double factor) {
  require(factor > 0.0, "inflation factor must be positive");
  p.alpha *= factor;
  return p;
}

// ---------------------------------------------------------------------------
// Empirical soundness probe

struct AdversaryResult {
  std::vector<DensityMatrix> group_states;  // one state per register group
  std::vector<std::size_t> register_group;  // register i -> group
  double b_error = 0.0;                     // best A-accepted error found
  double a_deviation = 0.0;
  Input x = 0;
  bool push_up = true;                      // searched direction at x
  std::size_t restarts = 0;
  std::size_t evaluations = 0;

  AdviceRegisters registers() const {
    std::vector<DensityMatrix> regs;
    regs.reserve(register_group.size());
    for (auto g : register_group) regs.push_back(group_states[g]);
    return AdviceRegisters::product(std::move(regs));
  }
};

/// Searches for advice that machine A accepts but on which machine B errs by
/// more than the honest bound.
///
/// Registers with identical (X_i, r_i) face identical constraints, and for a
/// fixed input x and direction B's error is a sum of independent per-register
/// terms, so one state per group is optimal; product states cover every
/// tuple of reduced states, which is all A and B can see. Restart j targets
/// (x, direction) number j mod 2^(n+1); restarts below 2^(n+1) start from
/// the honest states, later ones from random states. Each climb perturbs one
/// purification coordinate at a time, halving the step when a sweep stalls,
/// with a penalty on A-violation.
inline AdversaryResult adversary_search(const AdviceProtocol& p, std::size_t restarts, std::uint64_t seed,
                                        std::size_t max_sweeps = 60) {
  require(restarts >= 1, "need at least one restart");
  const int adv = p.advice_qubits;
  require(2 * adv <= kMaxQubits, "adversary search is limited to 3 advice qubits");
  const double tol = 5.0 * p.alpha;
  const std::size_t domain = p.language.domain().size();

  // register groups
  std::map<std::pair<InputSet, std::map<Input, double>>, std::size_t> group_of;
  AdversaryResult best;
  std::vector<double> weight;
  std::vector<std::size_t> honest_state;
  for (std::size_t i = 0; i < p.m(); ++i) {
    auto key = std::make_pair(p.points[i], p.targets[i]);
    auto [it, fresh] = group_of.emplace(key, weight.size());
    if (fresh) {
      weight.push_back(0.0);
      honest_state.push_back(p.register_state[i]);
    }
    weight[it->second] += 1.0 / static_cast<double>(p.m());
    best.register_group.push_back(it->second);
  }
  std::vector<const std::map<Input, double>*> group_targets(weight.size());
  for (auto& [key, g] : group_of) group_targets[g] = &key.second;

  std::size_t evals = 0;
  auto deviation = [&](std::size_t g, const DensityMatrix& rho) {
    double dev = 0.0;
    for (auto [z, t] : *group_targets[g]) dev = std::max(dev, std::abs(accept_probability(p.circuit, z, rho) - t));
    return dev;
  };

  best.b_error = -1.0;
  for (std::size_t g = 0; g < weight.size(); ++g) best.group_states.push_back(p.states[honest_state[g]]);
  const std::size_t targets = 2 * domain;
  Rng root(Rng::derive(seed, "adversary"));

  for (std::size_t r = 0; r < restarts; ++r) {
    const Input x = static_cast<Input>((r % targets) / 2);
    const double dir = (r % 2 == 0) ? 1.0 : -1.0;
    Rng rng = root.substream(r);
    std::vector<DensityMatrix> found;
    double bx = 0.0, worst_dev = 0.0;
    for (std::size_t g = 0; g < weight.size(); ++g) {
      std::vector<double> theta = r < targets ? purification_of(p.states[honest_state[g]])
                                              : purification_of(random_mixed_state(adv, rng));
      auto score = [&](const std::vector<double>& th, double& f, double& dev) {
        const DensityMatrix rho = state_from_purification(adv, th);
        ++evals;
        f = accept_probability(p.circuit, x, rho);
        dev = deviation(g, rho);
        return dir * f - 10.0 * std::max(0.0, dev - tol);
      };
      double f = 0.0, dev = 0.0;
      double cur = score(theta, f, dev);
      double step = 0.25;
      for (std::size_t sweep = 0; sweep < max_sweeps && step > 1e-6; ++sweep) {
        bool improved = false;
        for (std::size_t j = 0; j < theta.size(); ++j)
          for (double sgn : {1.0, -1.0}) {
            auto cand = theta;
            cand[j] += sgn * step;
            double cf, cd;
            const double sc = score(cand, cf, cd);
            if (sc > cur + 1e-15) {
              theta = std::move(cand);
              cur = sc;
              f = cf;
              dev = cd;
              improved = true;
            }
          }
        if (!improved) step *= 0.5;
      }
      DensityMatrix rho = state_from_purification(adv, theta);
      if (dev > tol + 1e-12) {
        // infeasible climb: fall back to the honest state for this group
        rho = p.states[honest_state[g]];
        f = accept_probability(p.circuit, x, rho);
        dev = deviation(g, rho);
      }
      bx += weight[g] * f;
      worst_dev = std::max(worst_dev, dev);
      found.push_back(std::move(rho));
    }
    const double err = std::abs(bx - (p.language(x) ? 1.0 : 0.0));
    if (err > best.b_error) {
      best.b_error = err;
      best.a_deviation = worst_dev;
      best.x = x;
      best.push_up = dir > 0;
      best.group_states = std::move(found);
    }
  }
  best.restarts = restarts;
  best.evaluations = evals;
  return best;
}

// ---------------------------------------------------------------------------
// Amplified constraint test

/// A circuit with its classical input fixed.
struct BoundCircuit {
  Circuit circuit;
  Input x = 0;
};

/// Probability that "apply C_i to each of K registers, accept iff the
/// accepted fraction c/K satisfies |c/K - r_i| <= 2/q" accepts.
///
/// Product registers: the count is Poisson-binomial, computed by
/// convolution. Joint registers: the circuit acts on each register in turn
/// and all accept qubits are read together (circuit must be ancilla-free).
inline double qma_plus_amplify(const std::vector<BoundCircuit>& circuits, const std::vector<double>& r,
                               double q, std::size_t k, const AdviceRegisters& sigma, std::size_t i) {
  require(circuits.size() == r.size() && i < circuits.size(), "circuit/target index mismatch");
  require(q > 0.0, "scale q must be positive");
  require(k >= 1 && sigma.size() == k, "need exactly K registers");
  const auto& c = circuits[i];
  std::vector<double> dist;
  if (!sigma.is_joint()) {
    dist.assign(k + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t reg = 0; reg < k; ++reg) {
      const double pa = accept_probability(c.circuit, c.x, sigma.reduced(reg));
      for (std::size_t cnt = reg + 1; cnt-- > 0;) {
        dist[cnt + 1] += dist[cnt] * pa;
        dist[cnt] *= 1.0 - pa;
      }
    }
  } else {
    const int p = sigma.register_qubits();
    require(c.circuit.qubits() == p, "joint evaluation needs an ancilla-free circuit on one register");
    Circuit wide(static_cast<int>(k) * p, c.circuit.accept_qubit());
    for (std::size_t reg = 0; reg < k; ++reg)
      for (Gate g : c.circuit.gates()) {
        g.target += static_cast<int>(reg) * p;
        if (g.control >= 0) g.control += static_cast<int>(reg) * p;
        wide.add(g);
      }
    const DensityMatrix out = evolve(wide, c.x, sigma.joint_state());
    dist.assign(k + 1, 0.0);
    for (Eigen::Index b = 0; b < out.dim(); ++b) {
      std::size_t cnt = 0;
      for (std::size_t reg = 0; reg < k; ++reg)
        cnt += (b >> (static_cast<int>(reg) * p + c.circuit.accept_qubit())) & 1;
      dist[cnt] += out.matrix()(b, b).real();
    }
  }
  double acc = 0.0;
  for (std::size_t cnt = 0; cnt <= k; ++cnt)
    if (std::abs(static_cast<double>(cnt) / static_cast<double>(k) - r[i]) <= 2.0 / q + 1e-12) acc += dist[cnt];
  return std::clamp(acc, 0.0, 1.0);
}

// ---------------------------------------------------------------------------

struct QuantumDimensionReport {
  DimensionResult measured;
  double bound = 0.0;  // p / gamma^2
  std::size_t class_size = 0;
};

/// Fat-shattering dimension of the class induced by `samples` random
/// p-qubit states.
inline QuantumDimensionReport fat_dim_quantum_check(int p, double gamma, std::size_t samples,
                                                    const Circuit& q, int n, std::uint64_t seed) {
  require(p >= 1 && p <= 2, "quantum dimension check supports 1 or 2 advice qubits");
  require(samples >= 1, "need at least one sampled state");
  Rng rng(Rng::derive(seed, "fat-dim"));
  std::vector<DensityMatrix> states;
  states.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) states.push_back(random_mixed_state(p, rng));
  const auto cls = induced_pconcept(q, n, states);
  return {fat_shattering_dim(cls, gamma), static_cast<double>(p) / (gamma * gamma), cls.size()};
}

}  // namespace majcert

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

// Data model: functions on {0,1}^n stored as explicit tables, certificates,
// finite concept classes, input distributions and the three distance
// functionals used throughout the library.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "majcert/errors.hpp"

namespace majcert {

/// An element of {0,1}^n; bit i of the integer is the i-th input bit.
using Input = std::uint32_t;

/// Sorted, duplicate-free list of inputs.
using InputSet = std::vector<Input>;

inline InputSet make_input_set(std::vector<Input> xs) {
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

inline InputSet set_union(const InputSet& a, const InputSet& b) {
  InputSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline constexpr int kMaxBooleanBits = 20;
inline constexpr int kMaxRealBits = 14;

class InputDomain {
 public:
  explicit InputDomain(int n) : n_(n) {
    require(n >= 1 && n <= kMaxBooleanBits,
            "input width n must be in [1, 20], got " + std::to_string(n));
  }

  int bits() const { return n_; }
  std::size_t size() const { return std::size_t{1} << n_; }
  bool contains(Input x) const { return x < size(); }

  InputSet all_inputs() const {
    InputSet xs(size());
    std::iota(xs.begin(), xs.end(), Input{0});
    return xs;
  }

  friend bool operator==(const InputDomain&, const InputDomain&) = default;

 private:
  int n_;
};

inline void require_same_domain(const InputDomain& a, const InputDomain& b) {
  require(a == b, "domain mismatch: n=" + std::to_string(a.bits()) + " vs n=" +
                      std::to_string(b.bits()));
}

inline void require_inputs_in(const InputDomain& d, std::span<const Input> xs) {
  for (Input x : xs) require(d.contains(x), "input " + std::to_string(x) + " outside domain");
}

/// Total Boolean function, bit-packed truth table.
class BooleanFunction {
 public:
  explicit BooleanFunction(InputDomain d)
      : domain_(d), words_((d.size() + 63) / 64, 0) {}

  template <class Pred>
  static BooleanFunction from_predicate(InputDomain d, Pred&& pred) {
    BooleanFunction f(d);
    for (Input x = 0; x < d.size(); ++x) f.set(x, static_cast<bool>(pred(x)));
    return f;
  }

  static BooleanFunction constant(InputDomain d, bool value) {
    return from_predicate(d, [value](Input) { return value; });
  }

  /// The function equal to 1 exactly at y.
  static BooleanFunction point(InputDomain d, Input y) {
    require(d.contains(y), "point outside domain");
    BooleanFunction f(d);
    f.set(y, true);
    return f;
  }

  const InputDomain& domain() const { return domain_; }
  std::span<const std::uint64_t> words() const { return words_; }

  bool operator()(Input x) const { return (words_[x >> 6] >> (x & 63)) & 1U; }

  void set(Input x, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (x & 63);
    if (v)
      words_[x >> 6] |= mask;
    else
      words_[x >> 6] &= ~mask;
  }

  std::size_t count_ones() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  BooleanFunction operator^(const BooleanFunction& o) const {
    require_same_domain(domain_, o.domain_);
    BooleanFunction r = *this;
    for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] ^= o.words_[i];
    return r;
  }

  std::size_t hamming(const BooleanFunction& o) const { return (*this ^ o).count_ones(); }

  friend bool operator==(const BooleanFunction& a, const BooleanFunction& b) {
    return a.domain_ == b.domain_ && a.words_ == b.words_;
  }
  friend std::strong_ordering operator<=>(const BooleanFunction& a, const BooleanFunction& b) {
    if (auto c = a.domain_.bits() <=> b.domain_.bits(); c != 0) return c;
    return a.words_ <=> b.words_;
  }

 private:
  InputDomain domain_;
  std::vector<std::uint64_t> words_;
};

/// Total function {0,1}^n -> [0,1].
class RealFunction {
 public:
  RealFunction(InputDomain d, std::vector<double> table) : domain_(d), table_(std::move(table)) {
    require(d.bits() <= kMaxRealBits, "real-valued tables are capped at n <= 14");
    require(table_.size() == d.size(), "table length must equal 2^n");
    for (double& v : table_) {
      require(std::isfinite(v) && v >= -1e-9 && v <= 1.0 + 1e-9,
              "real function values must lie in [0,1]");
      v = std::clamp(v, 0.0, 1.0);
    }
  }

  template <class Fn>
  static RealFunction from_fn(InputDomain d, Fn&& fn) {
    std::vector<double> t(d.size());
    for (Input x = 0; x < d.size(); ++x) t[x] = fn(x);
    return RealFunction(d, std::move(t));
  }

  static RealFunction constant(InputDomain d, double v) {
    return RealFunction(d, std::vector<double>(d.size(), v));
  }

  static RealFunction from_boolean(const BooleanFunction& f) {
    return from_fn(f.domain(), [&](Input x) { return f(x) ? 1.0 : 0.0; });
  }

  const InputDomain& domain() const { return domain_; }
  std::span<const double> values() const { return table_; }
  double operator()(Input x) const { return table_[x]; }

  friend bool operator==(const RealFunction&, const RealFunction&) = default;
  friend auto operator<=>(const RealFunction& a, const RealFunction& b) {
    return a.table_ <=> b.table_;
  }

 private:
  InputDomain domain_;
  std::vector<double> table_;
};

/// Partial Boolean function: inputs mapped to a required bit, all others free.
class Certificate {
 public:
  explicit Certificate(InputDomain d) : domain_(d) {}

  const InputDomain& domain() const { return domain_; }
  std::size_t size() const { return assignments_.size(); }
  bool empty() const { return assignments_.empty(); }
  const std::map<Input, bool>& assignments() const { return assignments_; }

  void assign(Input x, bool bit) {
    require(domain_.contains(x), "certificate input outside domain");
    auto [it, inserted] = assignments_.emplace(x, bit);
    require(inserted || it->second == bit, "conflicting assignment for input " + std::to_string(x));
  }

  bool constrains(Input x) const { return assignments_.contains(x); }

  bool consistent(const BooleanFunction& f) const {
    for (auto [x, b] : assignments_)
      if (f(x) != b) return false;
    return true;
  }

  /// True iff every assignment set in this certificate also appears in `other`.
  bool subset_of(const Certificate& other) const {
    for (auto [x, b] : assignments_) {
      auto it = other.assignments_.find(x);
      if (it == other.assignments_.end() || it->second != b) return false;
    }
    return true;
  }

  /// Same points, every bit XOR-ed with `shift` at that point.
  Certificate shifted(const BooleanFunction& shift) const {
    Certificate c(domain_);
    for (auto [x, b] : assignments_) c.assignments_.emplace(x, b != shift(x));
    return c;
  }

  friend bool operator==(const Certificate&, const Certificate&) = default;

 private:
  InputDomain domain_;
  std::map<Input, bool> assignments_;
};

/// Approximate constraints |g(x) - target(x)| <= tolerance for x in a point set.
class RealCertificate {
 public:
  RealCertificate(InputDomain d, std::map<Input, double> targets, double tolerance)
      : domain_(d), targets_(std::move(targets)), tolerance_(tolerance) {
    require(tolerance_ > 0.0, "real certificate tolerance must be positive");
    for (auto [x, v] : targets_) {
      require(d.contains(x), "real certificate input outside domain");
      require(v >= 0.0 && v <= 1.0, "real certificate target outside [0,1]");
    }
  }

  /// The certificate pinning f on X with tolerance alpha.
  static RealCertificate pinning(const RealFunction& f, const InputSet& xs, double alpha) {
    std::map<Input, double> t;
    for (Input x : xs) t.emplace(x, f(x));
    return RealCertificate(f.domain(), std::move(t), alpha);
  }

  const InputDomain& domain() const { return domain_; }
  const std::map<Input, double>& targets() const { return targets_; }
  double tolerance() const { return tolerance_; }

  InputSet points() const {
    InputSet xs;
    for (auto& [x, v] : targets_) xs.push_back(x);
    return xs;
  }

  bool satisfied_by(const RealFunction& g) const {
    for (auto [x, v] : targets_)
      if (std::abs(g(x) - v) > tolerance_) return false;
    return true;
  }

 private:
  InputDomain domain_;
  std::map<Input, double> targets_;
  double tolerance_;
};

/// Indices into a concept class, ascending. May be empty.
using MemberSet = std::vector<std::size_t>;

/// Finite, ordered, duplicate-free, non-empty set of functions sharing a
/// domain. Duplicates are dropped on construction keeping the first
/// occurrence, so member indices are stable for a given insertion sequence.
template <class Fn>
class BasicClass {
 public:
  using function_type = Fn;

  explicit BasicClass(std::vector<Fn> members) {
    require(!members.empty(), "concept class must be non-empty");
    const InputDomain d = members.front().domain();
    std::set<Fn> seen;
    for (auto& f : members) {
      require_same_domain(d, f.domain());
      if (seen.insert(f).second) members_.push_back(std::move(f));
    }
  }

  const InputDomain& domain() const { return members_.front().domain(); }
  std::size_t size() const { return members_.size(); }
  const Fn& operator[](std::size_t i) const { return members_[i]; }
  const std::vector<Fn>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  std::optional<std::size_t> index_of(const Fn& f) const {
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (members_[i] == f) return i;
    return std::nullopt;
  }

  std::size_t require_member(const Fn& f, const char* what = "function") const {
    auto i = index_of(f);
    require(i.has_value(), std::string(what) + " is not a member of the class");
    return *i;
  }

  MemberSet all_members() const {
    MemberSet m(members_.size());
    std::iota(m.begin(), m.end(), std::size_t{0});
    return m;
  }

  /// New class made of the given members (must be non-empty).
  BasicClass subclass(const MemberSet& idx) const {
    std::vector<Fn> fs;
    fs.reserve(idx.size());
    for (auto i : idx) fs.push_back(members_[i]);
    return BasicClass(std::move(fs));
  }

 private:
  std::vector<Fn> members_;
};

using ConceptClass = BasicClass<BooleanFunction>;
using PConceptClass = BasicClass<RealFunction>;

/// Probability distribution over {0,1}^n.
class Distribution {
 public:
  Distribution(InputDomain d, std::vector<double> weights) : domain_(d), weights_(std::move(weights)) {
    require(weights_.size() == d.size(), "distribution needs 2^n weights");
    double s = 0.0;
    for (double w : weights_) {
      require(std::isfinite(w) && w >= 0.0, "distribution weights must be non-negative");
      s += w;
    }
    require(std::abs(s - 1.0) <= 1e-12, "distribution weights must sum to 1");
  }

  /// Rescales non-negative weights to sum to 1. Tiny negative noise from
  /// floating-point solvers is clipped to zero.
  static Distribution normalized(InputDomain d, std::vector<double> w) {
    double s = 0.0;
    for (double& v : w) {
      if (v < 0.0 && v > -1e-9) v = 0.0;
      s += v;
    }
    require(s > 0.0, "cannot normalize an all-zero weight vector");
    for (double& v : w) v /= s;
    // one more pass keeps the sum within a couple of ulps of 1
    double s2 = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= s2;
    return Distribution(d, std::move(w));
  }

  static Distribution uniform(InputDomain d) {
    return Distribution(d, std::vector<double>(d.size(), 1.0 / static_cast<double>(d.size())));
  }

  static Distribution point_mass(InputDomain d, Input x) {
    require(d.contains(x), "point mass outside domain");
    std::vector<double> w(d.size(), 0.0);
    w[x] = 1.0;
    return Distribution(d, std::move(w));
  }

  const InputDomain& domain() const { return domain_; }
  std::span<const double> weights() const { return weights_; }
  double operator()(Input x) const { return weights_[x]; }

  /// Mass of {x : pred(x)}.
  template <class Pred>
  double mass(Pred&& pred) const {
    double m = 0.0;
    for (Input x = 0; x < weights_.size(); ++x)
      if (pred(x)) m += weights_[x];
    return m;
  }

 private:
  InputDomain domain_;
  std::vector<double> weights_;
};

// ---------------------------------------------------------------------------
// Distances

enum class Metric { inf, two, one };

/// Distance between f and g restricted to `xs`. Delta_inf over an empty set
/// is 0.
inline double distance(Metric metric, const RealFunction& f, const RealFunction& g,
                       std::span<const Input> xs) {
  require_same_domain(f.domain(), g.domain());
  require_inputs_in(f.domain(), xs);
  double acc = 0.0;
  for (Input x : xs) {
    const double d = std::abs(f(x) - g(x));
    switch (metric) {
      case Metric::inf: acc = std::max(acc, d); break;
      case Metric::two: acc += d * d; break;
      case Metric::one: acc += d; break;
    }
  }
  return metric == Metric::two ? std::sqrt(acc) : acc;
}

inline double distance(Metric metric, const RealFunction& f, const RealFunction& g) {
  return distance(metric, f, g, f.domain().all_inputs());
}

/// Sup distance over the whole domain without materializing the input set.
inline double sup_distance(const RealFunction& f, const RealFunction& g) {
  require_same_domain(f.domain(), g.domain());
  double m = 0.0;
  auto a = f.values(), b = g.values();
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Sup distance on `xs`, unchecked hot-path variant used by the winnowing loops.
inline double sup_distance_on(const RealFunction& f, const RealFunction& g, std::span<const Input> xs) {
  double m = 0.0;
  for (Input x : xs) m = std::max(m, std::abs(f(x) - g(x)));
  return m;
}

/// E_{x~D} |f(x) - g(x)|.
inline double distance_expected(const RealFunction& f, const RealFunction& g, const Distribution& d) {
  require_same_domain(f.domain(), g.domain());
  require_same_domain(f.domain(), d.domain());
  double acc = 0.0;
  for (Input x = 0; x < d.domain().size(); ++x) acc += d(x) * std::abs(f(x) - g(x));
  return acc;
}

// ---------------------------------------------------------------------------
// Class operations

/// Members of S consistent with every assignment of C (S[C]).
inline MemberSet restrict_class(const ConceptClass& s, const Certificate& c) {
  require_same_domain(s.domain(), c.domain());
  MemberSet out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (c.consistent(s[i])) out.push_back(i);
  return out;
}

/// Restriction of an already-restricted member set.
inline MemberSet restrict_members(const ConceptClass& s, const MemberSet& among, const Certificate& c) {
  MemberSet out;
  for (auto i : among)
    if (c.consistent(s[i])) out.push_back(i);
  return out;
}

inline bool is_isolated(const ConceptClass& s, const Certificate& c, const BooleanFunction& f) {
  const std::size_t idx = s.require_member(f);
  const MemberSet r = restrict_class(s, c);
  return r.size() == 1 && r.front() == idx;
}

/// {g xor f* : g in S}. Order is preserved, so member i maps to member i.
inline ConceptClass xor_shift(const ConceptClass& s, const BooleanFunction& fstar) {
  s.require_member(fstar, "shift function");
  std::vector<BooleanFunction> out;
  out.reserve(s.size());
  for (const auto& g : s) out.push_back(g ^ fstar);
  return ConceptClass(std::move(out));
}

/// Pointwise majority of an odd number of functions.
inline BooleanFunction pointwise_majority(std::span<const BooleanFunction> fs) {
  require(!fs.empty() && fs.size() % 2 == 1, "pointwise majority needs an odd, positive count");
  const InputDomain d = fs.front().domain();
  for (const auto& f : fs) require_same_domain(d, f.domain());
  std::vector<std::uint32_t> ones(d.size(), 0);
  for (const auto& f : fs)
    for (Input x = 0; x < d.size(); ++x) ones[x] += f(x) ? 1 : 0;
  return BooleanFunction::from_predicate(d, [&](Input x) { return 2 * ones[x] > fs.size(); });
}

inline RealFunction pointwise_average(std::span<const RealFunction> fs) {
  require(!fs.empty(), "pointwise average of an empty list");
  const InputDomain d = fs.front().domain();
  std::vector<double> acc(d.size(), 0.0);
  for (const auto& f : fs) {
    require_same_domain(d, f.domain());
    for (Input x = 0; x < d.size(); ++x) acc[x] += f(x);
  }
  for (double& v : acc) v /= static_cast<double>(fs.size());
  return RealFunction(d, std::move(acc));
}

}  // namespace majcert

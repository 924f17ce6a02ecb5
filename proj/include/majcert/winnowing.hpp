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

// Certificate construction by winnowing: repeatedly pin an input until the
// surviving members of a class collapse.
//
// Boolean: binary_search_winnow, weak_certify.
// Real-valued: epsilon_cover, safe_winnow (sup-norm, cover-halving),
// l1_winnow (multiplicative-weights progress measure).
// Also the family showing that no Delta_2 analogue of l1_winnow exists.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "majcert/core.hpp"
#include "majcert/io.hpp"
#include "majcert/random.hpp"

namespace majcert {

inline std::size_t ceil_log2(std::size_t v) {
  std::size_t k = 0;
  while ((std::size_t{1} << k) < v) ++k;
  return k;
}

/// Smallest t with (10/9)^t >= v.
inline std::size_t ceil_log_10_9(std::size_t v) {
  std::size_t t = 0;
  double p = 1.0;
  while (p < static_cast<double>(v) * (1.0 - 1e-12)) {
    p *= 10.0 / 9.0;
    ++t;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Boolean winnowing

struct WinnowOutcome {
  std::size_t index = 0;       // member of S isolated by the certificate
  Certificate certificate;
  std::size_t added = 0;       // assignments added by this call
};

/// Isolates one member of `alive` (a subset of S consistent with `c`) by
/// pinning the lexicographically smallest input on which survivors disagree.
/// The pinned bit is 0 when that keeps at most half of the survivors,
/// otherwise 1; either way the survivors at least halve.
inline WinnowOutcome binary_search_winnow(const ConceptClass& s, Certificate c, MemberSet alive) {
  require_same_domain(s.domain(), c.domain());
  require(!alive.empty(), "winnowing needs a non-empty member set");
  const std::size_t words = s[0].words().size();
  const std::size_t domain = s.domain().size();
  std::size_t added = 0;
  while (alive.size() > 1) {
    // inputs where survivors split: OR & ~AND over the packed tables
    Input split = 0;
    bool found = false;
    for (std::size_t w = 0; w < words && !found; ++w) {
      std::uint64_t any = 0, all = ~std::uint64_t{0};
      for (auto i : alive) {
        any |= s[i].words()[w];
        all &= s[i].words()[w];
      }
      std::uint64_t diff = any & ~all;
      if (w == words - 1 && domain % 64 != 0) diff &= (std::uint64_t{1} << (domain % 64)) - 1;
      if (diff != 0) {
        split = static_cast<Input>(64 * w + static_cast<std::size_t>(std::countr_zero(diff)));
        found = true;
      }
    }
    if (!found) throw SolverFailure("distinct survivors agree everywhere (duplicate members)");
    std::size_t zeros = 0;
    for (auto i : alive) zeros += s[i](split) ? 0 : 1;
    const bool bit = !(2 * zeros <= alive.size());
    c.assign(split, bit);
    ++added;
    MemberSet next;
    for (auto i : alive)
      if (s[i](split) == bit) next.push_back(i);
    alive = std::move(next);
  }
  return {alive.front(), std::move(c), added};
}

inline WinnowOutcome binary_search_winnow(const ConceptClass& s) {
  return binary_search_winnow(s, Certificate(s.domain()), s.all_members());
}

struct WeakCertifyResult {
  std::size_t index = 0;
  BooleanFunction f;
  Certificate certificate;
  double error_mass = 0.0;      // Pr_{x~D}[f(x) != f*(x)]
  std::size_t heavy_kills = 0;  // assignments from the heavy-member stage
  std::size_t winnow_steps = 0; // assignments from binary search
};

inline constexpr double kHeavyThreshold = 0.1;

/// Finds f in S with a small isolating certificate and D-disagreement with
/// f* at most 1/10.
///
/// With f* shifted to zero, a member is heavy when its D-mass of ones
/// exceeds 1/10. Inputs pinned to 0 are chosen greedily to kill the most
/// surviving heavy members (lowest input on ties) until none remain; binary
/// search then isolates a light survivor. f* itself is never killed.
inline WeakCertifyResult weak_certify(const ConceptClass& s, const BooleanFunction& fstar,
                                      const Distribution& d) {
  require_same_domain(s.domain(), d.domain());
  const std::size_t star = s.require_member(fstar, "target f*");
  const ConceptClass shifted = xor_shift(s, fstar);
  const std::size_t domain = s.domain().size();

  std::vector<double> w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    w[i] = d.mass([&](Input x) { return shifted[i](x); });

  Certificate c(s.domain());
  MemberSet alive = s.all_members();
  MemberSet heavy;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (w[i] > kHeavyThreshold) heavy.push_back(i);

  std::size_t kills = 0;
  while (!heavy.empty()) {
    Input best = 0;
    std::size_t best_count = 0;
    for (Input x = 0; x < domain; ++x) {
      if (c.constrains(x)) continue;
      std::size_t k = 0;
      for (auto i : heavy) k += shifted[i](x) ? 1 : 0;
      if (k > best_count) {
        best_count = k;
        best = x;
      }
    }
    if (best_count == 0) throw SolverFailure("no input kills a heavy member");
    c.assign(best, false);
    ++kills;
    auto keep = [&](const MemberSet& m) {
      MemberSet out;
      for (auto i : m)
        if (!shifted[i](best)) out.push_back(i);
      return out;
    };
    heavy = keep(heavy);
    alive = keep(alive);
  }
  // f* (shifted to zero) always survives stage one
  if (std::find(alive.begin(), alive.end(), star) == alive.end())
    throw SolverFailure("target was eliminated by heavy-member pinning");

  auto out = binary_search_winnow(shifted, std::move(c), std::move(alive));
  WeakCertifyResult r{out.index, s[out.index], out.certificate.shifted(fstar), w[out.index], kills,
                      out.added};
  return r;
}

// ---------------------------------------------------------------------------
// Covers

struct CoverResult {
  MemberSet members;  // indices into S, in the order chosen
  double epsilon = 0.0;

  std::size_t size() const { return members.size(); }

  PConceptClass cover(const PConceptClass& s) const {
    MemberSet sorted = members;
    std::sort(sorted.begin(), sorted.end());
    return s.subclass(sorted);
  }
};

/// Greedy eps-cover: add the member within eps (sup norm) of the most
/// uncovered members, lowest index on ties, until everything is covered.
inline CoverResult epsilon_cover(const PConceptClass& s, double eps) {
  require(eps >= 0.0, "cover radius must be non-negative");
  const std::size_t n = s.size();
  std::vector<std::vector<std::size_t>> near(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (sup_distance(s[i], s[j]) <= eps) near[i].push_back(j);
  std::vector<std::uint8_t> covered(n, 0);
  std::size_t left = n;
  CoverResult r{{}, eps};
  while (left > 0) {
    std::size_t best = 0, best_gain = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t gain = 0;
      for (auto j : near[i]) gain += covered[j] ? 0 : 1;
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    r.members.push_back(best);
    for (auto j : near[best])
      if (!covered[j]) {
        covered[j] = 1;
        --left;
      }
  }
  return r;
}

inline bool is_valid_cover(const PConceptClass& s, const CoverResult& c) {
  for (auto i : c.members)
    if (i >= s.size()) return false;
  for (const auto& f : s) {
    bool ok = false;
    for (auto i : c.members)
      if (sup_distance(f, s[i]) <= c.epsilon) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

inline void require_valid_cover(const PConceptClass& s, const CoverResult& c, double eps) {
  require(!c.members.empty(), "cover must be non-empty");
  require(c.epsilon <= eps + 1e-15, "cover radius larger than the requested eps");
  require(is_valid_cover(s, c), "not a valid cover of the class");
}

// ---------------------------------------------------------------------------
// Winnowing traces

struct WinnowStep {
  std::size_t step = 0;
  std::string action;  // "split", "replace" or "add"
  Input input = 0;
  std::size_t cover_survivors = 0;
  double measure = 0.0;
};

inline std::string format_trace(const std::vector<WinnowStep>& trace, int n) {
  std::ostringstream os;
  for (const auto& t : trace)
    os << "step=" << t.step << " action=" << t.action << " input=" << io::input_hex(t.input, n)
       << " |S◇|=" << t.cover_survivors << " M=" << io::format_real(t.measure) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Sup-norm winnowing

struct SafeWinnowResult {
  std::size_t index = 0;
  RealFunction f;
  InputSet z;
  double delta = 0.0;
  double k = 0.0;  // log2 |cover|
  std::vector<WinnowStep> trace;
};

/// Finds f in S near f* on Y and a set Z with |Z| <= log2|cover| such that
/// every g within delta = eps/(5 max(k,1)) of f on Y u Z is within 3 eps of f
/// everywhere.
///
/// Each round takes the first member g (by index) that is delta-close to the
/// current f on Y u Z yet more than 3 eps away at some input z (smallest z),
/// cuts the surviving members at the midpoint of f(z) and g(z), and keeps the
/// side holding fewer cover members; f moves to g if it fell on the other
/// side. The cover count at least halves each round. Both conclusions are
/// checked against every member before returning.
inline SafeWinnowResult safe_winnow(const PConceptClass& s, const RealFunction& fstar,
                                    const InputSet& y, double eps, const CoverResult& cover) {
  require(eps > 0.0, "eps must be positive");
  require_same_domain(s.domain(), fstar.domain());
  require_inputs_in(s.domain(), y);
  require_valid_cover(s, cover, eps);
  std::size_t cur = s.require_member(fstar, "target f*");
  const InputSet ys = make_input_set(y);
  const std::size_t domain = s.domain().size();

  std::vector<std::uint8_t> in_cover(s.size(), 0);
  for (auto i : cover.members) in_cover[i] = 1;
  const double k = std::log2(static_cast<double>(cover.size()));
  const double delta = eps / (5.0 * std::max(k, 1.0));

  MemberSet alive = s.all_members();
  InputSet z;
  std::vector<WinnowStep> trace;
  auto cover_count = [&](const MemberSet& m) {
    std::size_t c = 0;
    for (auto i : m) c += in_cover[i];
    return c;
  };

  while (cover_count(alive) > 1) {
    const InputSet yz = set_union(ys, z);
    std::size_t g = s.size();
    Input zt = 0;
    for (auto i : alive) {
      if (sup_distance_on(s[cur], s[i], yz) > delta) continue;
      for (Input x = 0; x < domain; ++x)
        if (std::abs(s[cur](x) - s[i](x)) > 3.0 * eps) {
          g = i;
          zt = x;
          break;
        }
      if (g < s.size()) break;
    }
    if (g == s.size()) break;

    z = set_union(z, InputSet{zt});
    const double v = 0.5 * (s[cur](zt) + s[g](zt));
    MemberSet a, b;
    for (auto i : alive) (s[i](zt) < v ? a : b).push_back(i);
    alive = cover_count(a) < cover_count(b) ? std::move(a) : std::move(b);
    const bool kept = std::binary_search(alive.begin(), alive.end(), cur);
    if (!kept) cur = g;
    trace.push_back({trace.size() + 1, kept ? "split" : "replace", zt, cover_count(alive),
                     static_cast<double>(cover_count(alive))});
  }

  // conclusion (i): delta-closeness on Y u Z forces 3 eps closeness
  const InputSet yz = set_union(ys, z);
  for (const auto& g : s)
    if (sup_distance_on(s[cur], g, yz) <= delta && sup_distance(s[cur], g) > 3.0 * eps)
      throw SolverFailure("safe winnowing postcondition (i) failed");
  // conclusion (ii): f stays within eps/5 of f* on Y
  if (sup_distance_on(s[cur], fstar, ys) > eps / 5.0 + 1e-12)
    throw SolverFailure("safe winnowing postcondition (ii) failed");
  if (static_cast<double>(z.size()) > k + 1e-9)
    throw SolverFailure("safe winnowing pinned more than log2|cover| inputs");

  return {cur, s[cur], std::move(z), delta, k, std::move(trace)};
}

// ---------------------------------------------------------------------------
// L1 winnowing

struct L1WinnowResult {
  std::size_t index = 0;
  RealFunction f;
  InputSet x;
  std::vector<double> progress;  // M_{f,X} after each step, starting with |cover|
  std::vector<double> ratios;    // progress[t+1] / progress[t]
  std::vector<WinnowStep> trace;

  /// Largest ratio seen, or 0 with no steps.
  double worst_ratio() const {
    double r = 0.0;
    for (double v : ratios) r = std::max(r, v);
    return r;
  }
};

/// Finds f and X such that every g with Delta_1(f,g)[X] <= 0.4 eps is within
/// 2 eps of f everywhere.
///
/// Progress measure M_{f,X} = sum over the cover of exp(-Delta_1(f,h)[X]).
/// While some g has Delta_1(f,g)[X] <= 0.4 eps but differs from f by more
/// than 2 eps at an input y, y joins X and f becomes whichever of f, g has
/// the smaller measure on the enlarged X.
inline L1WinnowResult l1_winnow(const PConceptClass& s, double eps, const CoverResult& cover) {
  require(eps > 0.0, "eps must be positive");
  require_valid_cover(s, cover, eps);
  const std::size_t domain = s.domain().size();
  std::size_t cur = 0;
  InputSet x;

  auto measure = [&](std::size_t f, const InputSet& xs) {
    double m = 0.0;
    for (auto h : cover.members) m += std::exp(-distance(Metric::one, s[f], s[h], xs));
    return m;
  };

  L1WinnowResult r{0, s[0], {}, {}, {}, {}};
  r.progress.push_back(measure(cur, x));
  for (;;) {
    std::size_t g = s.size();
    Input y = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (distance(Metric::one, s[cur], s[i], x) > 0.4 * eps) continue;
      for (Input t = 0; t < domain; ++t)
        if (std::abs(s[cur](t) - s[i](t)) > 2.0 * eps) {
          g = i;
          y = t;
          break;
        }
      if (g < s.size()) break;
    }
    if (g == s.size()) break;

    x = set_union(x, InputSet{y});
    const double mf = measure(cur, x), mg = measure(g, x);
    const bool replace = mg < mf;
    if (replace) cur = g;
    const double m = std::min(mf, mg);
    r.ratios.push_back(m / r.progress.back());
    r.progress.push_back(m);
    r.trace.push_back({r.trace.size() + 1, replace ? "replace" : "add", y, cover.size(), m});
  }

  for (const auto& g : s)
    if (distance(Metric::one, s[cur], g, x) <= 0.4 * eps && sup_distance(s[cur], g) > 2.0 * eps)
      throw SolverFailure("L1 winnowing postcondition failed");

  r.index = cur;
  r.f = s[cur];
  r.x = std::move(x);
  return r;
}

// ---------------------------------------------------------------------------
// Functions a_x / n with sum a_x = n^2: close in Delta_2 on large sets yet far in
// Delta_inf.

class L2Family {
 public:
  explicit L2Family(int n) : dom_(n), n_(n) {
    require(n >= 2, "L2 family needs n >= 2");
    require(n <= kMaxRealBits, "L2 family is capped at n <= 14");
  }

  int n() const { return n_; }
  const InputDomain& domain() const { return dom_; }

  RealFunction member(const std::vector<int>& a) const {
    require(a.size() == dom_.size(), "coefficient vector needs 2^n entries");
    long sum = 0;
    for (int v : a) {
      require(v >= 0 && v <= n_, "coefficients must lie in [0, n]");
      sum += v;
    }
    require(sum == static_cast<long>(n_) * n_, "coefficients must sum to n^2");
    return RealFunction::from_fn(dom_, [&](Input x) { return static_cast<double>(a[x]) / n_; });
  }

  /// Coefficients a_x = n f(x); rejects functions outside the family.
  std::vector<int> coefficients(const RealFunction& f) const {
    require_same_domain(dom_, f.domain());
    std::vector<int> a(dom_.size());
    long sum = 0;
    for (Input x = 0; x < dom_.size(); ++x) {
      const double v = f(x) * n_;
      a[x] = static_cast<int>(std::lround(v));
      require(std::abs(v - a[x]) <= 1e-9, "function is not of the form a_x / n");
      sum += a[x];
    }
    require(sum == static_cast<long>(n_) * n_, "coefficients must sum to n^2");
    return a;
  }

  /// Number of members: solutions of sum a_x = n^2 with 0 <= a_x <= n.
  std::uint64_t count() const {
    const std::size_t target = static_cast<std::size_t>(n_) * n_;
    std::vector<std::uint64_t> ways(target + 1, 0);
    ways[0] = 1;
    for (std::size_t x = 0; x < dom_.size(); ++x) {
      std::vector<std::uint64_t> next(target + 1, 0);
      for (std::size_t s = 0; s <= target; ++s)
        if (ways[s])
          for (int v = 0; v <= n_ && s + v <= target; ++v) next[s + v] += ways[s];
      ways = std::move(next);
    }
    return ways[target];
  }

  /// All members in lexicographic order of (a_0, a_1, ...). Small n only.
  PConceptClass enumerate() const {
    require(n_ <= 3, "explicit enumeration of the L2 family is limited to n <= 3");
    std::vector<RealFunction> out;
    std::vector<int> a(dom_.size(), 0);
    const int target = n_ * n_;
    auto rec = [&](auto&& self, std::size_t x, int left) -> void {
      const int rest = static_cast<int>(dom_.size() - x);
      if (left > rest * n_) return;
      if (x + 1 == dom_.size()) {
        a[x] = left;
        out.push_back(member(a));
        return;
      }
      for (int v = 0; v <= std::min(n_, left); ++v) {
        a[x] = v;
        self(self, x + 1, left - v);
      }
    };
    rec(rec, 0, target);
    return PConceptClass(std::move(out));
  }

  /// A member drawn by dropping n^2 unit increments on uniformly random
  /// inputs that still have room.
  RealFunction sample(Rng& rng) const {
    std::vector<int> a(dom_.size(), 0);
    for (int k = 0; k < n_ * n_; ++k) {
      Input x;
      do {
        x = static_cast<Input>(rng.below(dom_.size()));
      } while (a[x] == n_);
      ++a[x];
    }
    return member(a);
  }

  struct Corruption {
    RealFunction g;
    InputSet z;        // n inputs where g = f - 1/n
    Input y = 0;       // zero of f outside X where g = 1
    std::size_t overlap = 0;  // |Z n X|
    double delta_two = 0.0;   // Delta_2(f,g)[X]
    double delta_inf = 0.0;   // Delta_inf(f,g)
  };

  /// g equals f except: g(y) = 1 at the smallest zero y of f outside X, and
  /// g = f - 1/n on the n smallest inputs where f > 0. g stays in the family.
  /// Requires a zero of f outside X.
  Corruption corrupt(const RealFunction& f, const InputSet& xs) const {
    std::vector<int> a = coefficients(f);
    const InputSet x = make_input_set(xs);
    require_inputs_in(dom_, x);
    std::optional<Input> y;
    InputSet z;
    for (Input t = 0; t < dom_.size(); ++t) {
      if (a[t] == 0 && !y && !std::binary_search(x.begin(), x.end(), t)) y = t;
      if (a[t] > 0 && z.size() < static_cast<std::size_t>(n_)) z.push_back(t);
    }
    require(y.has_value(), "every zero of f lies in X");
    // sum a = n^2 and a <= n give at least n positive entries
    if (z.size() != static_cast<std::size_t>(n_)) throw SolverFailure("fewer than n positive inputs");
    a[*y] = n_;
    for (Input t : z) --a[t];
    Corruption c{member(a), z, *y, 0, 0.0, 0.0};
    for (Input t : z) c.overlap += std::binary_search(x.begin(), x.end(), t) ? 1 : 0;
    c.delta_two = distance(Metric::two, f, c.g, x);
    c.delta_inf = sup_distance(f, c.g);
    return c;
  }

 private:
  InputDomain dom_;
  int n_;
};

}  // namespace majcert

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

// Brute-force VC and fat-shattering dimension.
//
// Both searches run level by level: the shattered sets of size d+1 are found
// by extending shattered sets of size d (every subset of a shattered set is
// shattered), so the work tracks the number of shattered sets rather than
// all subsets of the domain.

#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "majcert/core.hpp"

namespace majcert {

inline constexpr int kDimensionCap = 12;

/// Result of a capped dimension search. When `at_least_cap` is set the
/// search found a shattered set of size `value` == cap and stopped; the true
/// dimension is >= value.
struct DimensionResult {
  int value = 0;
  bool at_least_cap = false;

  bool exact() const { return !at_least_cap; }
  friend bool operator==(const DimensionResult&, const DimensionResult&) = default;
};

namespace detail {

template <class ShatterCheck>
DimensionResult level_search(std::size_t domain_size, int cap, ShatterCheck&& shattered) {
  std::vector<std::vector<Input>> level;
  for (Input x = 0; x < domain_size; ++x) {
    std::vector<Input> a{x};
    if (shattered(a)) level.push_back(std::move(a));
  }
  int dim = level.empty() ? 0 : 1;
  while (!level.empty()) {
    if (dim >= cap) return {dim, static_cast<std::size_t>(dim) < domain_size};
    // level is sorted, so every subset of a candidate can be looked up
    std::vector<std::vector<Input>> next;
    for (std::size_t i = 0; i < level.size(); ++i) {
      const auto& a = level[i];
      // candidates share the prefix a[0..d-2] with a later set of this level
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        const auto& b = level[j];
        if (!std::equal(a.begin(), a.end() - 1, b.begin())) break;
        auto c = a;
        c.push_back(b.back());
        bool subsets_ok = true;
        for (std::size_t drop = 0; drop + 2 < c.size() && subsets_ok; ++drop) {
          std::vector<Input> sub;
          for (std::size_t t = 0; t < c.size(); ++t)
            if (t != drop) sub.push_back(c[t]);
          subsets_ok = std::binary_search(level.begin(), level.end(), sub);
        }
        if (subsets_ok && shattered(c)) next.push_back(std::move(c));
      }
    }
    if (next.empty()) break;
    level = std::move(next);
    ++dim;
  }
  return {dim, false};
}

}  // namespace detail

/// Size of the largest input set on which S realizes all 2^|A| labelings.
inline DimensionResult vc_dim(const ConceptClass& s, int cap = kDimensionCap) {
  require(cap >= 1 && cap <= 20, "dimension cap must be in [1, 20]");
  std::vector<std::uint8_t> seen;
  return detail::level_search(s.domain().size(), cap, [&](const std::vector<Input>& a) {
    const std::size_t patterns = std::size_t{1} << a.size();
    if (s.size() < patterns) return false;
    seen.assign(patterns, 0);
    std::size_t distinct = 0;
    for (const auto& f : s) {
      std::size_t p = 0;
      for (std::size_t i = 0; i < a.size(); ++i) p |= static_cast<std::size_t>(f(a[i])) << i;
      if (!seen[p]) {
        seen[p] = 1;
        if (++distinct == patterns) return true;
      }
    }
    return false;
  });
}

namespace detail {

/// Witness levels worth trying at one input. For sorted distinct values
/// v_a < v_b with v_b - v_a >= 2 gamma, the midpoint puts every value <= v_a
/// on the low side and every value >= v_b on the high side. Taking, for each
/// a, the smallest admissible b and dropping dominated pairs leaves the
/// maximal low/high splits; realizability of a labeling is monotone in both
/// sides, so these levels are sufficient.
inline std::vector<double> witness_levels(const PConceptClass& s, Input x, double gamma) {
  std::vector<double> vals;
  vals.reserve(s.size());
  for (const auto& f : s) vals.push_back(f(x));
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  std::vector<double> levels;
  std::size_t last_b = vals.size();
  for (std::size_t a = vals.size(); a-- > 0;) {
    std::size_t b = a + 1;
    while (b < vals.size()) {
      const double r = 0.5 * (vals[a] + vals[b]);
      if (vals[a] <= r - gamma && vals[b] >= r + gamma) break;
      ++b;
    }
    if (b >= vals.size()) continue;
    if (b == last_b) continue;  // a larger a with the same b dominates
    last_b = b;
    levels.push_back(0.5 * (vals[a] + vals[b]));
  }
  std::sort(levels.begin(), levels.end());
  return levels;
}

}  // namespace detail

/// Largest set gamma-shattered by S, searched over the sufficient grid of
/// member-value midpoints.
inline DimensionResult fat_shattering_dim(const PConceptClass& s, double gamma,
                                          int cap = kDimensionCap) {
  require(gamma > 0.0, "fat-shattering margin gamma must be positive");
  require(cap >= 1 && cap <= 20, "dimension cap must be in [1, 20]");
  const std::size_t domain = s.domain().size();
  std::vector<std::vector<double>> levels(domain);
  for (Input x = 0; x < domain; ++x) levels[x] = detail::witness_levels(s, x, gamma);

  // label[i]: partial pattern of member i, or -1 once it sits inside a margin
  std::vector<std::int64_t> label(s.size());

  std::vector<std::size_t> group;
  // every prefix labeling must keep enough members for all 2^rest completions
  auto groups_large_enough = [&](std::size_t width, std::size_t rest) {
    group.assign(std::size_t{1} << width, 0);
    for (auto l : label)
      if (l >= 0) ++group[static_cast<std::size_t>(l)];
    const std::size_t need = std::size_t{1} << rest;
    for (auto g : group)
      if (g < need) return false;
    return true;
  };

  auto shattered = [&](const std::vector<Input>& a) -> bool {
    if (s.size() < (std::size_t{1} << a.size())) return false;
    std::fill(label.begin(), label.end(), 0);
    // depth-first over one witness level per point, pruning as soon as the
    // surviving members cannot realize every prefix labeling
    auto rec = [&](auto&& self, std::size_t depth) -> bool {
      if (depth == a.size()) return true;
      const Input x = a[depth];
      const std::vector<std::int64_t> saved = label;
      for (double r : levels[x]) {
        for (std::size_t i = 0; i < s.size(); ++i) {
          if (saved[i] < 0) continue;
          const double v = s[i](x);
          if (v <= r - gamma)
            label[i] = saved[i];
          else if (v >= r + gamma)
            label[i] = saved[i] | (std::int64_t{1} << depth);
          else
            label[i] = -1;
        }
        if (groups_large_enough(depth + 1, a.size() - depth - 1) && self(self, depth + 1))
          return true;
      }
      label = saved;
      return false;
    };
    return rec(rec, 0);
  };
  return detail::level_search(domain, cap, shattered);
}

inline PConceptClass as_pconcept(const ConceptClass& s) {
  std::vector<RealFunction> fs;
  fs.reserve(s.size());
  for (const auto& f : s) fs.push_back(RealFunction::from_boolean(f));
  return PConceptClass(std::move(fs));
}

}  // namespace majcert

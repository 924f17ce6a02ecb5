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

// Real-valued majority certificates: functions f_1..f_m in S, point sets
// X_i and a tolerance alpha such that any g_i alpha-close to f_i on X_i
// average to within eps of f* everywhere.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "majcert/core.hpp"
#include "majcert/dimension.hpp"
#include "majcert/game.hpp"
#include "majcert/random.hpp"
#include "majcert/winnowing.hpp"

namespace majcert {

struct RealDecomposition {
  RealFunction target = RealFunction::constant(InputDomain(1), 0.0);
  std::vector<RealFunction> funcs;
  std::vector<InputSet> points;
  MemberSet indices;  // funcs[i] = S[indices[i]]
  double alpha = 0.0;
  double eps = 0.0;
  std::size_t m = 0;
  std::uint64_t seed = 0;

  // how the decomposition was found
  double beta = 0.0;
  double t = 0.0;                       // alpha = 0.4 beta / t
  std::size_t outer_iterations = 0;
  std::size_t strategies = 0;           // distinct (f, X) pairs in the game
  double game_penalty = 0.0;            // expected penalty of the final mix
  std::vector<std::size_t> sample_sizes;  // accepted |Y| draw count per generated strategy
  std::size_t attempts = 0;
  std::size_t fat_beta = 0;
  bool fat_at_least_cap = false;
};

/// Per-input extremes of the slot average: hi(x) averages, over slots, the
/// largest g(x) among members g alpha-close to f_i on X_i; lo(x) the smallest.
struct SlotExtremes {
  std::vector<double> hi, lo;
  bool all_slots_nonempty = true;
};

namespace detail {

inline void slot_extremes(const PConceptClass& s, const RealFunction& f, const InputSet& x,
                          double alpha, std::vector<double>& hi, std::vector<double>& lo,
                          bool& nonempty) {
  const std::size_t domain = s.domain().size();
  hi.assign(domain, -1.0);
  lo.assign(domain, 2.0);
  nonempty = false;
  for (const auto& g : s) {
    if (sup_distance_on(f, g, x) > alpha) continue;
    nonempty = true;
    for (Input z = 0; z < domain; ++z) {
      hi[z] = std::max(hi[z], g(z));
      lo[z] = std::min(lo[z], g(z));
    }
  }
}

}  // namespace detail

inline SlotExtremes real_decomposition_extremes(const PConceptClass& s, const RealDecomposition& d) {
  require(d.m > 0 && d.funcs.size() == d.m && d.points.size() == d.m, "malformed decomposition");
  require_same_domain(s.domain(), d.target.domain());
  const std::size_t domain = s.domain().size();
  SlotExtremes out{std::vector<double>(domain, 0.0), std::vector<double>(domain, 0.0), true};
  std::map<std::pair<std::vector<double>, InputSet>, std::size_t> seen;
  std::vector<std::vector<double>> his, los;
  std::vector<double> hi, lo;
  for (std::size_t i = 0; i < d.m; ++i) {
    auto vals = d.funcs[i].values();
    auto key = std::make_pair(std::vector<double>(vals.begin(), vals.end()), d.points[i]);
    auto it = seen.find(key);
    std::size_t slot;
    if (it == seen.end()) {
      bool nonempty = false;
      detail::slot_extremes(s, d.funcs[i], d.points[i], d.alpha, hi, lo, nonempty);
      if (!nonempty) out.all_slots_nonempty = false;
      slot = his.size();
      his.push_back(hi);
      los.push_back(lo);
      seen.emplace(std::move(key), slot);
    } else {
      slot = it->second;
    }
    for (Input z = 0; z < domain; ++z) {
      out.hi[z] += his[slot][z];
      out.lo[z] += los[slot][z];
    }
  }
  for (Input z = 0; z < domain; ++z) {
    out.hi[z] /= static_cast<double>(d.m);
    out.lo[z] /= static_cast<double>(d.m);
  }
  return out;
}

/// Largest |f*(x) - average g_i(x)| over admissible g_i, maximized over x.
/// Slots are independent, so the per-slot extremes give the exact worst case.
inline double real_decomposition_worst_error(const PConceptClass& s, const RealDecomposition& d) {
  const auto e = real_decomposition_extremes(s, d);
  if (!e.all_slots_nonempty) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (Input z = 0; z < e.hi.size(); ++z)
    worst = std::max({worst, std::abs(d.target(z) - e.hi[z]), std::abs(d.target(z) - e.lo[z])});
  return worst;
}

inline bool verify_real_decomposition(const PConceptClass& s, const RealDecomposition& d) {
  return real_decomposition_worst_error(s, d) <= d.eps;
}

// ---------------------------------------------------------------------------
// Sample-size checks

/// True iff every h in S within eps of f on X (sup norm) is within 11 eps
/// of f in D-mean.
inline bool occam_implication(const PConceptClass& s, const RealFunction& f, const Distribution& d,
                              const InputSet& x, double eps) {
  for (const auto& h : s)
    if (sup_distance_on(h, f, x) <= eps && distance_expected(h, f, d) > 11.0 * eps) return false;
  return true;
}

inline InputSet sample_inputs(const Distribution& d, std::size_t m, Rng& rng) {
  std::vector<Input> xs;
  xs.reserve(m);
  for (std::size_t i = 0; i < m; ++i) xs.push_back(static_cast<Input>(rng.discrete(d.weights())));
  return make_input_set(std::move(xs));
}

struct OccamResult {
  std::size_t passes = 0;
  std::size_t trials = 0;
  double pass_rate() const { return trials == 0 ? 0.0 : static_cast<double>(passes) / static_cast<double>(trials); }
};

/// Fraction of trials in which m i.i.d. draws from D make the implication
/// hold. Trial j draws from substream j of `seed`.
inline OccamResult occam_check(const PConceptClass& s, const RealFunction& f, const Distribution& d,
                               double eps, std::size_t m, std::size_t trials, std::uint64_t seed) {
  s.require_member(f, "reference function");
  require_same_domain(s.domain(), d.domain());
  OccamResult r{0, trials};
  for (std::size_t j = 0; j < trials; ++j) {
    Rng rng(Rng::derive(seed, j));
    if (occam_implication(s, f, d, sample_inputs(d, m, rng), eps)) ++r.passes;
  }
  return r;
}

/// Starting sample size 4 fat_beta(S) ceil(log2(1/beta)^2) + 8.
inline std::size_t occam_initial_size(std::size_t fat_beta, double beta) {
  const double l = std::log2(1.0 / beta);
  return 4 * fat_beta * static_cast<std::size_t>(std::ceil(l * l)) + 8;
}

struct SampleSchedule {
  InputSet y;
  std::size_t draws = 0;  // sample size that produced y
  std::size_t tries = 0;
};

/// Doubling schedule: up to 8 fresh samples per size, doubling the size
/// after 8 failures, until the implication holds for f with radius beta.
inline SampleSchedule occam_schedule(const PConceptClass& s, const RealFunction& f, const Distribution& d,
                                     double beta, std::size_t start, Rng& rng) {
  SampleSchedule out;
  std::size_t m = start;
  for (int doubling = 0; doubling < 40; ++doubling, m *= 2) {
    for (int retry = 0; retry < 8; ++retry) {
      ++out.tries;
      InputSet y = sample_inputs(d, m, rng);
      if (occam_implication(s, f, d, y, beta)) {
        out.y = std::move(y);
        out.draws = m;
        return out;
      }
    }
  }
  throw SolverFailure("sample-size schedule did not reach the Occam property");
}

// ---------------------------------------------------------------------------
// The penalty game

namespace detail {

struct RealStrategy {
  std::size_t func;  // index into S
  InputSet x;
  double log_cover;  // log2 |cover| used when winnowing
  std::size_t draws;
};

}  // namespace detail

/// Builds a real decomposition for f* in S with error eps.
///
/// Alice's pure strategies are pairs (f, X), penalized at x by the largest
/// |f*(x) - g(x)| over g alpha-close to f on X. Column generation: against
/// Bob's current mix D, sample Y from D (doubling schedule) until members
/// beta-close to f* on Y are 11 beta-close in D-mean (beta = eps/48), then
/// winnow those members with a 4 beta cover to get u and Z, and add
/// (u, Y u Z). alpha = 0.4 beta / t with t = max(1, largest log2 |cover|);
/// penalties are recomputed as alpha shrinks. Once the mix has expected
/// penalty <= eps/2 against every input, m = ceil(20 n / eps^2) slots are
/// sampled from it and checked exactly, resampling up to 64 times.
inline RealDecomposition real_majority_certificates(const PConceptClass& s, const RealFunction& fstar,
                                                    double eps, std::uint64_t seed) {
  require(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
  const std::size_t star = s.require_member(fstar, "target f*");
  const InputDomain dom = s.domain();
  const std::size_t domain = dom.size();
  const double beta = eps / 48.0;

  RealDecomposition out;
  out.target = fstar;
  out.eps = eps;
  out.seed = seed;
  out.beta = beta;

  if (s.size() == 1) {
    out.t = 1.0;
    out.alpha = 0.4 * beta / out.t;
    out.m = 1;
    out.funcs = {fstar};
    out.points = {InputSet{}};
    out.indices = {star};
    out.attempts = 1;
    return out;
  }

  const auto fat = fat_shattering_dim(s, beta);
  out.fat_beta = static_cast<std::size_t>(fat.value);
  out.fat_at_least_cap = fat.at_least_cap;
  const std::size_t start = occam_initial_size(out.fat_beta, beta);

  Rng game_rng(Rng::derive(seed, "real-game"));
  std::vector<detail::RealStrategy> rows;
  Distribution d = Distribution::uniform(dom);
  double alpha = 0.0, t = 1.0;
  std::vector<std::vector<double>> pen;  // pen[row][x]
  GameSolution sol;

  auto penalties = [&](const detail::RealStrategy& r) {
    std::vector<double> p(domain, 0.0);
    for (const auto& g : s) {
      if (sup_distance_on(s[r.func], g, r.x) > alpha) continue;
      for (Input x = 0; x < domain; ++x) p[x] = std::max(p[x], std::abs(fstar(x) - g(x)));
    }
    return p;
  };

  const std::size_t cap = 10 * s.size() + 20;
  bool done = false;
  for (std::size_t it = 0; it < cap && !done; ++it) {
    Rng rng = game_rng.substream(it);
    auto sched = occam_schedule(s, fstar, d, beta, start, rng);
    MemberSet close;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (sup_distance_on(fstar, s[i], sched.y) <= beta) close.push_back(i);
    const PConceptClass sp = s.subclass(close);
    const auto cover = epsilon_cover(sp, 4.0 * beta);
    const auto sw = safe_winnow(sp, fstar, sched.y, 4.0 * beta, cover);
    detail::RealStrategy row{close[sw.index], set_union(sched.y, sw.z), sw.k, sched.draws};
    for (const auto& r : rows)
      if (r.func == row.func && r.x == row.x)
        throw SolverFailure("strategy generator repeated a strategy below the target penalty");
    rows.push_back(std::move(row));
    out.sample_sizes.push_back(sched.draws);

    double tmax = 1.0;
    for (const auto& r : rows) tmax = std::max(tmax, r.log_cover);
    if (tmax != t || pen.empty()) {
      t = tmax;
      alpha = 0.4 * beta / t;
      pen.clear();
      for (const auto& r : rows) pen.push_back(penalties(r));
    } else {
      alpha = 0.4 * beta / t;
      pen.push_back(penalties(rows.back()));
    }

    PayoffMatrix a(rows.size(), domain);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (Input x = 0; x < domain; ++x) a(i, x) = 1.0 - pen[i][x];
    sol = solve_zero_sum(a);
    out.outer_iterations = it + 1;
    if (1.0 - sol.value <= eps / 2.0 + 1e-12)
      done = true;
    else
      d = Distribution::normalized(dom, sol.col_strategy);
  }
  if (!done) throw SolverFailure("penalty game hit its iteration cap");

  out.t = t;
  out.alpha = alpha;
  out.strategies = rows.size();
  {
    double worst = 0.0;
    for (Input x = 0; x < domain; ++x) {
      double e = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) e += sol.row_strategy[i] * pen[i][x];
      worst = std::max(worst, e);
    }
    out.game_penalty = worst;
  }

  // per-row extremes, then sample slots
  std::vector<std::vector<double>> hi(rows.size()), lo(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    bool nonempty = false;
    detail::slot_extremes(s, s[rows[i].func], rows[i].x, alpha, hi[i], lo[i], nonempty);
  }
  const std::size_t n = static_cast<std::size_t>(dom.bits());
  const std::size_t m = static_cast<std::size_t>(std::ceil(20.0 * static_cast<double>(n) / (eps * eps) - 1e-9));
  for (std::size_t attempt = 0; attempt < 64; ++attempt) {
    Rng rng(Rng::derive(seed, attempt));
    std::vector<std::size_t> pick(m);
    std::vector<double> shi(domain, 0.0), slo(domain, 0.0);
    for (auto& p : pick) {
      p = rng.discrete(sol.row_strategy);
      for (Input x = 0; x < domain; ++x) {
        shi[x] += hi[p][x];
        slo[x] += lo[p][x];
      }
    }
    bool ok = true;
    for (Input x = 0; x < domain && ok; ++x) {
      const double h = shi[x] / static_cast<double>(m), l = slo[x] / static_cast<double>(m);
      ok = std::abs(fstar(x) - h) <= eps && std::abs(fstar(x) - l) <= eps;
    }
    if (!ok) continue;
    out.m = m;
    out.attempts = attempt + 1;
    for (auto p : pick) {
      out.funcs.push_back(s[rows[p].func]);
      out.points.push_back(rows[p].x);
      out.indices.push_back(rows[p].func);
    }
    return out;
  }
  throw SolverFailure("no verified real decomposition after 64 samples");
}

}  // namespace majcert

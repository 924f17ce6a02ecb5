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

// Boolean majority certificates.
//
// The certificate game: Alice picks a certificate C isolating some f in S,
// Bob picks an input x, Alice wins when f(x) = f*(x). An optimal mix for
// Alice with value >= 0.9, sampled O(n) times, gives certificates whose
// isolated functions have pointwise majority f*.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "majcert/core.hpp"
#include "majcert/game.hpp"
#include "majcert/random.hpp"
#include "majcert/winnowing.hpp"

namespace majcert {

/// Mixed strategy for the certificate player. Support entry i is the pair
/// (certs[i], S[funcs[i]]) with S[certs[i]] = {S[funcs[i]]}.
struct AliceStrategy {
  std::vector<Certificate> certs;
  MemberSet funcs;
  std::vector<double> weights;
  double game_value = 0.0;         // min over x of the win probability
  std::vector<double> bob;         // optimal input distribution of the last restricted game
  std::vector<double> history;     // restricted game value per iteration
  std::size_t iterations = 0;
  std::size_t isolating_certificates = 0;  // full enumeration only

  std::size_t max_certificate_size() const {
    std::size_t k = 0;
    for (const auto& c : certs) k = std::max(k, c.size());
    return k;
  }
};

/// min over x of sum_i w_i [f_i(x) = f*(x)].
inline double strategy_value(const ConceptClass& s, const BooleanFunction& fstar,
                             const MemberSet& funcs, const std::vector<double>& w) {
  double v = 1.0;
  for (Input x = 0; x < s.domain().size(); ++x) {
    double p = 0.0;
    for (std::size_t i = 0; i < funcs.size(); ++i)
      if (s[funcs[i]](x) == fstar(x)) p += w[i];
    v = std::min(v, p);
  }
  return v;
}

namespace detail {

struct GameRow {
  std::size_t func;
  Certificate cert;
};

inline PayoffMatrix agreement_matrix(const ConceptClass& s, const BooleanFunction& fstar,
                                     const std::vector<GameRow>& rows) {
  PayoffMatrix a(rows.size(), s.domain().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Input x = 0; x < s.domain().size(); ++x)
      a(i, x) = s[rows[i].func](x) == fstar(x) ? 1.0 : 0.0;
  return a;
}

/// Drops zero-weight rows and recomputes the value from the kept support.
inline AliceStrategy finish_strategy(const ConceptClass& s, const BooleanFunction& fstar,
                                     const std::vector<GameRow>& rows, const GameSolution& sol) {
  AliceStrategy out;
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (sol.row_strategy[i] > 1e-15) total += sol.row_strategy[i];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (sol.row_strategy[i] <= 1e-15) continue;
    out.certs.push_back(rows[i].cert);
    out.funcs.push_back(rows[i].func);
    out.weights.push_back(sol.row_strategy[i] / total);
  }
  out.game_value = strategy_value(s, fstar, out.funcs, out.weights);
  out.bob = sol.col_strategy;
  return out;
}

inline std::uint64_t disagreement_mask(const BooleanFunction& f, const BooleanFunction& g) {
  std::uint64_t m = 0;
  for (Input x = 0; x < f.domain().size(); ++x)
    if (f(x) != g(x)) m |= std::uint64_t{1} << x;
  return m;
}

/// Smallest set of inputs meeting every set in `sets` (bit masks over at most
/// 64 inputs), if one of size <= k exists. Ties go to the set found first
/// when branching on the smallest unmet set, lowest input first.
inline std::optional<std::uint64_t> min_hitting_set(const std::vector<std::uint64_t>& sets,
                                                    std::size_t k) {
  std::optional<std::uint64_t> best;
  std::size_t best_size = k + 1;
  auto rec = [&](auto&& self, std::uint64_t chosen, std::size_t used) -> void {
    if (used >= best_size) return;
    const std::uint64_t* unmet = nullptr;
    int unmet_size = 65;
    for (const auto& s : sets)
      if ((s & chosen) == 0) {
        const int c = std::popcount(s);
        if (c < unmet_size) {
          unmet_size = c;
          unmet = &s;
        }
      }
    if (unmet == nullptr) {
      best = chosen;
      best_size = used;
      return;
    }
    if (used + 1 >= best_size) return;
    for (std::uint64_t rest = *unmet; rest; rest &= rest - 1)
      self(self, chosen | (rest & (~rest + 1)), used + 1);
  };
  rec(rec, 0, 0);
  return best;
}

/// For each member, a smallest isolating certificate of size <= k if any.
inline std::vector<std::optional<Certificate>> isolating_certificates(const ConceptClass& s,
                                                                      std::size_t k) {
  require(s.domain().bits() <= 6, "exact certificate search is limited to n <= 6");
  std::vector<std::optional<Certificate>> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<std::uint64_t> sets;
    for (std::size_t j = 0; j < s.size(); ++j)
      if (j != i) sets.push_back(disagreement_mask(s[i], s[j]));
    if (auto h = min_hitting_set(sets, k)) {
      Certificate c(s.domain());
      for (std::uint64_t rest = *h; rest; rest &= rest - 1) {
        const Input x = static_cast<Input>(std::countr_zero(rest));
        c.assign(x, s[i](x));
      }
      out[i] = std::move(c);
    }
  }
  return out;
}

}  // namespace detail

inline constexpr std::size_t kFullLpBudget = 100000;

/// Minimax strategy of the certificate game over every certificate of size
/// <= k, by enumeration. Rows with the same isolated function have identical
/// payoffs, so the LP keeps one row per function (the first certificate in
/// enumeration order: by size, then lexicographic input set).
inline AliceStrategy solve_game_full_lp(const ConceptClass& s, const BooleanFunction& fstar,
                                        std::size_t k) {
  s.require_member(fstar, "target f*");
  const std::size_t domain = s.domain().size();
  require(s.domain().bits() <= 6, "full certificate enumeration is limited to n <= 6");
  k = std::min(k, domain);

  // subsets of size <= k times members, as a work guard
  double subsets = 0.0, binom = 1.0;
  for (std::size_t j = 0; j <= k; ++j) {
    subsets += binom;
    binom = binom * static_cast<double>(domain - j) / static_cast<double>(j + 1);
  }
  require(subsets * static_cast<double>(s.size()) <= 1e8,
          "full enumeration too large: " + std::to_string(static_cast<long long>(subsets)) +
              " input sets x " + std::to_string(s.size()) + " members");

  std::vector<std::vector<std::uint64_t>> diff(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (j != i) diff[i].push_back(detail::disagreement_mask(s[i], s[j]));

  std::vector<std::optional<Certificate>> first(s.size());
  std::size_t count = 0;
  std::vector<Input> pick;
  auto visit = [&](std::uint64_t mask) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      bool isolates = true;
      for (auto d : diff[i])
        if ((d & mask) == 0) {
          isolates = false;
          break;
        }
      if (!isolates) continue;
      if (++count > kFullLpBudget)
        throw RejectedInput("more than " + std::to_string(kFullLpBudget) +
                            " isolating certificates of size <= " + std::to_string(k));
      if (!first[i]) {
        Certificate c(s.domain());
        for (Input x : pick) c.assign(x, s[i](x));
        first[i] = std::move(c);
      }
    }
  };
  for (std::size_t size = 0; size <= k; ++size) {
    pick.resize(size);
    auto rec = [&](auto&& self, std::size_t pos, Input start, std::uint64_t mask) -> void {
      if (pos == size) {
        visit(mask);
        return;
      }
      for (Input x = start; x + (size - pos) <= domain; ++x) {
        pick[pos] = x;
        self(self, pos + 1, x + 1, mask | (std::uint64_t{1} << x));
      }
    };
    rec(rec, 0, 0, 0);
  }

  std::vector<detail::GameRow> rows;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (first[i]) rows.push_back({i, *first[i]});
  require(!rows.empty(), "no member can be isolated with " + std::to_string(k) + " assignments");
  const auto sol = solve_zero_sum(detail::agreement_matrix(s, fstar, rows));
  AliceStrategy out = detail::finish_strategy(s, fstar, rows, sol);
  out.history.push_back(sol.value);
  out.iterations = 1;
  out.isolating_certificates = count;
  return out;
}

/// Column generation for the certificate game. The restricted game keeps
/// every input for Bob and a growing list of certificates for Alice; new
/// certificates come from weak_certify against Bob's current optimal mix,
/// which wins with probability >= 0.9 against it. Stops once the restricted
/// value reaches `target_value`.
inline AliceStrategy double_oracle_solve(const ConceptClass& s, const BooleanFunction& fstar,
                                         double target_value = 0.9) {
  s.require_member(fstar, "target f*");
  require(target_value <= 0.9, "weak certification only guarantees value 0.9");
  const InputDomain dom = s.domain();
  std::vector<detail::GameRow> rows;
  std::vector<double> history;
  Distribution d = Distribution::uniform(dom);
  const std::size_t cap = 10 * s.size();
  for (std::size_t it = 0; it < cap; ++it) {
    auto wc = weak_certify(s, fstar, d);
    for (const auto& r : rows)
      if (r.func == wc.index)
        throw SolverFailure("certificate generator repeated a strategy below the target value");
    rows.push_back({wc.index, std::move(wc.certificate)});
    const auto sol = solve_zero_sum(detail::agreement_matrix(s, fstar, rows));
    history.push_back(sol.value);
    if (sol.value >= target_value - 1e-12) {
      AliceStrategy out = detail::finish_strategy(s, fstar, rows, sol);
      out.history = std::move(history);
      out.iterations = it + 1;
      return out;
    }
    d = Distribution::normalized(dom, sol.col_strategy);
  }
  throw SolverFailure("double oracle hit its iteration cap of " + std::to_string(cap));
}

/// Exact column generation over certificates of size <= k. Alice's best
/// response to Bob's mix is the k-isolatable member agreeing with f* on the
/// most D-mass; the loop stops when it no longer beats the restricted value.
inline AliceStrategy double_oracle_exact(const ConceptClass& s, const BooleanFunction& fstar,
                                         std::size_t k) {
  s.require_member(fstar, "target f*");
  const InputDomain dom = s.domain();
  const auto certs = detail::isolating_certificates(s, k);
  auto best_response = [&](const Distribution& d) {
    std::size_t best = s.size();
    double best_v = -1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!certs[i]) continue;
      const double v = d.mass([&](Input x) { return s[i](x) == fstar(x); });
      if (v > best_v + 1e-12) {
        best_v = v;
        best = i;
      }
    }
    return std::pair{best, best_v};
  };

  Distribution d = Distribution::uniform(dom);
  std::vector<detail::GameRow> rows;
  std::vector<double> history;
  auto [first, first_v] = best_response(d);
  require(first < s.size(), "no member can be isolated with " + std::to_string(k) + " assignments");
  rows.push_back({first, *certs[first]});
  const std::size_t cap = 10 * s.size();
  for (std::size_t it = 0; it < cap; ++it) {
    const auto sol = solve_zero_sum(detail::agreement_matrix(s, fstar, rows));
    history.push_back(sol.value);
    d = Distribution::normalized(dom, sol.col_strategy);
    auto [br, br_v] = best_response(d);
    bool known = false;
    for (const auto& r : rows) known = known || r.func == br;
    if (known || br_v <= sol.value + 1e-10) {
      AliceStrategy out = detail::finish_strategy(s, fstar, rows, sol);
      out.history = std::move(history);
      out.iterations = it + 1;
      return out;
    }
    rows.push_back({br, *certs[br]});
  }
  throw SolverFailure("exact double oracle hit its iteration cap of " + std::to_string(cap));
}

/// Smallest certificate size in [0, k_max] whose exact game value reaches
/// `target`, with the value reached at each size tried.
struct SizeSweep {
  std::optional<std::size_t> first_k;
  std::vector<double> values;  // values[k], NaN when nothing is k-isolatable
};

inline SizeSweep certificate_size_sweep(const ConceptClass& s, const BooleanFunction& fstar,
                                        double target, std::size_t k_max) {
  SizeSweep out;
  for (std::size_t k = 0; k <= k_max; ++k) {
    double v = std::nan("");
    try {
      v = double_oracle_exact(s, fstar, k).game_value;
    } catch (const RejectedInput&) {
    }
    out.values.push_back(v);
    if (!out.first_k && v >= target - 1e-12) {
      out.first_k = k;
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decompositions

struct MajorityDecomposition {
  BooleanFunction target{InputDomain(1)};
  std::vector<Certificate> certs;
  std::vector<BooleanFunction> funcs;
  MemberSet indices;  // funcs[i] = S[indices[i]]
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::size_t attempts = 0;
  AliceStrategy strategy;
};

struct RobustDecomposition : MajorityDecomposition {
  std::size_t high_threshold() const { return (2 * m + 2) / 3; }  // ceil(2m/3)
  std::size_t low_threshold() const { return m / 3; }             // floor(m/3)
};

inline std::vector<std::size_t> ones_count(const std::vector<BooleanFunction>& fs, const InputDomain& d) {
  std::vector<std::size_t> c(d.size(), 0);
  for (const auto& f : fs)
    for (Input x = 0; x < d.size(); ++x) c[x] += f(x) ? 1 : 0;
  return c;
}

inline bool check_isolation(const ConceptClass& s, const MajorityDecomposition& d) {
  if (d.certs.size() != d.m || d.funcs.size() != d.m) return false;
  for (std::size_t i = 0; i < d.m; ++i) {
    const auto idx = s.index_of(d.funcs[i]);
    if (!idx || !is_isolated(s, d.certs[i], d.funcs[i])) return false;
  }
  return true;
}

inline bool verify_majority(const ConceptClass& s, const MajorityDecomposition& d) {
  if (d.m % 2 == 0 || !check_isolation(s, d)) return false;
  return pointwise_majority(d.funcs) == d.target;
}

inline bool verify_margins(const RobustDecomposition& d) {
  const auto c = ones_count(d.funcs, d.target.domain());
  for (Input x = 0; x < c.size(); ++x) {
    if (d.target(x) ? c[x] < d.high_threshold() : c[x] > d.low_threshold()) return false;
  }
  return true;
}

inline bool verify_robust(const ConceptClass& s, const RobustDecomposition& d) {
  return check_isolation(s, d) && verify_margins(d);
}

inline std::size_t smallest_odd_at_least(std::size_t v) { return v % 2 == 1 ? v : v + 1; }

namespace detail {

/// Draws m support entries per attempt from fresh substreams until `accept`
/// holds; after 64 failures m is doubled (kept odd) for one more round.
template <class Decomp, class Accept>
Decomp sample_decomposition(const ConceptClass& s, const BooleanFunction& fstar, std::uint64_t seed,
                            std::size_t m, AliceStrategy strat, Accept&& accept) {
  Decomp d;
  d.target = fstar;
  d.seed = seed;
  std::size_t attempt = 0;
  for (int round = 0; round < 2; ++round, m = smallest_odd_at_least(2 * m)) {
    for (int a = 0; a < 64; ++a, ++attempt) {
      Rng rng(Rng::derive(seed, attempt));
      d.m = m;
      d.certs.clear();
      d.funcs.clear();
      d.indices.clear();
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = rng.discrete(strat.weights);
        d.certs.push_back(strat.certs[j]);
        d.funcs.push_back(s[strat.funcs[j]]);
        d.indices.push_back(strat.funcs[j]);
      }
      if (accept(d)) {
        d.attempts = attempt + 1;
        d.strategy = std::move(strat);
        return d;
      }
    }
  }
  throw SolverFailure("no verified decomposition after " + std::to_string(attempt) + " attempts");
}

}  // namespace detail

/// Odd m >= 20n certificates C_i isolating f_i with MAJ(f_1..f_m) = f*,
/// sampled from the double-oracle strategy and verified on every input.
/// When the strategy is the pure f* (value 1) a single certificate suffices.
inline MajorityDecomposition majority_certificates(const ConceptClass& s, const BooleanFunction& fstar,
                                                   std::uint64_t seed) {
  auto strat = double_oracle_solve(s, fstar);
  const bool pure = strat.game_value >= 1.0;
  const std::size_t m = pure ? 1 : smallest_odd_at_least(20 * static_cast<std::size_t>(s.domain().bits()));
  return detail::sample_decomposition<MajorityDecomposition>(
      s, fstar, seed, m, std::move(strat),
      [&](const MajorityDecomposition& d) { return pointwise_majority(d.funcs) == fstar; });
}

/// As majority_certificates with odd m >= 60n, verified against the margins
/// sum >= ceil(2m/3) where f* = 1 and sum <= floor(m/3) where f* = 0.
inline RobustDecomposition robust_majority_certificates(const ConceptClass& s,
                                                        const BooleanFunction& fstar,
                                                        std::uint64_t seed) {
  auto strat = double_oracle_solve(s, fstar);
  const bool pure = strat.game_value >= 1.0;
  const std::size_t m = pure ? 1 : smallest_odd_at_least(60 * static_cast<std::size_t>(s.domain().bits()));
  return detail::sample_decomposition<RobustDecomposition>(
      s, fstar, seed, m, std::move(strat), [](const RobustDecomposition& d) { return verify_margins(d); });
}

/// Validates a hand-assembled robust decomposition.
inline RobustDecomposition make_robust_decomposition(const ConceptClass& s, const BooleanFunction& fstar,
                                                     std::vector<Certificate> certs,
                                                     std::vector<BooleanFunction> funcs) {
  s.require_member(fstar, "target f*");
  require(certs.size() == funcs.size() && !certs.empty(), "need one certificate per function");
  RobustDecomposition d;
  d.target = fstar;
  d.m = certs.size();
  d.certs = std::move(certs);
  d.funcs = std::move(funcs);
  for (const auto& f : d.funcs) d.indices.push_back(s.require_member(f));
  require(check_isolation(s, d), "each certificate must isolate its function");
  require(verify_margins(d), "decomposition violates the 2m/3 and m/3 margins");
  return d;
}

enum class OracleAnswer { zero, one, fail };

/// Combines claimed functions for the m certificate slots: FAIL unless every
/// claim is consistent with its certificate, else the majority bit at x
/// (1 iff sum >= m/2).
inline OracleAnswer untrusted_oracle_evaluate(const RobustDecomposition& d,
                                              const std::vector<BooleanFunction>& claims, Input x) {
  require(claims.size() == d.m, "need exactly m claimed functions");
  require(d.target.domain().contains(x), "input outside domain");
  std::size_t ones = 0;
  for (std::size_t i = 0; i < d.m; ++i) {
    require_same_domain(d.target.domain(), claims[i].domain());
    if (!d.certs[i].consistent(claims[i])) return OracleAnswer::fail;
    ones += claims[i](x) ? 1 : 0;
  }
  return 2 * ones >= d.m ? OracleAnswer::one : OracleAnswer::zero;
}

}  // namespace majcert

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

#include "majcert/game.hpp"
#include "majcert/random.hpp"

namespace majcert {
namespace {

PayoffMatrix matrix(const std::vector<std::vector<double>>& rows) {
  PayoffMatrix a(0, rows.front().size());
  for (const auto& r : rows) a.add_row(r);
  return a;
}

TEST(ZeroSumGame, MatchingPennies) {
  const auto s = solve_zero_sum(matrix({{1, -1}, {-1, 1}}));
  EXPECT_NEAR(s.value, 0.0, 1e-12);
  EXPECT_NEAR(s.row_strategy[0], 0.5, 1e-12);
  EXPECT_NEAR(s.col_strategy[0], 0.5, 1e-12);
}

TEST(ZeroSumGame, SaddlePoint) {
  // row 1 dominates; column 0 is the best reply
  const auto s = solve_zero_sum(matrix({{1, 2}, {3, 4}}));
  EXPECT_NEAR(s.value, 3.0, 1e-12);
  EXPECT_NEAR(s.row_strategy[1], 1.0, 1e-12);
  EXPECT_NEAR(s.col_strategy[0], 1.0, 1e-12);
}

TEST(ZeroSumGame, RockPaperScissors) {
  const auto s = solve_zero_sum(matrix({{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}}));
  EXPECT_NEAR(s.value, 0.0, 1e-12);
  for (double p : s.row_strategy) EXPECT_NEAR(p, 1.0 / 3, 1e-12);
  for (double q : s.col_strategy) EXPECT_NEAR(q, 1.0 / 3, 1e-12);
}

TEST(ZeroSumGame, TwoByTwoClosedForm) {
  // value (ad - bc) / (a + d - b - c) for a mixed 2x2 game
  const double a = 3, b = -1, c = -2, d = 1;
  const auto s = solve_zero_sum(matrix({{a, b}, {c, d}}));
  EXPECT_NEAR(s.value, (a * d - b * c) / (a + d - b - c), 1e-12);
  EXPECT_NEAR(s.row_strategy[0], (d - c) / (a + d - b - c), 1e-12);
}

TEST(ZeroSumGame, SingleEntry) {
  const auto s = solve_zero_sum(matrix({{-0.25}}));
  EXPECT_NEAR(s.value, -0.25, 1e-12);
}

TEST(ZeroSumGame, StrategiesCertifyTheValueOnRandomGames) {
  Rng rng(30);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(12), n = 1 + rng.below(12);
    PayoffMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.coin() ? rng.uniform() : -rng.uniform();
    const auto s = solve_zero_sum(a);
    double psum = 0.0, qsum = 0.0;
    for (double p : s.row_strategy) {
      EXPECT_GE(p, 0.0);
      psum += p;
    }
    for (double q : s.col_strategy) {
      EXPECT_GE(q, 0.0);
      qsum += q;
    }
    EXPECT_NEAR(psum, 1.0, 1e-12);
    EXPECT_NEAR(qsum, 1.0, 1e-12);
    // row mix guarantees at least the value; column mix concedes at most it
    EXPECT_GE(a.guaranteed_row_value(s.row_strategy), s.value - 1e-9);
    for (std::size_t i = 0; i < m; ++i) EXPECT_LE(a.row_payoff(i, s.col_strategy), s.value + 1e-9);
  }
}

TEST(ZeroSumGame, IsDeterministic) {
  Rng rng(31);
  PayoffMatrix a(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) a(i, j) = static_cast<double>(rng.below(2));
  const auto s1 = solve_zero_sum(a), s2 = solve_zero_sum(a);
  EXPECT_EQ(s1.row_strategy, s2.row_strategy);
  EXPECT_EQ(s1.value, s2.value);
}

TEST(ZeroSumGame, RejectsEmpty) { EXPECT_THROW(solve_zero_sum(PayoffMatrix(0, 3)), RejectedInput); }

}  // namespace
}  // namespace majcert

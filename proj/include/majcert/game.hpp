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

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "majcert/errors.hpp"

namespace majcert {

/// Dense payoff matrix, row-major. Rows belong to the maximizing player.
class PayoffMatrix {
 public:
  PayoffMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  void add_row(const std::vector<double>& row) {
    require(row.size() == cols_, "payoff row has wrong width");
    data_.insert(data_.end(), row.begin(), row.end());
    ++rows_;
  }

  /// min over columns of the row player's expected payoff under `p`.
  double guaranteed_row_value(const std::vector<double>& p) const {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < cols_; ++j) v = std::min(v, column_payoff(p, j));
    return v;
  }

  double column_payoff(const std::vector<double>& p, std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) s += p[i] * (*this)(i, j);
    return s;
  }

  double row_payoff(std::size_t i, const std::vector<double>& q) const {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * q[j];
    return s;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

struct GameSolution {
  std::vector<double> row_strategy;  // maximizer's optimal mix
  std::vector<double> col_strategy;  // minimizer's optimal mix
  double value = 0.0;
  int pivots = 0;
};

/// Exact-up-to-rounding minimax solution of a finite zero-sum game.
///
/// The payoffs are shifted to be >= 1 and the column player's problem
///   max sum_j w_j  s.t.  sum_j A'_ij w_j <= 1,  w >= 0
/// is solved by the primal simplex method from the all-slack basis (always
/// feasible, so no phase one). The row player's strategy is read off the
/// slack reduced costs. Bland's rule fixes both the entering and the
/// leaving variable, so the result is a deterministic function of the
/// matrix and simplex cannot cycle.
inline GameSolution solve_zero_sum(const PayoffMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  require(m > 0 && n > 0, "game needs at least one strategy per player");

  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) lo = std::min(lo, a(i, j));
  const double shift = 1.0 - lo;

  // tableau: m constraint rows + objective row; columns: n structural, m slack, rhs
  const std::size_t width = n + m + 1;
  std::vector<double> t((m + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) at(i, j) = a(i, j) + shift;
    at(i, n + i) = 1.0;
    at(i, width - 1) = 1.0;
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) at(m, j) = -1.0;

  constexpr double kTol = 1e-11;
  GameSolution sol;
  const int max_pivots = 50 * static_cast<int>(m + n) + 1000;
  for (;;) {
    std::size_t enter = width;
    for (std::size_t c = 0; c + 1 < width; ++c)
      if (at(m, c) < -kTol) {
        enter = c;
        break;
      }
    if (enter == width) break;

    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double coef = at(r, enter);
      if (coef <= kTol) continue;
      const double ratio = at(r, width - 1) / coef;
      if (ratio < best - kTol || (ratio <= best + kTol && leave < m && basis[r] < basis[leave])) {
        best = std::min(best, ratio);
        leave = r;
      }
    }
    if (leave == m) throw SolverFailure("zero-sum LP unbounded (cannot happen for shifted payoffs)");

    const double piv = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[leave] = enter;
    if (++sol.pivots > max_pivots) throw SolverFailure("zero-sum LP exceeded its pivot budget");
  }

  const double total = at(m, width - 1);
  if (!(total > 0.0)) throw SolverFailure("zero-sum LP returned a non-positive objective");

  std::vector<double> w(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) w[basis[r]] = std::max(0.0, at(r, width - 1));
  std::vector<double> u(m);
  for (std::size_t i = 0; i < m; ++i) u[i] = std::max(0.0, at(m, n + i));

  auto normalize = [](std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    for (double& x : v) x /= s;
  };
  normalize(w);
  normalize(u);
  sol.col_strategy = std::move(w);
  sol.row_strategy = std::move(u);
  sol.value = 1.0 / total - shift;
  return sol;
}

}  // namespace majcert

// Copyright 2026 The Inattention Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Zero-sum matrix games solved as a linear program with a dense tableau
// simplex (Bland's rule, so degenerate stage games cannot cycle).

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "inattention/common.hpp"
#include "inattention/game.hpp"

namespace inattention {

// Row-major payoff matrix; the row player maximizes.
class MatrixGame {
 public:
  MatrixGame(std::size_t rows, std::size_t cols, std::vector<double> payoff)
      : rows_(rows), cols_(cols), payoff_(std::move(payoff)) {
    if (rows == 0 || cols == 0) throw InvalidArgument("MatrixGame: empty payoff matrix");
    if (payoff_.size() != rows * cols) throw InvalidArgument("MatrixGame: size mismatch");
  }
  MatrixGame(std::size_t rows, std::size_t cols) : MatrixGame(rows, cols, std::vector<double>(rows * cols, 0.0)) {}

  static MatrixGame from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidArgument("MatrixGame: empty payoff matrix");
    std::vector<double> flat;
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) throw InvalidArgument("MatrixGame: ragged rows");
      flat.insert(flat.end(), r.begin(), r.end());
    }
    return MatrixGame(rows.size(), rows.front().size(), std::move(flat));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return payoff_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return payoff_[i * cols_ + j]; }
  std::span<const double> payoff() const { return payoff_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> payoff_;
};

struct MatrixGameSolution {
  double value = 0.0;
  ActionDistribution row_strategy;
  ActionDistribution col_strategy;
  // Certified bounds: row_strategy guarantees at least lower_bound, the
  // column strategy concedes at most upper_bound.
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

// min_j (p^T M)_j
inline double row_guarantee(const MatrixGame& m, std::span<const double> p) {
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double v = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) v += p[i] * m(i, j);
    worst = std::min(worst, v);
  }
  return worst;
}

// max_i (M q)_i
inline double col_concession(const MatrixGame& m, std::span<const double> q) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) v += m(i, j) * q[j];
    best = std::max(best, v);
  }
  return best;
}

namespace detail {

// Clamp solver noise and renormalize.
inline std::vector<double> clean_distribution(std::vector<double> p) {
  double total = 0.0;
  for (double& x : p) {
    if (x < 0.0) x = 0.0;
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

}  // namespace detail

// Solves max_p min_q p^T M q. The payoff is shifted to be strictly positive
// and the column LP  max 1^T y  s.t. M y <= 1, y >= 0  is solved from the
// slack basis; the row strategy is read off the final dual prices.
inline MatrixGameSolution solve_matrix_game(const MatrixGame& game, double tol = 1e-9) {
  const std::size_t m = game.rows();
  const std::size_t n = game.cols();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : game.payoff()) {
    if (!std::isfinite(x)) throw InvalidArgument("solve_matrix_game: non-finite payoff entry");
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  const double scale = std::max(1.0, hi - lo);
  const double shift = 1.0 - lo / scale;

  // Tableau rows 0..m-1 are constraints, row m is the objective.
  // Columns 0..n-1 structural, n..n+m-1 slack, n+m right-hand side.
  const std::size_t width = n + m + 1;
  std::vector<double> t((m + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) at(i, j) = game(i, j) / scale + shift;
    at(i, n + i) = 1.0;
    at(i, n + m) = 1.0;
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) at(m, j) = -1.0;

  // Reduced-cost and pivot thresholds. Entries are O(1) after scaling;
  // accepting tiny pivots on nearly parallel rows wrecks the tableau.
  constexpr double kEps = 1e-12;
  constexpr double kPivotEps = 1e-9;
  const std::size_t max_pivots = 50 * (m + n) + 1000;
  std::size_t pivots = 0;
  for (;; ++pivots) {
    if (pivots > max_pivots) throw NumericalError("solve_matrix_game: pivot limit reached");
    std::size_t enter = width;
    for (std::size_t c = 0; c + 1 < width; ++c) {
      if (at(m, c) < -kEps) {
        enter = c;
        break;
      }
    }
    if (enter == width) break;
    std::size_t leave = m;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < m; ++r) {
      const double a = at(r, enter);
      if (a <= kPivotEps) continue;
      const double ratio = at(r, n + m) / a;
      // Minimum ratio; ties go to the lowest basic variable (Bland).
      if (leave == m || ratio < best_ratio - kEps ||
          (ratio <= best_ratio + kEps && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    // Columns are positive and b = 1, so the LP is bounded.
    if (leave == m) throw NumericalError("solve_matrix_game: unbounded pivot");
    const double piv = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= piv;
    for (std::size_t r = 0; r <= m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[leave] = enter;
  }

  const double z = at(m, n + m);
  if (!(z > 0.0)) throw NumericalError("solve_matrix_game: degenerate objective");
  std::vector<double> y(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (basis[r] < n) y[basis[r]] = at(r, n + m);
  }
  std::vector<double> x(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) x[i] = at(m, n + i);

  ActionDistribution row(detail::clean_distribution(std::move(x)));
  ActionDistribution col(detail::clean_distribution(std::move(y)));
  const double lower = row_guarantee(game, row.probs());
  const double upper = col_concession(game, col.probs());
  if (upper - lower > tol) {
    throw NumericalError("solve_matrix_game: duality gap exceeds tolerance");
  }
  // Both bounds are exact evaluations of the returned strategies; the
  // midpoint is within tol / 2 of the true value.
  const double value = 0.5 * (lower + upper);
  return MatrixGameSolution{value, std::move(row), std::move(col), lower, upper};
}

}  // namespace inattention

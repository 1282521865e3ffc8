// Copyright 2026 The trackfuse Authors
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

#include "trackfuse/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace trackfuse
{

namespace
{

// Shortest augmenting path Hungarian with potentials, for n <= m.
// a is 1-indexed (n+1) x (m+1); returns col -> row (0 = free).
std::vector<std::size_t> hungarian(const std::vector<std::vector<double>> & a, std::size_t n, std::size_t m)
{
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = a[i0][j] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  return p;
}

}  // namespace

AssignmentResult solve_assignment(const CostMatrix & cost, double gate)
{
  AssignmentResult result;
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();

  auto allowed = [&](std::size_t r, std::size_t c) {
    const double x = cost(r, c);
    return std::isfinite(x) && x <= gate;
  };

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (allowed(r, c)) {
        lo = std::min(lo, cost(r, c));
        hi = std::max(hi, cost(r, c));
      }
    }
  }

  std::vector<char> row_used(rows, 0), col_used(cols, 0);
  if (std::isfinite(lo)) {
    const bool transpose = rows > cols;
    const std::size_t n = transpose ? cols : rows;
    const std::size_t m = transpose ? rows : cols;
    // Any forbidden pair must cost more than every all-feasible completion.
    const double big = static_cast<double>(n + 1) * (hi - lo + 1.0);
    std::vector<std::vector<double>> a(n + 1, std::vector<double>(m + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t r = transpose ? j : i;
        const std::size_t c = transpose ? i : j;
        a[i + 1][j + 1] = allowed(r, c) ? cost(r, c) - lo : big;
      }
    }
    const auto p = hungarian(a, n, m);
    for (std::size_t j = 1; j <= m; ++j) {
      if (p[j] == 0) {
        continue;
      }
      const std::size_t r = transpose ? j - 1 : p[j] - 1;
      const std::size_t c = transpose ? p[j] - 1 : j - 1;
      if (allowed(r, c)) {
        result.matches.emplace_back(r, c);
        row_used[r] = 1;
        col_used[c] = 1;
      }
    }
    std::sort(result.matches.begin(), result.matches.end());
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (!row_used[r]) {
      result.unmatched_rows.push_back(r);
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    if (!col_used[c]) {
      result.unmatched_cols.push_back(c);
    }
  }
  return result;
}

}  // namespace trackfuse

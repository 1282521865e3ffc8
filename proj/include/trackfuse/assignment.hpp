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

#ifndef TRACKFUSE__ASSIGNMENT_HPP_
#define TRACKFUSE__ASSIGNMENT_HPP_

#include <cstddef>
#include <utility>
#include <vector>

namespace trackfuse
{

/// Dense row-major cost matrix.
class CostMatrix
{
public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
  : rows_(rows), cols_(cols), data_(rows * cols, fill)
  {
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double & operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
  std::size_t rows_{0};
  std::size_t cols_{0};
  std::vector<double> data_;
};

struct AssignmentResult
{
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (row, col), sorted by row
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
};

/// Gated minimum-cost one-to-one assignment.
///
/// Pairs with cost > gate (or non-finite cost) are forbidden. Among feasible
/// assignments the solver first maximizes the number of matches, then
/// minimizes the summed cost. Deterministic for a given matrix.
AssignmentResult solve_assignment(const CostMatrix & cost, double gate);

}  // namespace trackfuse

#endif  // TRACKFUSE__ASSIGNMENT_HPP_

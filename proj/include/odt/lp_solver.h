/*
 * Copyright 2026 The ODT Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Bounded dual simplex.
//
// The problem  min c'x  s.t.  row_lo <= Ax <= row_up,  col_lo <= x <= col_up
// is solved in the form [A I](x; s) = 0 with one logical s_i per row bounded
// by [-row_up_i, -row_lo_i]. The initial basis is all logicals, and bounded
// structurals start at whichever bound makes their reduced cost dual
// feasible, so no phase one is needed for the boxed models built here.
// Infinite structural bounds are replaced by a large artificial box; an
// optimum resting on one of those is reported as unbounded.
//
// Pricing is dual steepest edge, the ratio test is bound flipping with a
// Harris-style tie break, and the basis inverse is a sparse LU of the
// structural block plus a product-form eta file.

#ifndef ODT_LP_SOLVER_H_
#define ODT_LP_SOLVER_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "odt/milp_model.h"

namespace odt {

struct LpProblem {
  int num_rows = 0;
  int num_cols = 0;
  std::vector<double> cost;  // minimised
  std::vector<double> col_lower;
  std::vector<double> col_upper;
  std::vector<double> row_lower;
  std::vector<double> row_upper;
  // Compressed columns.
  std::vector<int> col_start;  // size num_cols + 1
  std::vector<int> row_index;
  std::vector<double> value;
};

// Maximisation models are negated so the LP is always a minimisation.
LpProblem LpFromModel(const MilpModel& model);

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kTimeLimit,
  kNumericalFailure,
};

std::string_view LpStatusName(LpStatus status);

struct LpOptions {
  double primal_tolerance = 1e-9;
  double dual_tolerance = 1e-9;
  double pivot_tolerance = 1e-7;
  int refactor_interval = 100;
  int degenerate_stall_limit = 1000;
  int64_t max_iterations = 1000000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

enum class BasisStatus : uint8_t { kBasic, kAtLower, kAtUpper, kFixed };

// Warm-start information: one status per structural, then per logical.
struct LpBasis {
  std::vector<BasisStatus> status;
  bool empty() const { return status.empty(); }
};

class DualSimplex {
 public:
  explicit DualSimplex(LpProblem problem, LpOptions options = {});
  ~DualSimplex();
  DualSimplex(DualSimplex&&) noexcept;
  DualSimplex& operator=(DualSimplex&&) noexcept;

  void SetColumnBounds(int j, double lower, double upper);
  double column_lower(int j) const;
  double column_upper(int j) const;
  // Restores the bounds given at construction.
  void ResetColumnBounds();

  void SetOptions(const LpOptions& options);

  LpStatus Solve();

  // Minimisation objective of the current point.
  double Objective() const;
  std::vector<double> ColumnValues() const;
  // Duals of the rows (sign convention of min c'x with Ax in [lo, up]).
  std::vector<double> RowDuals() const;
  std::vector<double> ReducedCosts() const;

  LpBasis GetBasis() const;
  // Silently falls back to the slack basis if `basis` is unusable.
  void SetBasis(const LpBasis& basis);

  int64_t iterations() const;
  int num_rows() const;
  int num_cols() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

struct LpResult {
  LpStatus status = LpStatus::kNumericalFailure;
  double objective = 0.0;  // in the model's own sense
  std::vector<double> x;
  std::vector<double> row_duals;
  int64_t iterations = 0;
};

// Solves the continuous relaxation of `model`; integrality is ignored.
LpResult SolveLp(const MilpModel& model, const LpOptions& options = {});

}  // namespace odt

#endif  // ODT_LP_SOLVER_H_

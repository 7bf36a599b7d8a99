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

// LP-based branch and bound for the models in milp_model.h.
//
// Search: best-bound node selection with depth-first plunging (the up child
// is explored first, its sibling is queued). Branching takes the most
// fractional z column, then v, then c, ties to the lowest column index. Every
// node LP is warm started from the basis left by the previous node; since
// only column bounds change, that basis stays dual feasible. The search is
// sequential and deterministic.

#ifndef ODT_BRANCH_AND_BOUND_H_
#define ODT_BRANCH_AND_BOUND_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "odt/milp_model.h"

namespace odt {

enum class SolveStatus { kOptimal, kFeasibleTimeLimit, kInfeasible, kUnbounded };

std::string_view SolveStatusName(SolveStatus status);

struct NodeEvent {
  int64_t node = 0;
  int64_t parent = -1;
  int depth = 0;
  double parent_bound = 0.0;
  double lp_bound = 0.0;  // -inf when the node LP is infeasible
  double incumbent = 0.0;  // -inf before the first incumbent
  double global_bound = 0.0;
};

struct SolveConfig {
  double time_limit = 1800.0;  // seconds
  // Nodes whose bound exceeds the incumbent by at most this are pruned.
  // Unset: 0.999 when every objective coefficient is an integer, else 1e-6.
  std::optional<double> absolute_gap;
  double integrality_tolerance = 1e-6;
  int64_t node_limit = std::numeric_limits<int64_t>::max();
  uint64_t seed = 0;
  // Progress lines "node=<n> incumbent=<obj> bound=<b> gap=<g> time=<s>".
  std::function<void(const std::string&)> progress;
  double progress_interval = 5.0;  // seconds between progress lines
  // Called once per processed node; used by the invariant tests.
  std::function<void(const NodeEvent&)> node_observer;

  void Validate() const;
  nlohmann::json ToJson() const;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;   // incumbent value in model units
  double best_bound = 0.0;  // valid upper bound for maximisation
  std::vector<double> x;    // incumbent, one value per model column
  int64_t nodes_processed = 0;
  int64_t lp_iterations = 0;
  double wall_time = 0.0;
  bool has_incumbent() const { return !x.empty(); }
};

// Throws Error(kTimeLimitNoIncumbent) when the time or node limit hits before
// any integral solution is found. `mip_start`, when given, is a full column
// vector; its integer columns are fixed and the remaining LP solved to seed
// the incumbent.
SolveResult SolveMilp(const MilpModel& model, const SolveConfig& config,
                      const std::vector<double>* mip_start = nullptr);

// Column name to value, for reporting.
nlohmann::json AssignmentToJson(const MilpModel& model,
                                const std::vector<double>& x);

nlohmann::json SolveResultToJson(const SolveResult& result);

}  // namespace odt

#endif  // ODT_BRANCH_AND_BOUND_H_

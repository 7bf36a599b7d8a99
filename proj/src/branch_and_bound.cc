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

#include "odt/branch_and_bound.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>

#include "odt/errors.h"
#include "odt/lp_solver.h"

namespace odt {
namespace {

using Clock = std::chrono::steady_clock;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  int64_t id = 0;
  int64_t parent = -1;
  int depth = 0;
  double bound = std::numeric_limits<double>::infinity();
  std::vector<BoundChange> changes;
};

struct NodeOrder {
  // Max-heap on bound; among equal bounds the older node first.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

std::string FormatValue(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string_view SolveStatusName(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kFeasibleTimeLimit:
      return "feasible_time_limit";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
  }
  return "?";
}

void SolveConfig::Validate() const {
  if (!(time_limit > 0)) {
    throw Error(ErrorCode::kInvalidConfig, "time limit must be positive");
  }
  if (!(integrality_tolerance > 0) ||
      (absolute_gap && !(*absolute_gap > 0))) {
    throw Error(ErrorCode::kInvalidConfig, "tolerances must be positive");
  }
  if (node_limit <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "node limit must be positive");
  }
}

nlohmann::json SolveConfig::ToJson() const {
  nlohmann::json j;
  j["time_limit"] = time_limit;
  if (absolute_gap) {
    j["absolute_gap"] = *absolute_gap;
  } else {
    j["absolute_gap"] = "auto";
  }
  j["integrality_tolerance"] = integrality_tolerance;
  if (node_limit != std::numeric_limits<int64_t>::max()) {
    j["node_limit"] = node_limit;
  }
  j["seed"] = seed;
  j["branching_rule"] = "most_fractional";
  j["node_selection"] = "best_bound_plunging";
  return j;
}

SolveResult SolveMilp(const MilpModel& model, const SolveConfig& config,
                      const std::vector<double>* mip_start) {
  config.Validate();
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(config.time_limit));
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  // Work in maximisation units internally.
  const double sense = model.maximize ? 1.0 : -1.0;
  const bool integral_obj = model.ObjectiveIsIntegral();
  const double gap =
      config.absolute_gap.value_or(integral_obj ? 0.999 : 1e-6);
  auto effective = [&](double bound) {
    return integral_obj ? std::floor(bound + 1e-6) : bound;
  };

  LpOptions lp_options;
  lp_options.deadline = deadline;
  DualSimplex lp(LpFromModel(model), lp_options);

  // Branching candidates in priority order: z columns, then v, then the
  // rest. Within a tier the most fractional wins, ties to the lowest index.
  std::vector<int> integer_vars;
  std::vector<int> tier_end;
  for (VarRole role : {VarRole::kZ, VarRole::kV, VarRole::kC, VarRole::kOther}) {
    for (int j = 0; j < model.num_variables(); ++j) {
      if (model.variables[j].integer && model.variables[j].role == role) {
        integer_vars.push_back(j);
      }
    }
    tier_end.push_back(static_cast<int>(integer_vars.size()));
  }

  SolveResult result;
  double incumbent = kNegInf;
  // LpFromModel minimises sense * (-objective), so -Objective() is the
  // objective in maximisation units for either model sense.
  auto node_value = [&] { return -lp.Objective(); };

  auto solve_node = [&]() -> LpStatus {
    LpStatus st = lp.Solve();
    if (st == LpStatus::kIterationLimit || st == LpStatus::kNumericalFailure) {
      lp.SetBasis(LpBasis{});
      st = lp.Solve();
      if (st == LpStatus::kIterationLimit || st == LpStatus::kNumericalFailure) {
        throw Error(ErrorCode::kNumericalFailure,
                    "node LP failed: " + std::string(LpStatusName(st)));
      }
    }
    return st;
  };

  auto fractional_var = [&](const std::vector<double>& x) {
    size_t t = 0;
    for (int end : tier_end) {
      int best = -1;
      double best_score = config.integrality_tolerance;
      for (; t < static_cast<size_t>(end); ++t) {
        const int j = integer_vars[t];
        const double frac = x[j] - std::floor(x[j]);
        const double score = std::min(frac, 1.0 - frac);
        if (score > best_score) {
          best_score = score;
          best = j;
        }
      }
      if (best >= 0) return best;
    }
    return -1;
  };

  auto accept = [&](double value, std::vector<double> x) {
    if (integral_obj && std::abs(value - std::round(value)) < 1e-6) {
      value = std::round(value);
    }
    if (value > incumbent) {
      incumbent = value;
      result.x = std::move(x);
    }
  };

  // Track columns whose bounds differ from the model so they can be reset.
  std::vector<int> modified;
  auto reset_bounds = [&] {
    for (int j : modified) {
      lp.SetColumnBounds(j, model.variables[j].lower, model.variables[j].upper);
    }
    modified.clear();
  };

  if (mip_start != nullptr) {
    if (static_cast<int>(mip_start->size()) != model.num_variables()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "MIP start has the wrong number of columns");
    }
    // A feasible start is taken as is; the LP over its continuous columns
    // can only improve it and is subject to the time limit.
    std::vector<double> rounded = *mip_start;
    for (int j : integer_vars) {
      const double v = std::clamp(std::round((*mip_start)[j]),
                                  model.variables[j].lower,
                                  model.variables[j].upper);
      rounded[j] = v;
      lp.SetColumnBounds(j, v, v);
      modified.push_back(j);
    }
    if (model.MaxViolation(rounded) <= 1e-9) {
      const double value = sense * model.ObjectiveValue(rounded);
      accept(value, std::move(rounded));
    }
    if (lp.Solve() == LpStatus::kOptimal) {
      std::vector<double> x = lp.ColumnValues();
      accept(node_value(), std::move(x));
    }
    reset_bounds();
  }

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::optional<Node> current = Node{};
  int64_t next_id = 1;
  double pruned_max = kNegInf;
  double root_bound = std::numeric_limits<double>::infinity();
  bool stopped = false;
  double last_progress = -1e9;

  auto global_bound = [&]() {
    double b = std::max(incumbent, pruned_max);
    if (current) b = std::max(b, effective(current->bound));
    if (!open.empty()) b = std::max(b, effective(open.top().bound));
    return std::min(b, effective(root_bound));
  };
  auto report = [&](bool force) {
    if (!config.progress) return;
    const double t = elapsed();
    if (!force && t - last_progress < config.progress_interval) return;
    last_progress = t;
    const double b = global_bound();
    config.progress("node=" + std::to_string(result.nodes_processed) +
                    " incumbent=" + FormatValue(sense * incumbent) +
                    " bound=" + FormatValue(sense * b) +
                    " gap=" + FormatValue(b - incumbent) +
                    " time=" + FormatValue(t));
  };

  while (true) {
    if (!current) {
      if (open.empty()) break;
      Node next = open.top();
      open.pop();
      if (effective(next.bound) - incumbent <= gap) {
        pruned_max = std::max(pruned_max, effective(next.bound));
        continue;
      }
      current = std::move(next);
    }
    if (Clock::now() >= deadline || result.nodes_processed >= config.node_limit) {
      stopped = true;
      break;
    }
    Node node = std::move(*current);
    current.reset();

    reset_bounds();
    for (const BoundChange& c : node.changes) {
      lp.SetColumnBounds(c.var, c.lower, c.upper);
      modified.push_back(c.var);
    }
    const LpStatus st = solve_node();
    if (st == LpStatus::kTimeLimit) {
      current = std::move(node);
      stopped = true;
      break;
    }
    ++result.nodes_processed;
    NodeEvent event;
    event.node = node.id;
    event.parent = node.parent;
    event.depth = node.depth;
    event.parent_bound = node.bound;
    event.lp_bound = kNegInf;

    if (st == LpStatus::kUnbounded) {
      if (node.id == 0) {
        result.status = SolveStatus::kUnbounded;
        result.lp_iterations = lp.iterations();
        result.wall_time = elapsed();
        return result;
      }
      throw Error(ErrorCode::kNumericalFailure, "unbounded node LP below a bounded root");
    }
    if (st == LpStatus::kInfeasible) {
      event.incumbent = incumbent;
      event.global_bound = global_bound();
      if (config.node_observer) config.node_observer(event);
      report(false);
      continue;
    }

    const double value = node_value();
    if (node.id == 0) root_bound = value;
    event.lp_bound = value;
    std::vector<double> x = lp.ColumnValues();
    const int branch = fractional_var(x);
    if (effective(value) - incumbent <= gap) {
      if (branch < 0) accept(value, std::move(x));
      pruned_max = std::max(pruned_max, std::min(effective(value), effective(root_bound)));
    } else if (branch < 0) {
      accept(value, std::move(x));
    } else {
      Node up;
      up.id = next_id++;
      up.parent = node.id;
      up.depth = node.depth + 1;
      up.bound = value;
      up.changes = node.changes;
      Node down = up;
      down.id = next_id++;
      const double lo = model.variables[branch].lower;
      const double hi = model.variables[branch].upper;
      const double xb = x[branch];
      up.changes.push_back({branch, std::ceil(xb), hi});
      down.changes.push_back({branch, lo, std::floor(xb)});
      // Bounds of the same column can be tightened repeatedly; keep the
      // intersection so that the last change wins.
      for (Node* child : {&up, &down}) {
        double l = lo;
        double u = hi;
        std::vector<BoundChange> merged;
        for (const BoundChange& c : child->changes) {
          if (c.var == branch) {
            l = std::max(l, c.lower);
            u = std::min(u, c.upper);
          } else {
            merged.push_back(c);
          }
        }
        merged.push_back({branch, l, u});
        child->changes = std::move(merged);
      }
      open.push(std::move(down));
      current = std::move(up);
    }
    event.incumbent = incumbent;
    event.global_bound = global_bound();
    if (config.node_observer) config.node_observer(event);
    report(result.nodes_processed == 1);
  }

  result.lp_iterations = lp.iterations();
  result.wall_time = elapsed();
  const bool have = incumbent > kNegInf;
  if (stopped) {
    if (!have) {
      throw Error(ErrorCode::kTimeLimitNoIncumbent,
                  "limit reached after " + std::to_string(result.nodes_processed) +
                      " nodes without an integral solution");
    }
    result.status = SolveStatus::kFeasibleTimeLimit;
    result.best_bound = sense * global_bound();
  } else if (!have) {
    result.status = SolveStatus::kInfeasible;
    result.best_bound = sense * kNegInf;
  } else {
    result.status = SolveStatus::kOptimal;
    result.best_bound = sense * std::max(incumbent, std::min(pruned_max, effective(root_bound)));
  }
  if (have) result.objective = sense * incumbent;
  report(true);
  return result;
}

nlohmann::json AssignmentToJson(const MilpModel& model,
                                const std::vector<double>& x) {
  nlohmann::json j = nlohmann::json::object();
  for (int c = 0; c < model.num_variables() && c < static_cast<int>(x.size()); ++c) {
    double v = x[c];
    if (std::abs(v) < 1e-9) continue;
    if (std::abs(v - std::round(v)) < 1e-9) v = std::round(v);
    j[model.variables[c].name] = v;
  }
  return j;
}

nlohmann::json SolveResultToJson(const SolveResult& result) {
  nlohmann::json j;
  j["status"] = std::string(SolveStatusName(result.status));
  j["objective"] = result.objective;
  j["best_bound"] = result.best_bound;
  j["nodes_processed"] = result.nodes_processed;
  j["lp_iterations"] = result.lp_iterations;
  return j;
}

}  // namespace odt

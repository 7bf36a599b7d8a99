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

// Warm-start trees for branch and bound. A greedy top-down pass picks at
// each node the test whose children are purest, then coordinate ascent
// replaces one node test at a time by the best test given all others, until
// a full pass makes no change. Restarts fix the root test to each of the
// purest candidates in turn. Deterministic; no optimality claim.

#ifndef ODT_HEURISTIC_H_
#define ODT_HEURISTIC_H_

#include <cstdint>

#include "odt/dataset.h"
#include "odt/milp_model.h"
#include "odt/topology.h"
#include "odt/tree.h"

namespace odt {

struct HeuristicOptions {
  Rational class_weight{1, 1};
  BuildMode mode = BuildMode::kAccuracy;
  Rational min_rate{0, 1};
  bool forbid_trivial = false;
  int max_passes = 20;
  // Extra starts from the best root tests (HeuristicTree only).
  int restarts = 32;
};

// Score used by the search: the model objective when the rate floor holds,
// otherwise minus the shortfall minus one. Higher is better.
int64_t HeuristicScore(const DecisionTree& tree, const EncodedDataset& data,
                       const HeuristicOptions& options);

DecisionTree GreedyTree(const EncodedDataset& data, const TreeTopology& topology,
                        const HeuristicOptions& options = {});

DecisionTree ImproveTree(const DecisionTree& start, const EncodedDataset& data,
                         const HeuristicOptions& options = {});

// Best of ImproveTree(GreedyTree) and of `restarts` further greedy starts,
// each with a different fixed root test.
DecisionTree HeuristicTree(const EncodedDataset& data, const TreeTopology& topology,
                           const HeuristicOptions& options = {});

}  // namespace odt

#endif  // ODT_HEURISTIC_H_

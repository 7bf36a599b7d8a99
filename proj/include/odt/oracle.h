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

// Brute-force optimum over every (group, subset) test at every decision
// node. Samples are kept as bitsets; a node splits its routed set by
// intersecting with the union of the chosen features. Subtrees below a
// split are optimised independently, which is exact because they share no
// samples.
//
// Tie-break: nodes in id order, groups in schema order, subsets in binary
// counting order (bit t = t-th feature of the group); the first optimum
// found wins. The parallel version scores root candidates concurrently and
// merges with the same rule, so both versions return the same tree.

#ifndef ODT_ORACLE_H_
#define ODT_ORACLE_H_

#include <cstdint>

#include "odt/dataset.h"
#include "odt/milp_model.h"
#include "odt/rational.h"
#include "odt/topology.h"
#include "odt/tree.h"

namespace odt {

struct OracleOptions {
  Rational class_weight{1, 1};
  BuildMode mode = BuildMode::kAccuracy;
  Rational min_rate{0, 1};
  // Upper limit on SearchSize().
  double budget = 1e8;
};

struct OracleResult {
  // Same units as the MILP objective of BuildModel with the same settings.
  int64_t objective = 0;
  DecisionTree tree;
};

// Product over decision nodes of sum_g 2^|J(g)|, the number of complete
// assignments. Returned as a double since it overflows 64 bits quickly.
double SearchSize(const TreeTopology& topology, const GroupSchema& schema);

// The same count after fixing the anchor feature inside the subset at every
// anchor-eligible node. Saturates at UINT64_MAX.
uint64_t SymmetryReducedCount(const TreeTopology& topology, const GroupSchema& schema);
uint64_t UnreducedCount(const TreeTopology& topology, const GroupSchema& schema);

// Throw BudgetExceeded when SearchSize() exceeds the budget, EmptyClass when
// a constrained mode lacks its classes, and Infeasible when no tree reaches
// the rate floor.
OracleResult EnumerateOptimal(const EncodedDataset& data, const TreeTopology& topology,
                              const OracleOptions& options = {});
OracleResult EnumerateOptimalSerial(const EncodedDataset& data,
                                    const TreeTopology& topology,
                                    const OracleOptions& options = {});

// Model-unit objective of a given tree: den*TP + num*TN in accuracy mode,
// TP or TN in the constrained modes (the floor is not checked).
int64_t TreeObjective(const DecisionTree& tree, const EncodedDataset& data,
                      const OracleOptions& options);

}  // namespace odt

#endif  // ODT_ORACLE_H_

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

#include "odt/heuristic.h"

#include <gtest/gtest.h>

#include "odt/oracle.h"
#include "test_util.h"

namespace odt {
namespace {

using testing::RandomInstance;

TEST(Heuristic, ScoreIsObjectiveInAccuracyMode) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 40).data;
    HeuristicOptions h;
    h.class_weight = Rational::Of(3, 2);
    OracleOptions o;
    o.class_weight = h.class_weight;
    const DecisionTree t = GreedyTree(d, TreeTopology::Preset("depth2"), h);
    EXPECT_EQ(HeuristicScore(t, d, h), TreeObjective(t, d, o));
  }
}

TEST(Heuristic, ImproveNeverWorse) {
  for (uint64_t seed = 10; seed <= 15; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 50).data;
    const TreeTopology topo = TreeTopology::Preset("depth2_5");
    const DecisionTree g = GreedyTree(d, topo);
    const DecisionTree i = ImproveTree(g, d);
    const DecisionTree h = HeuristicTree(d, topo);
    EXPECT_GE(HeuristicScore(i, d, {}), HeuristicScore(g, d, {}));
    EXPECT_GE(HeuristicScore(h, d, {}), HeuristicScore(i, d, {}));
    // Never better than the exact optimum.
    OracleOptions o;
    o.budget = 1e12;
    EXPECT_LE(HeuristicScore(h, d, {}), EnumerateOptimal(d, topo, o).objective);
  }
}

TEST(Heuristic, ForbidTrivial) {
  const EncodedDataset d = RandomInstance(21, 50).data;
  HeuristicOptions h;
  h.forbid_trivial = true;
  const DecisionTree t = HeuristicTree(d, TreeTopology::Preset("depth3"), h);
  for (const NodeTest& test : t.tests()) {
    const int size = static_cast<int>(d.schema().group(test.group).features.size());
    EXPECT_FALSE(test.subset.empty());
    EXPECT_LT(static_cast<int>(test.subset.size()), size);
  }
}

TEST(Heuristic, Deterministic) {
  const EncodedDataset d = RandomInstance(22, 60).data;
  const TreeTopology topo = TreeTopology::Preset("depth3");
  EXPECT_EQ(TreeToJson(HeuristicTree(d, topo)), TreeToJson(HeuristicTree(d, topo)));
}

TEST(Heuristic, ConstrainedFloor) {
  const EncodedDataset d = RandomInstance(23, 60).data;
  HeuristicOptions h;
  h.mode = BuildMode::kMaxSensitivity;
  h.min_rate = Rational::Of(9, 10);
  const DecisionTree t = HeuristicTree(d, TreeTopology::Preset("depth2"), h);
  const Metrics m = Evaluate(t, d);
  // A positive score means the floor holds and equals TP.
  ASSERT_GE(HeuristicScore(t, d, h), 0);
  EXPECT_GE(m.tnr(), 0.9);
  EXPECT_EQ(HeuristicScore(t, d, h), m.tp);
}

}  // namespace
}  // namespace odt

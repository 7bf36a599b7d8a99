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

// Trained classifiers: a topology plus one (group, subset) test per decision
// node. A sample goes left at node k when its active feature of the tested
// group lies in the subset. Empty and full subsets are legal.

#ifndef ODT_TREE_H_
#define ODT_TREE_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "odt/dataset.h"
#include "odt/milp_model.h"
#include "odt/topology.h"

namespace odt {

struct NodeTest {
  int group = 0;
  std::vector<int> subset;  // feature ids of the group, ascending
  friend bool operator==(const NodeTest&, const NodeTest&) = default;
};

class DecisionTree {
 public:
  // `tests[k-1]` is the test at decision node k. Throws InvalidConfig when a
  // subset leaves its group or the test count does not match the topology.
  DecisionTree(TreeTopology topology, std::shared_ptr<const GroupSchema> schema,
               std::vector<NodeTest> tests);

  const TreeTopology& topology() const { return topology_; }
  const GroupSchema& schema() const { return *schema_; }
  const std::shared_ptr<const GroupSchema>& schema_ptr() const { return schema_; }
  const NodeTest& test(int k) const { return tests_[k - 1]; }
  const std::vector<NodeTest>& tests() const { return tests_; }

  // Whether feature j is in the subset at node k.
  bool InSubset(int k, int j) const;

  friend bool operator==(const DecisionTree& a, const DecisionTree& b);

 private:
  TreeTopology topology_;
  std::shared_ptr<const GroupSchema> schema_;
  std::vector<NodeTest> tests_;
  std::vector<std::vector<uint8_t>> member_;  // [k-1][j]
};

// Leaf reached by a 0/1 feature vector. Throws DimensionMismatch when the
// length differs from the schema's feature count.
int Route(const DecisionTree& tree, std::span<const uint8_t> sample);

inline int Predict(int leaf) {
  return TreeTopology::IsPositiveLeaf(leaf) ? 1 : -1;
}

struct Metrics {
  int64_t tp = 0;
  int64_t fp = 0;
  int64_t tn = 0;
  int64_t fn = 0;

  int64_t total() const { return tp + fp + tn + fn; }
  int64_t correct() const { return tp + tn; }
  double accuracy() const;
  // A rate with an empty denominator is reported as 1 (nothing to miss).
  double tpr() const;
  double tnr() const;
  Metrics& operator+=(const Metrics& other);
  friend bool operator==(const Metrics&, const Metrics&) = default;
};

// Both throw DimensionMismatch when the schemas disagree on feature count
// or group sizes. Evaluate splits the samples across OpenMP threads; the
// serial version is the reference it is tested against.
Metrics Evaluate(const DecisionTree& tree, const EncodedDataset& data);
Metrics EvaluateSerial(const DecisionTree& tree, const EncodedDataset& data);

// Leaf of every sample, in sample order.
std::vector<int> RouteAll(const DecisionTree& tree, const EncodedDataset& data);

// Reads the tree from a solution of a model built by BuildModel. Throws
// FractionalSelection when no group at some node has V within `tolerance`
// of 1.
DecisionTree ExtractTree(const MilpModel& model, const std::vector<double>& x,
                         const TreeTopology& topology,
                         std::shared_ptr<const GroupSchema> schema,
                         double tolerance = 1e-6);

// The tree obtained by complementing the subset at node k and swapping its
// two child subtrees; it classifies every sample identically. Requires
// IsAnchorEligible(k).
DecisionTree Flip(const DecisionTree& tree, int k);

// Flips, top down, every anchor-eligible node whose subset misses the anchor
// feature, giving the representative that satisfies the anchor rows.
DecisionTree CanonicalizeAnchors(const DecisionTree& tree);

// Full column vector for `model` describing `tree` on `data`: V and Z from
// the tests, C from routing. Used as a branch-and-bound start.
std::vector<double> TreeToAssignment(const DecisionTree& tree,
                                     const MilpModel& model,
                                     const EncodedDataset& data);

// Indented text, one line per node:
//   [1] outlook in {sunny, rain}
//     L [2] ...
//       L leaf 1 -> -1
std::string RenderTree(const DecisionTree& tree);

nlohmann::json TreeToJson(const DecisionTree& tree);
// Subsets are stored by category value and resolved against `schema`.
// Throws DimensionMismatch when columns or values are missing.
DecisionTree TreeFromJson(const nlohmann::json& json,
                          std::shared_ptr<const GroupSchema> schema);

nlohmann::json MetricsToJson(const Metrics& metrics);

}  // namespace odt

#endif  // ODT_TREE_H_

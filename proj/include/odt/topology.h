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

// Fixed binary tree shapes.
//
// Decision nodes are numbered 1..|K| in pre-order (root = 1) and leaves
// 1..|B| left to right. Even leaves predict +1, odd leaves -1. Every decision
// node has either two leaf children or two decision-node children.
//
// Text form: a leaf is `#`, a decision node is `(left right)`, so the
// depth-2 tree is `((# #) (# #))`.

#ifndef ODT_TOPOLOGY_H_
#define ODT_TOPOLOGY_H_

#include <string>
#include <string_view>
#include <vector>

namespace odt {

struct ChildRef {
  bool is_leaf = true;
  int id = 0;

  friend bool operator==(const ChildRef&, const ChildRef&) = default;
};

struct DecisionNode {
  ChildRef left;
  ChildRef right;
};

struct LeafPath {
  std::vector<int> left;   // K^L(b), ascending
  std::vector<int> right;  // K^R(b), ascending
};

class TreeTopology {
 public:
  // Presets: depth2, depth2_5, depth3, imbalanced. Throws UnknownTopology.
  static TreeTopology Preset(std::string_view name);
  // Parenthesised text form. Throws MalformedTopology.
  static TreeTopology Parse(std::string_view text);
  // Preset name or text form.
  static TreeTopology FromSpec(std::string_view spec);
  // Explicit link table; nodes[k-1] describes decision node k. Validated by
  // ComputePaths, so cycles, orphans and mixed children are rejected.
  static TreeTopology FromLinks(std::vector<DecisionNode> nodes, int num_leaves,
                                std::string name = "custom");

  static const std::vector<std::string>& PresetNames();

  const std::string& name() const { return name_; }
  int num_decision_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_leaves() const { return num_leaves_; }
  int root() const { return 1; }

  const DecisionNode& node(int k) const { return nodes_[k - 1]; }
  int parent(int k) const { return parents_[k - 1]; }  // 0 for the root
  bool IsLeafAdjacent(int k) const { return node(k).left.is_leaf; }

  const LeafPath& path(int b) const { return paths_[b - 1]; }
  int Depth(int b) const {
    return static_cast<int>(path(b).left.size() + path(b).right.size());
  }

  static bool IsPositiveLeaf(int b) { return b % 2 == 0; }
  std::vector<int> PositiveLeaves() const;
  std::vector<int> NegativeLeaves() const;
  std::vector<int> LeafAdjacentNodes() const;
  const std::vector<int>& AnchorEligible() const { return anchor_eligible_; }
  bool IsAnchorEligible(int k) const;

  // Leaves below node k (contiguous id range).
  int FirstLeafBelow(int k) const { return leaf_range_[k - 1].first; }
  int LastLeafBelow(int k) const { return leaf_range_[k - 1].second; }

  // Decision nodes of the subtree rooted at child c of node k, in pre-order.
  std::vector<int> SubtreeNodes(ChildRef child) const;

  std::string ToString() const;

 private:
  TreeTopology() = default;
  void Finalize();

  std::string name_;
  std::vector<DecisionNode> nodes_;
  int num_leaves_ = 0;
  std::vector<int> parents_;
  std::vector<LeafPath> paths_;
  std::vector<std::pair<int, int>> leaf_range_;
  std::vector<int> anchor_eligible_;
};

// Root-to-leaf left/right node sets for every leaf, in leaf order. Throws
// MalformedTopology on cycles, orphans, mixed children or bad numbering.
std::vector<LeafPath> ComputePaths(const std::vector<DecisionNode>& nodes,
                                   int num_leaves);
inline std::vector<LeafPath> ComputePaths(const TreeTopology& topology) {
  std::vector<LeafPath> paths;
  for (int b = 1; b <= topology.num_leaves(); ++b) {
    paths.push_back(topology.path(b));
  }
  return paths;
}

// Decision nodes whose children are decision nodes with identically shaped
// subtrees. Flipping the test at such a node and swapping its subtrees gives
// the same classifier, so the anchor feature can be forced left there.
std::vector<int> AnchorEligibleNodes(const TreeTopology& topology);

// Whether two child subtrees have the same shape.
bool SameShape(const TreeTopology& topology, ChildRef a, ChildRef b);

// True when `small` can be obtained from `large` by contracting edges and
// deleting subtrees, with every retained leaf keeping its label parity.
// Any classifier on `small` is then realisable on `large`.
bool IsMinorOf(const TreeTopology& small, const TreeTopology& large);

}  // namespace odt

#endif  // ODT_TOPOLOGY_H_

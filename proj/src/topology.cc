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

#include "odt/topology.h"

#include <algorithm>
#include <cctype>
#include <functional>
#include <utility>

#include "odt/errors.h"

namespace odt {
namespace {

struct PresetEntry {
  const char* name;
  const char* text;
};

constexpr PresetEntry kPresets[] = {
    {"depth2", "((# #) (# #))"},
    {"depth2_5", "(((# #) (# #)) (# #))"},
    {"depth3", "(((# #) (# #)) ((# #) (# #)))"},
    {"imbalanced", "((((# #) (# #)) (# #)) (# #))"},
};

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformedTopology, what);
}

class TextParser {
 public:
  explicit TextParser(std::string_view text) : text_(text) {}

  void Run(std::vector<DecisionNode>& nodes, int& num_leaves) {
    SkipSpace();
    if (Peek() != '(') Malformed("topology must start with a decision node");
    ParseChild();
    SkipSpace();
    if (pos_ != text_.size()) {
      Malformed("trailing characters at offset " + std::to_string(pos_));
    }
    nodes = std::move(nodes_);
    num_leaves = leaves_;
  }

 private:
  char Peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void SkipSpace() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  ChildRef ParseChild() {
    SkipSpace();
    const char ch = Peek();
    if (ch == '#') {
      ++pos_;
      return ChildRef{true, ++leaves_};
    }
    if (ch != '(') {
      Malformed("expected '#' or '(' at offset " + std::to_string(pos_));
    }
    ++pos_;
    const int id = static_cast<int>(nodes_.size()) + 1;
    nodes_.emplace_back();
    ChildRef left = ParseChild();
    ChildRef right = ParseChild();
    SkipSpace();
    if (Peek() != ')') {
      Malformed("expected ')' at offset " + std::to_string(pos_));
    }
    ++pos_;
    nodes_[id - 1] = DecisionNode{left, right};
    return ChildRef{false, id};
  }

  std::string_view text_;
  size_t pos_ = 0;
  std::vector<DecisionNode> nodes_;
  int leaves_ = 0;
};

void AppendText(const TreeTopology& t, ChildRef c, std::string& out) {
  if (c.is_leaf) {
    out += '#';
    return;
  }
  out += '(';
  AppendText(t, t.node(c.id).left, out);
  out += ' ';
  AppendText(t, t.node(c.id).right, out);
  out += ')';
}

bool Embeds(const TreeTopology& small, ChildRef s, const TreeTopology& large,
            ChildRef l) {
  if (l.is_leaf) {
    return s.is_leaf && TreeTopology::IsPositiveLeaf(s.id) ==
                            TreeTopology::IsPositiveLeaf(l.id);
  }
  const DecisionNode& ln = large.node(l.id);
  if (!s.is_leaf) {
    const DecisionNode& sn = small.node(s.id);
    if (Embeds(small, sn.left, large, ln.left) &&
        Embeds(small, sn.right, large, ln.right)) {
      return true;
    }
  }
  // Route everything one way at l and keep looking below.
  return Embeds(small, s, large, ln.left) || Embeds(small, s, large, ln.right);
}

}  // namespace

std::vector<LeafPath> ComputePaths(const std::vector<DecisionNode>& nodes,
                                   int num_leaves) {
  const int num_nodes = static_cast<int>(nodes.size());
  if (num_nodes == 0) Malformed("topology has no decision nodes");
  if (num_leaves != num_nodes + 1) {
    Malformed("a full binary tree with " + std::to_string(num_nodes) +
              " decision nodes has " + std::to_string(num_nodes + 1) +
              " leaves, got " + std::to_string(num_leaves));
  }
  std::vector<LeafPath> paths(num_leaves);
  std::vector<char> node_seen(num_nodes, 0);
  std::vector<char> leaf_seen(num_leaves, 0);
  int next_node = 1;
  int next_leaf = 1;
  std::vector<int> left_stack;
  std::vector<int> right_stack;

  std::function<void(ChildRef)> walk = [&](ChildRef c) {
    if (c.is_leaf) {
      if (c.id < 1 || c.id > num_leaves) {
        Malformed("leaf id " + std::to_string(c.id) + " out of range");
      }
      if (leaf_seen[c.id - 1]) {
        Malformed("leaf " + std::to_string(c.id) + " reached twice");
      }
      if (c.id != next_leaf) {
        Malformed("leaves must be numbered left to right");
      }
      leaf_seen[c.id - 1] = 1;
      ++next_leaf;
      LeafPath& p = paths[c.id - 1];
      p.left = left_stack;
      p.right = right_stack;
      std::sort(p.left.begin(), p.left.end());
      std::sort(p.right.begin(), p.right.end());
      return;
    }
    if (c.id < 1 || c.id > num_nodes) {
      Malformed("decision node id " + std::to_string(c.id) + " out of range");
    }
    if (node_seen[c.id - 1]) {
      Malformed("cycle or shared child at decision node " +
                std::to_string(c.id));
    }
    if (c.id != next_node) {
      Malformed("decision nodes must be numbered in pre-order");
    }
    node_seen[c.id - 1] = 1;
    ++next_node;
    const DecisionNode& n = nodes[c.id - 1];
    if (n.left.is_leaf != n.right.is_leaf) {
      Malformed("decision node " + std::to_string(c.id) +
                " mixes a leaf and a decision child");
    }
    left_stack.push_back(c.id);
    walk(n.left);
    left_stack.pop_back();
    right_stack.push_back(c.id);
    walk(n.right);
    right_stack.pop_back();
  };
  walk(ChildRef{false, 1});

  for (int k = 1; k <= num_nodes; ++k) {
    if (!node_seen[k - 1]) {
      Malformed("decision node " + std::to_string(k) + " is orphaned");
    }
  }
  return paths;
}

TreeTopology TreeTopology::Preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (name == p.name) {
      TreeTopology t = Parse(p.text);
      t.name_ = p.name;
      return t;
    }
  }
  throw Error(ErrorCode::kUnknownTopology,
              "unknown topology '" + std::string(name) + "'");
}

const std::vector<std::string>& TreeTopology::PresetNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& p : kPresets) out.emplace_back(p.name);
    return out;
  }();
  return names;
}

TreeTopology TreeTopology::Parse(std::string_view text) {
  std::vector<DecisionNode> nodes;
  int num_leaves = 0;
  TextParser(text).Run(nodes, num_leaves);
  TreeTopology t = FromLinks(std::move(nodes), num_leaves);
  // A parsed preset shape keeps its preset name.
  const std::string canonical = t.ToString();
  for (const auto& p : kPresets) {
    if (canonical == p.text) t.name_ = p.name;
  }
  return t;
}

TreeTopology TreeTopology::FromSpec(std::string_view spec) {
  size_t i = 0;
  while (i < spec.size() && std::isspace(static_cast<unsigned char>(spec[i]))) {
    ++i;
  }
  if (i < spec.size() && (spec[i] == '(' || spec[i] == '#')) {
    return Parse(spec);
  }
  return Preset(spec);
}

TreeTopology TreeTopology::FromLinks(std::vector<DecisionNode> nodes,
                                     int num_leaves, std::string name) {
  TreeTopology t;
  t.paths_ = ComputePaths(nodes, num_leaves);
  t.nodes_ = std::move(nodes);
  t.num_leaves_ = num_leaves;
  t.name_ = std::move(name);
  t.Finalize();
  return t;
}

void TreeTopology::Finalize() {
  const int n = num_decision_nodes();
  parents_.assign(n, 0);
  leaf_range_.assign(n, {0, 0});
  for (int k = 1; k <= n; ++k) {
    for (ChildRef c : {node(k).left, node(k).right}) {
      if (!c.is_leaf) parents_[c.id - 1] = k;
    }
  }
  // Pre-order numbering means children have larger ids, so a reverse sweep
  // sees every child range before its parent.
  for (int k = n; k >= 1; --k) {
    const DecisionNode& d = node(k);
    const int first = d.left.is_leaf ? d.left.id : leaf_range_[d.left.id - 1].first;
    const int last =
        d.right.is_leaf ? d.right.id : leaf_range_[d.right.id - 1].second;
    leaf_range_[k - 1] = {first, last};
  }
  anchor_eligible_ = AnchorEligibleNodes(*this);
}

std::vector<int> TreeTopology::PositiveLeaves() const {
  std::vector<int> out;
  for (int b = 2; b <= num_leaves_; b += 2) out.push_back(b);
  return out;
}

std::vector<int> TreeTopology::NegativeLeaves() const {
  std::vector<int> out;
  for (int b = 1; b <= num_leaves_; b += 2) out.push_back(b);
  return out;
}

std::vector<int> TreeTopology::LeafAdjacentNodes() const {
  std::vector<int> out;
  for (int k = 1; k <= num_decision_nodes(); ++k) {
    if (IsLeafAdjacent(k)) out.push_back(k);
  }
  return out;
}

bool TreeTopology::IsAnchorEligible(int k) const {
  return std::binary_search(anchor_eligible_.begin(), anchor_eligible_.end(),
                            k);
}

std::vector<int> TreeTopology::SubtreeNodes(ChildRef child) const {
  std::vector<int> out;
  std::function<void(ChildRef)> walk = [&](ChildRef c) {
    if (c.is_leaf) return;
    out.push_back(c.id);
    walk(node(c.id).left);
    walk(node(c.id).right);
  };
  walk(child);
  return out;
}

std::string TreeTopology::ToString() const {
  std::string out;
  AppendText(*this, ChildRef{false, 1}, out);
  return out;
}

bool SameShape(const TreeTopology& topology, ChildRef a, ChildRef b) {
  if (a.is_leaf || b.is_leaf) return a.is_leaf == b.is_leaf;
  const DecisionNode& na = topology.node(a.id);
  const DecisionNode& nb = topology.node(b.id);
  return SameShape(topology, na.left, nb.left) &&
         SameShape(topology, na.right, nb.right);
}

std::vector<int> AnchorEligibleNodes(const TreeTopology& topology) {
  std::vector<int> out;
  for (int k = 1; k <= topology.num_decision_nodes(); ++k) {
    const DecisionNode& n = topology.node(k);
    if (n.left.is_leaf) continue;
    if (SameShape(topology, n.left, n.right)) out.push_back(k);
  }
  return out;
}

bool IsMinorOf(const TreeTopology& small, const TreeTopology& large) {
  return Embeds(small, ChildRef{false, 1}, large, ChildRef{false, 1});
}

}  // namespace odt

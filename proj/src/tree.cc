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

#include "odt/tree.h"

#include <algorithm>
#include <sstream>
#include <utility>

#include "odt/errors.h"

namespace odt {
namespace {

void CheckCompatible(const GroupSchema& a, const GroupSchema& b) {
  bool ok = a.num_features() == b.num_features() &&
            a.num_groups() == b.num_groups();
  for (int g = 0; ok && g < a.num_groups(); ++g) {
    ok = a.GroupSize(g) == b.GroupSize(g);
  }
  if (!ok) {
    throw Error(ErrorCode::kDimensionMismatch,
                "dataset schema does not match the tree (" +
                    std::to_string(b.num_features()) + " features vs " +
                    std::to_string(a.num_features()) + ")");
  }
}

void Tally(Metrics& m, int label, int leaf) {
  const bool predicted_positive = TreeTopology::IsPositiveLeaf(leaf);
  if (label > 0) {
    ++(predicted_positive ? m.tp : m.fn);
  } else {
    ++(predicted_positive ? m.fp : m.tn);
  }
}

double Rate(int64_t hit, int64_t miss) {
  return hit + miss == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(hit + miss);
}

}  // namespace

DecisionTree::DecisionTree(TreeTopology topology,
                           std::shared_ptr<const GroupSchema> schema,
                           std::vector<NodeTest> tests)
    : topology_(std::move(topology)),
      schema_(std::move(schema)),
      tests_(std::move(tests)) {
  if (static_cast<int>(tests_.size()) != topology_.num_decision_nodes()) {
    throw Error(ErrorCode::kInvalidConfig,
                "tree has " + std::to_string(tests_.size()) + " tests for " +
                    std::to_string(topology_.num_decision_nodes()) + " nodes");
  }
  const int d = schema_->num_features();
  member_.assign(tests_.size(), std::vector<uint8_t>(d, 0));
  for (size_t k = 0; k < tests_.size(); ++k) {
    NodeTest& t = tests_[k];
    if (t.group < 0 || t.group >= schema_->num_groups()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "node " + std::to_string(k + 1) + " tests unknown group");
    }
    std::sort(t.subset.begin(), t.subset.end());
    t.subset.erase(std::unique(t.subset.begin(), t.subset.end()), t.subset.end());
    for (int j : t.subset) {
      if (j < 0 || j >= d || schema_->GroupOf(j) != t.group) {
        throw Error(ErrorCode::kInvalidConfig,
                    "node " + std::to_string(k + 1) +
                        " subset leaves its group");
      }
      member_[k][j] = 1;
    }
  }
}

bool DecisionTree::InSubset(int k, int j) const { return member_[k - 1][j] != 0; }

bool operator==(const DecisionTree& a, const DecisionTree& b) {
  return a.topology_.ToString() == b.topology_.ToString() &&
         *a.schema_ == *b.schema_ && a.tests_ == b.tests_;
}

int Route(const DecisionTree& tree, std::span<const uint8_t> sample) {
  const GroupSchema& schema = tree.schema();
  if (static_cast<int>(sample.size()) != schema.num_features()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "sample has " + std::to_string(sample.size()) +
                    " features, tree expects " +
                    std::to_string(schema.num_features()));
  }
  const TreeTopology& topo = tree.topology();
  int k = topo.root();
  while (true) {
    int hits = 0;
    for (int j : tree.test(k).subset) hits += sample[j];
    const ChildRef next = hits == 1 ? topo.node(k).left : topo.node(k).right;
    if (next.is_leaf) return next.id;
    k = next.id;
  }
}

std::vector<int> RouteAll(const DecisionTree& tree, const EncodedDataset& data) {
  CheckCompatible(tree.schema(), data.schema());
  std::vector<int> leaves(data.num_samples());
  for (int i = 0; i < data.num_samples(); ++i) leaves[i] = Route(tree, data.Row(i));
  return leaves;
}

double Metrics::accuracy() const {
  return total() == 0 ? 1.0 : static_cast<double>(correct()) / static_cast<double>(total());
}
double Metrics::tpr() const { return Rate(tp, fn); }
double Metrics::tnr() const { return Rate(tn, fp); }

Metrics& Metrics::operator+=(const Metrics& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

Metrics EvaluateSerial(const DecisionTree& tree, const EncodedDataset& data) {
  CheckCompatible(tree.schema(), data.schema());
  Metrics m;
  for (int i = 0; i < data.num_samples(); ++i) {
    Tally(m, data.Label(i), Route(tree, data.Row(i)));
  }
  return m;
}

Metrics Evaluate(const DecisionTree& tree, const EncodedDataset& data) {
  CheckCompatible(tree.schema(), data.schema());
  const int n = data.num_samples();
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;
#pragma omp parallel for reduction(+ : tp, fp, tn, fn) schedule(static)
  for (int i = 0; i < n; ++i) {
    const bool pos = TreeTopology::IsPositiveLeaf(Route(tree, data.Row(i)));
    if (data.Label(i) > 0) {
      pos ? ++tp : ++fn;
    } else {
      pos ? ++fp : ++tn;
    }
  }
  return Metrics{tp, fp, tn, fn};
}

DecisionTree ExtractTree(const MilpModel& model, const std::vector<double>& x,
                         const TreeTopology& topology,
                         std::shared_ptr<const GroupSchema> schema,
                         double tolerance) {
  if (static_cast<int>(x.size()) != model.num_variables()) {
    throw Error(ErrorCode::kDimensionMismatch, "assignment length differs from the model");
  }
  std::vector<NodeTest> tests;
  for (int k = 1; k <= topology.num_decision_nodes(); ++k) {
    int best = -1;
    double best_value = -1.0;
    for (int g = 0; g < schema->num_groups(); ++g) {
      const int v = model.VIndex(k, g);
      if (v < 0) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "model lacks V_" + std::to_string(k) + "_" + std::to_string(g));
      }
      if (x[v] > best_value) {
        best_value = x[v];
        best = g;
      }
    }
    if (best_value < 1.0 - tolerance) {
      throw Error(ErrorCode::kFractionalSelection,
                  "no group selected at node " + std::to_string(k) +
                      " (largest V is " + std::to_string(best_value) + ")");
    }
    NodeTest t{best, {}};
    for (int j : schema->group(best).features) {
      if (x[model.ZIndex(k, j)] > 1.0 - tolerance) t.subset.push_back(j);
    }
    tests.push_back(std::move(t));
  }
  return DecisionTree(topology, std::move(schema), std::move(tests));
}

DecisionTree Flip(const DecisionTree& tree, int k) {
  const TreeTopology& topo = tree.topology();
  if (!topo.IsAnchorEligible(k)) {
    throw Error(ErrorCode::kInvalidConfig,
                "node " + std::to_string(k) + " cannot be flipped");
  }
  std::vector<NodeTest> tests = tree.tests();
  NodeTest& t = tests[k - 1];
  std::vector<int> complement;
  for (int j : tree.schema().group(t.group).features) {
    if (!tree.InSubset(k, j)) complement.push_back(j);
  }
  t.subset = std::move(complement);
  const std::vector<int> left = topo.SubtreeNodes(topo.node(k).left);
  const std::vector<int> right = topo.SubtreeNodes(topo.node(k).right);
  for (size_t i = 0; i < left.size(); ++i) {
    std::swap(tests[left[i] - 1], tests[right[i] - 1]);
  }
  return DecisionTree(topo, tree.schema_ptr(), std::move(tests));
}

DecisionTree CanonicalizeAnchors(const DecisionTree& tree) {
  DecisionTree out = tree;
  // Eligible nodes are listed in id order, which is pre-order, so a flip
  // only moves tests of nodes that have not been visited yet.
  const std::vector<int> eligible = out.topology().AnchorEligible();
  for (int k : eligible) {
    const NodeTest& t = out.test(k);
    if (!out.InSubset(k, out.schema().Anchor(t.group))) out = Flip(out, k);
  }
  return out;
}

std::vector<double> TreeToAssignment(const DecisionTree& tree,
                                     const MilpModel& model,
                                     const EncodedDataset& data) {
  CheckCompatible(tree.schema(), data.schema());
  std::vector<double> x(model.num_variables(), 0.0);
  const TreeTopology& topo = tree.topology();
  for (int k = 1; k <= topo.num_decision_nodes(); ++k) {
    const NodeTest& t = tree.test(k);
    const int v = model.VIndex(k, t.group);
    if (v < 0) {
      throw Error(ErrorCode::kDimensionMismatch, "model does not match the tree");
    }
    x[v] = 1.0;
    for (int j : t.subset) x[model.ZIndex(k, j)] = 1.0;
  }
  for (int i = 0; i < data.num_samples(); ++i) {
    const int c = model.CIndex(i, Route(tree, data.Row(i)));
    if (c >= 0) x[c] = 1.0;
  }
  return x;
}

namespace {

void RenderNode(const DecisionTree& tree, ChildRef ref, const std::string& tag,
                int indent, std::ostringstream& out) {
  out << std::string(2 * indent, ' ') << tag;
  if (ref.is_leaf) {
    out << "leaf " << ref.id << " -> " << (Predict(ref.id) > 0 ? "+1" : "-1")
        << '\n';
    return;
  }
  const NodeTest& t = tree.test(ref.id);
  const GroupSchema& schema = tree.schema();
  out << '[' << ref.id << "] " << schema.group(t.group).column << " in {";
  for (size_t s = 0; s < t.subset.size(); ++s) {
    if (s > 0) out << ", ";
    out << schema.feature(t.subset[s]).value;
  }
  out << "}\n";
  const DecisionNode& node = tree.topology().node(ref.id);
  RenderNode(tree, node.left, "L ", indent + 1, out);
  RenderNode(tree, node.right, "R ", indent + 1, out);
}

}  // namespace

std::string RenderTree(const DecisionTree& tree) {
  std::ostringstream out;
  RenderNode(tree, ChildRef{false, tree.topology().root()}, "", 0, out);
  return out.str();
}

nlohmann::json TreeToJson(const DecisionTree& tree) {
  const GroupSchema& schema = tree.schema();
  nlohmann::json j;
  j["topology"] = tree.topology().ToString();
  j["topology_name"] = tree.topology().name();
  nlohmann::json sizes = nlohmann::json::array();
  for (int g = 0; g < schema.num_groups(); ++g) sizes.push_back(schema.GroupSize(g));
  j["fingerprint"] = {{"num_features", schema.num_features()}, {"group_sizes", sizes}};
  nlohmann::json nodes = nlohmann::json::array();
  for (int k = 1; k <= tree.topology().num_decision_nodes(); ++k) {
    const NodeTest& t = tree.test(k);
    nlohmann::json values = nlohmann::json::array();
    for (int f : t.subset) values.push_back(schema.feature(f).value);
    nodes.push_back({{"node", k},
                     {"group", t.group},
                     {"column", schema.group(t.group).column},
                     {"subset", values}});
  }
  j["nodes"] = nodes;
  return j;
}

DecisionTree TreeFromJson(const nlohmann::json& json,
                          std::shared_ptr<const GroupSchema> schema) {
  try {
    TreeTopology topo = TreeTopology::FromSpec(json.at("topology").get<std::string>());
    const nlohmann::json& fp = json.at("fingerprint");
    const auto sizes = fp.at("group_sizes").get<std::vector<int>>();
    bool ok = fp.at("num_features").get<int>() == schema->num_features() &&
              static_cast<int>(sizes.size()) == schema->num_groups();
    for (int g = 0; ok && g < schema->num_groups(); ++g) {
      ok = sizes[g] == schema->GroupSize(g);
    }
    if (!ok) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "tree fingerprint does not match the dataset schema");
    }
    std::vector<NodeTest> tests(topo.num_decision_nodes());
    for (const nlohmann::json& node : json.at("nodes")) {
      const int k = node.at("node").get<int>();
      if (k < 1 || k > topo.num_decision_nodes()) {
        throw Error(ErrorCode::kDimensionMismatch, "tree node id out of range");
      }
      const std::string column = node.at("column").get<std::string>();
      int group = -1;
      for (int g = 0; g < schema->num_groups(); ++g) {
        if (schema->group(g).column == column) group = g;
      }
      if (group < 0) {
        throw Error(ErrorCode::kDimensionMismatch, "unknown column " + column);
      }
      NodeTest t{group, {}};
      for (const nlohmann::json& v : node.at("subset")) {
        const int f = schema->FindFeature(group, v.get<std::string>());
        if (f < 0) {
          throw Error(ErrorCode::kDimensionMismatch,
                      "unknown value " + v.get<std::string>() + " of " + column);
        }
        t.subset.push_back(f);
      }
      tests[k - 1] = std::move(t);
    }
    return DecisionTree(std::move(topo), std::move(schema), std::move(tests));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("tree JSON: ") + e.what());
  }
}

nlohmann::json MetricsToJson(const Metrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"tn", m.tn},
          {"fn", m.fn},
          {"accuracy", m.accuracy()},
          {"tpr", m.tpr()},
          {"tnr", m.tnr()}};
}

}  // namespace odt

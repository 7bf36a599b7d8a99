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

#include <algorithm>
#include <utility>
#include <vector>

#include "odt/errors.h"

namespace odt {
namespace {

struct Test {
  int group = 0;
  uint32_t mask = 0;  // bit t = t-th feature of the group
  friend bool operator==(const Test&, const Test&) = default;
};

// Pair moves cost candidates^2 routings of every sample per node pair; they
// are skipped when one pass would exceed this many routings.
constexpr double kMaxPairWork = 2e7;

// Compact routing on category positions instead of feature vectors.
class Search {
 public:
  Search(const EncodedDataset& data, const TreeTopology& topology,
         const HeuristicOptions& options)
      : data_(data), topo_(topology), opt_(options) {
    const GroupSchema& schema = data.schema();
    const int n = data.num_samples();
    const int groups = schema.num_groups();
    position_.resize(static_cast<size_t>(n) * groups);
    for (int i = 0; i < n; ++i) {
      for (int g = 0; g < groups; ++g) {
        const std::vector<int>& f = schema.group(g).features;
        position_[static_cast<size_t>(i) * groups + g] = static_cast<uint8_t>(
            std::find(f.begin(), f.end(), data.ActiveFeature(i, g)) - f.begin());
      }
    }
    for (int g = 0; g < groups; ++g) {
      if (schema.GroupSize(g) > 24) {
        throw Error(ErrorCode::kBudgetExceeded,
                    "group " + schema.group(g).column + " is too large for the heuristic");
      }
      const uint32_t full = (uint32_t{1} << schema.GroupSize(g)) - 1;
      for (uint32_t m = 0; m <= full; ++m) {
        if (opt_.forbid_trivial && (m == 0 || m == full)) continue;
        candidates_.push_back({g, m});
      }
    }
    if (candidates_.empty()) {
      throw Error(ErrorCode::kInvalidConfig, "no admissible node test");
    }
    if (opt_.mode == BuildMode::kAccuracy) {
      pos_weight_ = opt_.class_weight.den;
      neg_weight_ = opt_.class_weight.num;
    } else {
      const bool sens = opt_.mode == BuildMode::kMaxSensitivity;
      const int64_t size = static_cast<int64_t>(
          sens ? data.negative_indices().size() : data.positive_indices().size());
      floor_ = opt_.min_rate.CeilTimes(size);
    }
    const int64_t pos = static_cast<int64_t>(data.positive_indices().size());
    const int64_t neg = static_cast<int64_t>(data.negative_indices().size());
    ceiling_ = opt_.mode == BuildMode::kAccuracy ? ScoreCounts(pos, neg)
               : opt_.mode == BuildMode::kMaxSensitivity ? pos
                                                          : neg;
  }

  bool GoesLeft(int i, const Test& t) const {
    const int p = position_[static_cast<size_t>(i) * data_.num_groups() + t.group];
    return (t.mask >> p) & 1u;
  }

  int RouteFrom(int i, int k, const std::vector<Test>& tests) const {
    while (true) {
      const DecisionNode& node = topo_.node(k);
      const ChildRef next = GoesLeft(i, tests[k - 1]) ? node.left : node.right;
      if (next.is_leaf) return next.id;
      k = next.id;
    }
  }

  int64_t Score(const std::vector<Test>& tests) const {
    int64_t tp = 0, tn = 0;
    for (int i = 0; i < data_.num_samples(); ++i) {
      const bool pos = TreeTopology::IsPositiveLeaf(RouteFrom(i, topo_.root(), tests));
      if (data_.Label(i) > 0) {
        tp += pos;
      } else {
        tn += !pos;
      }
    }
    return ScoreCounts(tp, tn);
  }

  int64_t ScoreCounts(int64_t tp, int64_t tn) const {
    switch (opt_.mode) {
      case BuildMode::kAccuracy:
        return pos_weight_ * tp + neg_weight_ * tn;
      case BuildMode::kMaxSensitivity:
        return tn >= floor_ ? tp : -(floor_ - tn) - 1;
      case BuildMode::kMaxSpecificity:
        return tp >= floor_ ? tn : -(floor_ - tp) - 1;
    }
    return 0;
  }

  // Best constant prediction for the samples, with the accuracy weights
  // (unit weights in the constrained modes).
  int64_t Purity(ChildRef ref, int64_t pos, int64_t neg) const {
    const int64_t wp = opt_.mode == BuildMode::kAccuracy ? pos_weight_ : 1;
    const int64_t wn = opt_.mode == BuildMode::kAccuracy ? neg_weight_ : 1;
    if (ref.is_leaf) return TreeTopology::IsPositiveLeaf(ref.id) ? wp * pos : wn * neg;
    return std::max(wp * pos, wn * neg);
  }

  // Purity score of every candidate at node k on `samples`.
  std::vector<int64_t> SplitScores(int k, const std::vector<int>& samples) const {
    const DecisionNode& node = topo_.node(k);
    int64_t total_pos = 0;
    for (int i : samples) total_pos += data_.Label(i) > 0;
    const int64_t total_neg = static_cast<int64_t>(samples.size()) - total_pos;
    std::vector<int64_t> scores;
    for (const Test& t : candidates_) {
      int64_t lp = 0, ln = 0;
      for (int i : samples) {
        if (GoesLeft(i, t)) (data_.Label(i) > 0 ? lp : ln) += 1;
      }
      scores.push_back(Purity(node.left, lp, ln) +
                       Purity(node.right, total_pos - lp, total_neg - ln));
    }
    return scores;
  }

  void Greedy(int k, const std::vector<int>& samples, std::vector<Test>& tests,
              const Test* forced = nullptr) const {
    const DecisionNode& node = topo_.node(k);
    Test choice = candidates_.front();
    if (forced != nullptr) {
      choice = *forced;
    } else {
      const std::vector<int64_t> scores = SplitScores(k, samples);
      choice = candidates_[std::max_element(scores.begin(), scores.end()) - scores.begin()];
    }
    tests[k - 1] = choice;
    std::vector<int> left, right;
    for (int i : samples) (GoesLeft(i, choice) ? left : right).push_back(i);
    if (!node.left.is_leaf) Greedy(node.left.id, left, tests);
    if (!node.right.is_leaf) Greedy(node.right.id, right, tests);
  }

  std::vector<int> AllSamples() const {
    std::vector<int> all(data_.num_samples());
    for (int i = 0; i < data_.num_samples(); ++i) all[i] = i;
    return all;
  }

  std::vector<Test> Greedy(const Test* root_test = nullptr) const {
    std::vector<Test> tests(topo_.num_decision_nodes(), candidates_.front());
    Greedy(topo_.root(), AllSamples(), tests, root_test);
    return tests;
  }

  // Greedy plus ascent from the plain greedy tree and from the best
  // `restarts` root tests by purity; the best result wins, earliest on ties.
  std::vector<Test> Restarts() const {
    std::vector<Test> best = Greedy();
    Polish(best);
    int64_t best_score = Score(best);
    if (topo_.IsLeafAdjacent(topo_.root()) || best_score >= ceiling_) return best;
    const std::vector<int64_t> scores = SplitScores(topo_.root(), AllSamples());
    std::vector<int> order(candidates_.size());
    for (size_t c = 0; c < order.size(); ++c) order[c] = static_cast<int>(c);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores[a] > scores[b]; });
    const size_t count = std::min(order.size(), static_cast<size_t>(opt_.restarts));
    for (size_t r = 0; r < count; ++r) {
      std::vector<Test> tests = Greedy(&candidates_[order[r]]);
      Polish(tests);
      const int64_t s = Score(tests);
      if (s > best_score) {
        best_score = s;
        best = std::move(tests);
        if (best_score >= ceiling_) break;
      }
    }
    return best;
  }

  // Whether sample i passes through node k under `tests`.
  bool Reaches(int i, int k, const std::vector<Test>& tests) const {
    int at = topo_.root();
    while (at != k) {
      const DecisionNode& node = topo_.node(at);
      const ChildRef next = GoesLeft(i, tests[at - 1]) ? node.left : node.right;
      if (next.is_leaf) return false;
      at = next.id;
    }
    return true;
  }

  void Improve(std::vector<Test>& tests) const {
    int64_t current = Score(tests);
    std::vector<int> reach;
    for (int pass = 0; pass < opt_.max_passes; ++pass) {
      bool changed = false;
      for (int k = 1; k <= topo_.num_decision_nodes(); ++k) {
        // Only samples through k depend on its test.
        reach.clear();
        int64_t base_tp = 0, base_tn = 0;
        for (int i = 0; i < data_.num_samples(); ++i) {
          if (Reaches(i, k, tests)) {
            reach.push_back(i);
            continue;
          }
          const bool pos = TreeTopology::IsPositiveLeaf(RouteFrom(i, topo_.root(), tests));
          if (data_.Label(i) > 0) {
            base_tp += pos;
          } else {
            base_tn += !pos;
          }
        }
        const Test keep = tests[k - 1];
        Test best_test = keep;
        for (const Test& t : candidates_) {
          if (t == keep) continue;
          tests[k - 1] = t;
          int64_t tp = base_tp, tn = base_tn;
          for (int i : reach) {
            const bool pos = TreeTopology::IsPositiveLeaf(RouteFrom(i, k, tests));
            if (data_.Label(i) > 0) {
              tp += pos;
            } else {
              tn += !pos;
            }
          }
          const int64_t s = ScoreCounts(tp, tn);
          if (s > current) {
            current = s;
            best_test = t;
          }
        }
        tests[k - 1] = best_test;
        changed |= !(best_test == keep);
      }
      if (!changed) break;
    }
  }

  // Joint move on two nodes; returns whether the score improved.
  bool ImprovePair(std::vector<Test>& tests, int64_t& current) const {
    const int nodes = topo_.num_decision_nodes();
    const double c = static_cast<double>(candidates_.size());
    if (c * c * data_.num_samples() * nodes * (nodes - 1) / 2 > kMaxPairWork) return false;
    std::vector<int> reach;
    bool improved = false;
    for (int k1 = 1; k1 <= nodes; ++k1) {
      for (int k2 = k1 + 1; k2 <= nodes; ++k2) {
        // Samples through neither node keep their leaf.
        reach.clear();
        int64_t base_tp = 0, base_tn = 0;
        for (int i = 0; i < data_.num_samples(); ++i) {
          if (Reaches(i, k1, tests) || Reaches(i, k2, tests)) {
            reach.push_back(i);
            continue;
          }
          const bool pos = TreeTopology::IsPositiveLeaf(RouteFrom(i, topo_.root(), tests));
          if (data_.Label(i) > 0) {
            base_tp += pos;
          } else {
            base_tn += !pos;
          }
        }
        const Test keep1 = tests[k1 - 1], keep2 = tests[k2 - 1];
        Test best1 = keep1, best2 = keep2;
        for (const Test& t1 : candidates_) {
          tests[k1 - 1] = t1;
          for (const Test& t2 : candidates_) {
            tests[k2 - 1] = t2;
            int64_t tp = base_tp, tn = base_tn;
            for (int i : reach) {
              const bool pos = TreeTopology::IsPositiveLeaf(RouteFrom(i, topo_.root(), tests));
              if (data_.Label(i) > 0) {
                tp += pos;
              } else {
                tn += !pos;
              }
            }
            const int64_t s = ScoreCounts(tp, tn);
            if (s > current) {
              current = s;
              best1 = t1;
              best2 = t2;
              improved = true;
            }
          }
        }
        tests[k1 - 1] = best1;
        tests[k2 - 1] = best2;
      }
    }
    return improved;
  }

  // Single-node ascent, then pair moves until neither helps.
  void Polish(std::vector<Test>& tests) const {
    Improve(tests);
    int64_t current = Score(tests);
    for (int pass = 0; pass < opt_.max_passes && ImprovePair(tests, current); ++pass) {
      Improve(tests);
      current = Score(tests);
    }
  }

  std::vector<Test> FromTree(const DecisionTree& tree) const {
    std::vector<Test> tests;
    for (const NodeTest& nt : tree.tests()) {
      Test t{nt.group, 0};
      const std::vector<int>& f = data_.schema().group(nt.group).features;
      for (int j : nt.subset) {
        t.mask |= uint32_t{1} << (std::find(f.begin(), f.end(), j) - f.begin());
      }
      tests.push_back(t);
    }
    return tests;
  }

  DecisionTree ToTree(const std::vector<Test>& tests) const {
    std::vector<NodeTest> out;
    for (const Test& t : tests) {
      NodeTest nt{t.group, {}};
      const std::vector<int>& f = data_.schema().group(t.group).features;
      for (size_t b = 0; b < f.size(); ++b) {
        if ((t.mask >> b) & 1u) nt.subset.push_back(f[b]);
      }
      out.push_back(std::move(nt));
    }
    return DecisionTree(topo_, data_.schema_ptr(), std::move(out));
  }

 private:
  const EncodedDataset& data_;
  const TreeTopology& topo_;
  HeuristicOptions opt_;
  std::vector<uint8_t> position_;
  std::vector<Test> candidates_;
  int64_t pos_weight_ = 1;
  int64_t neg_weight_ = 1;
  int64_t floor_ = 0;
  int64_t ceiling_ = 0;  // score of a perfect tree
};

}  // namespace

int64_t HeuristicScore(const DecisionTree& tree, const EncodedDataset& data,
                       const HeuristicOptions& options) {
  const Search search(data, tree.topology(), options);
  return search.Score(search.FromTree(tree));
}

DecisionTree GreedyTree(const EncodedDataset& data, const TreeTopology& topology,
                        const HeuristicOptions& options) {
  const Search search(data, topology, options);
  return search.ToTree(search.Greedy());
}

DecisionTree ImproveTree(const DecisionTree& start, const EncodedDataset& data,
                         const HeuristicOptions& options) {
  const Search search(data, start.topology(), options);
  std::vector<Test> tests = search.FromTree(start);
  search.Improve(tests);
  return search.ToTree(tests);
}

DecisionTree HeuristicTree(const EncodedDataset& data, const TreeTopology& topology,
                           const HeuristicOptions& options) {
  const Search search(data, topology, options);
  return search.ToTree(search.Restarts());
}

}  // namespace odt

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

#include "odt/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>
#include <vector>

#include "odt/errors.h"

namespace odt {
namespace {

using Bits = std::vector<uint64_t>;
constexpr int64_t kImpossible = std::numeric_limits<int64_t>::min() / 4;

struct Choice {
  int group = 0;
  uint32_t mask = 0;
};

int Count(const Bits& a, const Bits& b) {
  int c = 0;
  for (size_t w = 0; w < a.size(); ++w) c += std::popcount(a[w] & b[w]);
  return c;
}

class Enumerator {
 public:
  Enumerator(const EncodedDataset& data, const TreeTopology& topology,
             const OracleOptions& options)
      : data_(data), topo_(topology), opt_(options) {
    const GroupSchema& schema = data.schema();
    const int n = data.num_samples();
    words_ = (n + 63) / 64;
    all_.assign(words_, 0);
    pos_.assign(words_, 0);
    neg_.assign(words_, 0);
    for (int i = 0; i < n; ++i) {
      const uint64_t bit = uint64_t{1} << (i % 64);
      all_[i / 64] |= bit;
      (data.Label(i) > 0 ? pos_ : neg_)[i / 64] |= bit;
    }
    // unions_[g][mask] = samples whose active feature of g is in mask.
    unions_.resize(schema.num_groups());
    for (int g = 0; g < schema.num_groups(); ++g) {
      const std::vector<int>& feats = schema.group(g).features;
      std::vector<Bits> single(feats.size(), Bits(words_, 0));
      for (int i = 0; i < n; ++i) {
        const int f = data.ActiveFeature(i, g);
        const auto t = std::find(feats.begin(), feats.end(), f) - feats.begin();
        single[t][i / 64] |= uint64_t{1} << (i % 64);
      }
      const uint32_t count = uint32_t{1} << feats.size();
      unions_[g].assign(count, Bits(words_, 0));
      for (uint32_t m = 1; m < count; ++m) {
        const int low = std::countr_zero(m);
        const Bits& prev = unions_[g][m & (m - 1)];
        for (int w = 0; w < words_; ++w) unions_[g][m][w] = prev[w] | single[low][w];
      }
      for (uint32_t m = 0; m < count; ++m) candidates_.push_back({g, m});
    }
    switch (opt_.mode) {
      case BuildMode::kAccuracy:
        pos_weight_ = opt_.class_weight.den;
        neg_weight_ = opt_.class_weight.num;
        break;
      case BuildMode::kMaxSensitivity:
        objective_class_ = &pos_;
        floor_class_ = &neg_;
        break;
      case BuildMode::kMaxSpecificity:
        objective_class_ = &neg_;
        floor_class_ = &pos_;
        break;
    }
  }

  bool scalar() const { return opt_.mode == BuildMode::kAccuracy; }
  const Bits& all() const { return all_; }
  const std::vector<Choice>& candidates() const { return candidates_; }
  int num_nodes() const { return topo_.num_decision_nodes(); }

  void Split(const Bits& s, const Choice& c, Bits& left, Bits& right) const {
    const Bits& u = unions_[c.group][c.mask];
    for (int w = 0; w < words_; ++w) {
      left[w] = s[w] & u[w];
      right[w] = s[w] & ~u[w];
    }
  }

  // ---- accuracy mode ----------------------------------------------------

  int64_t LeafScore(int b, const Bits& s) const {
    return TreeTopology::IsPositiveLeaf(b) ? pos_weight_ * Count(s, pos_)
                                           : neg_weight_ * Count(s, neg_);
  }

  // Best value of the subtree at `ref` on samples `s`; the winning choices
  // for its decision nodes are written into `out`.
  int64_t Scalar(ChildRef ref, const Bits& s, std::vector<Choice>& out) const {
    if (ref.is_leaf) return LeafScore(ref.id, s);
    int64_t best = kImpossible;
    std::vector<Choice> scratch = out;
    Bits left(words_), right(words_);
    for (const Choice& c : candidates_) {
      const int64_t v = ScoreChoice(ref.id, c, s, left, right, scratch);
      if (v > best) {
        best = v;
        scratch[ref.id - 1] = c;
        out = scratch;
      }
    }
    return best;
  }

  int64_t ScoreChoice(int k, const Choice& c, const Bits& s, Bits& left, Bits& right,
                      std::vector<Choice>& out) const {
    Split(s, c, left, right);
    const DecisionNode& node = topo_.node(k);
    return Scalar(node.left, left, out) + Scalar(node.right, right, out);
  }

  // ---- constrained modes ---------------------------------------------------
  // F[q] = most objective-class hits among subtrees that get at least q
  // floor-class members right, kImpossible when q is out of reach.

  using Frontier = std::vector<int64_t>;

  Frontier LeafFrontier(int b, const Bits& s) const {
    const int nq = Count(s, *floor_class_);
    const bool predicts_objective =
        TreeTopology::IsPositiveLeaf(b) == (objective_class_ == &pos_);
    if (predicts_objective) {
      Frontier f(nq + 1, kImpossible);
      f[0] = Count(s, *objective_class_);
      return f;
    }
    return Frontier(nq + 1, 0);
  }

  static Frontier Combine(const Frontier& a, const Frontier& b) {
    const int na = static_cast<int>(a.size()) - 1;
    const int nb = static_cast<int>(b.size()) - 1;
    Frontier f(na + nb + 1, kImpossible);
    for (int qa = 0; qa <= na; ++qa) {
      if (a[qa] == kImpossible) break;
      for (int qb = 0; qb <= nb; ++qb) {
        if (b[qb] == kImpossible) break;
        int64_t& slot = f[qa + qb];
        slot = std::max(slot, a[qa] + b[qb]);
      }
    }
    // At least q: take the suffix maximum.
    for (int q = na + nb - 1; q >= 0; --q) f[q] = std::max(f[q], f[q + 1]);
    return f;
  }

  Frontier Pareto(ChildRef ref, const Bits& s) const {
    if (ref.is_leaf) return LeafFrontier(ref.id, s);
    Frontier best;
    Bits left(words_), right(words_);
    for (const Choice& c : candidates_) {
      Frontier f = ChoiceFrontier(ref.id, c, s, left, right);
      if (best.empty()) {
        best = std::move(f);
      } else {
        for (size_t q = 0; q < best.size(); ++q) best[q] = std::max(best[q], f[q]);
      }
    }
    return best;
  }

  Frontier ChoiceFrontier(int k, const Choice& c, const Bits& s, Bits& left,
                          Bits& right) const {
    Split(s, c, left, right);
    const DecisionNode& node = topo_.node(k);
    return Combine(Pareto(node.left, left), Pareto(node.right, right));
  }

  // Finds choices reaching `target` with at least q floor hits, first in
  // enumeration order.
  void Reconstruct(ChildRef ref, const Bits& s, int q, int64_t target,
                   std::vector<Choice>& out) const {
    if (ref.is_leaf) return;
    Bits left(words_), right(words_);
    const DecisionNode& node = topo_.node(ref.id);
    for (const Choice& c : candidates_) {
      Split(s, c, left, right);
      const Frontier fl = Pareto(node.left, left);
      const Frontier fr = Pareto(node.right, right);
      const int nl = static_cast<int>(fl.size()) - 1;
      const int nr = static_cast<int>(fr.size()) - 1;
      for (int ql = 0; ql <= nl; ++ql) {
        const int qr = std::max(0, q - ql);
        if (qr > nr || fl[ql] == kImpossible || fr[qr] == kImpossible) continue;
        if (fl[ql] + fr[qr] == target) {
          out[ref.id - 1] = c;
          Reconstruct(node.left, left, ql, fl[ql], out);
          Reconstruct(node.right, right, qr, fr[qr], out);
          return;
        }
      }
    }
    throw Error(ErrorCode::kNumericalFailure, "oracle reconstruction lost the optimum");
  }

  int FloorTarget() const {
    const int64_t size = Count(all_, *floor_class_);
    return static_cast<int>(opt_.min_rate.CeilTimes(size));
  }

  DecisionTree MakeTree(const std::vector<Choice>& choices) const {
    const GroupSchema& schema = data_.schema();
    std::vector<NodeTest> tests;
    for (const Choice& c : choices) {
      NodeTest t{c.group, {}};
      const std::vector<int>& feats = schema.group(c.group).features;
      for (size_t b = 0; b < feats.size(); ++b) {
        if (c.mask & (uint32_t{1} << b)) t.subset.push_back(feats[b]);
      }
      tests.push_back(std::move(t));
    }
    return DecisionTree(topo_, data_.schema_ptr(), std::move(tests));
  }

 private:
  const EncodedDataset& data_;
  const TreeTopology& topo_;
  OracleOptions opt_;
  int words_ = 0;
  Bits all_, pos_, neg_;
  std::vector<std::vector<Bits>> unions_;
  std::vector<Choice> candidates_;
  int64_t pos_weight_ = 0;
  int64_t neg_weight_ = 0;
  const Bits* objective_class_ = nullptr;
  const Bits* floor_class_ = nullptr;
};

void CheckInputs(const EncodedDataset& data, const TreeTopology& topology,
                 const OracleOptions& options) {
  if (options.class_weight.num <= 0 || options.class_weight.den <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "class weight must be positive");
  }
  const double size = SearchSize(topology, data.schema());
  if (!(size <= options.budget)) {
    char msg[128];
    std::snprintf(msg, sizeof(msg), "enumeration needs %.3g assignments, budget is %.3g",
                  size, options.budget);
    throw Error(ErrorCode::kBudgetExceeded, msg);
  }
  for (const FeatureGroup& g : data.schema().groups()) {
    if (g.features.size() > 30) {
      throw Error(ErrorCode::kBudgetExceeded, "group " + g.column + " is too large");
    }
  }
  if (options.mode != BuildMode::kAccuracy &&
      (data.positive_indices().empty() || data.negative_indices().empty())) {
    throw Error(ErrorCode::kEmptyClass, "constrained mode needs both classes");
  }
}

template <bool kParallel>
OracleResult Run(const EncodedDataset& data, const TreeTopology& topology,
                 const OracleOptions& options) {
  CheckInputs(data, topology, options);
  const Enumerator e(data, topology, options);
  const std::vector<Choice>& cands = e.candidates();
  const int count = static_cast<int>(cands.size());

  if (e.scalar()) {
    std::vector<int64_t> value(count);
    std::vector<std::vector<Choice>> choices(count, std::vector<Choice>(e.num_nodes()));
#pragma omp parallel for schedule(dynamic) if (kParallel)
    for (int c = 0; c < count; ++c) {
      Bits left(e.all().size()), right(e.all().size());
      value[c] = e.ScoreChoice(topology.root(), cands[c], e.all(), left, right, choices[c]);
      choices[c][topology.root() - 1] = cands[c];
    }
    int best = 0;
    for (int c = 1; c < count; ++c) {
      if (value[c] > value[best]) best = c;
    }
    return OracleResult{value[best], e.MakeTree(choices[best])};
  }

  std::vector<std::vector<int64_t>> frontier(count);
#pragma omp parallel for schedule(dynamic) if (kParallel)
  for (int c = 0; c < count; ++c) {
    Bits left(e.all().size()), right(e.all().size());
    frontier[c] = e.ChoiceFrontier(topology.root(), cands[c], e.all(), left, right);
  }
  const int q = e.FloorTarget();
  int best = -1;
  for (int c = 0; c < count; ++c) {
    if (q >= static_cast<int>(frontier[c].size()) || frontier[c][q] == kImpossible) continue;
    if (best < 0 || frontier[c][q] > frontier[best][q]) best = c;
  }
  if (best < 0) {
    throw Error(ErrorCode::kInfeasible, "no tree reaches the rate floor");
  }
  // Rebuild the subtrees of the winning root choice.
  std::vector<Choice> choices(e.num_nodes());
  choices[topology.root() - 1] = cands[best];
  Bits left(e.all().size()), right(e.all().size());
  e.Split(e.all(), cands[best], left, right);
  const DecisionNode& node = topology.node(topology.root());
  // Search the left/right floor split that attains the root frontier value.
  const auto fl = e.Pareto(node.left, left);
  const auto fr = e.Pareto(node.right, right);
  const int64_t target = frontier[best][q];
  bool found = false;
  for (int ql = 0; ql < static_cast<int>(fl.size()) && !found; ++ql) {
    const int qr = std::max(0, q - ql);
    if (qr >= static_cast<int>(fr.size()) || fl[ql] == kImpossible ||
        fr[qr] == kImpossible || fl[ql] + fr[qr] != target) {
      continue;
    }
    e.Reconstruct(node.left, left, ql, fl[ql], choices);
    e.Reconstruct(node.right, right, qr, fr[qr], choices);
    found = true;
  }
  if (!found) {
    throw Error(ErrorCode::kNumericalFailure, "oracle reconstruction lost the optimum");
  }
  return OracleResult{target, e.MakeTree(choices)};
}

uint64_t SaturatingProduct(const std::vector<uint64_t>& factors) {
  uint64_t p = 1;
  for (uint64_t f : factors) {
    if (f != 0 && p > std::numeric_limits<uint64_t>::max() / f) {
      return std::numeric_limits<uint64_t>::max();
    }
    p *= f;
  }
  return p;
}

uint64_t PerNodeCount(const GroupSchema& schema, bool anchored) {
  uint64_t sum = 0;
  for (int g = 0; g < schema.num_groups(); ++g) {
    const int bits = schema.GroupSize(g) - (anchored ? 1 : 0);
    if (bits >= 63) return std::numeric_limits<uint64_t>::max();
    sum += uint64_t{1} << bits;
  }
  return sum;
}

}  // namespace

double SearchSize(const TreeTopology& topology, const GroupSchema& schema) {
  double per_node = 0.0;
  for (int g = 0; g < schema.num_groups(); ++g) {
    per_node += std::ldexp(1.0, schema.GroupSize(g));
  }
  return std::pow(per_node, topology.num_decision_nodes());
}

uint64_t UnreducedCount(const TreeTopology& topology, const GroupSchema& schema) {
  return SaturatingProduct(std::vector<uint64_t>(topology.num_decision_nodes(),
                                                 PerNodeCount(schema, false)));
}

uint64_t SymmetryReducedCount(const TreeTopology& topology, const GroupSchema& schema) {
  std::vector<uint64_t> factors;
  for (int k = 1; k <= topology.num_decision_nodes(); ++k) {
    factors.push_back(PerNodeCount(schema, topology.IsAnchorEligible(k)));
  }
  return SaturatingProduct(factors);
}

OracleResult EnumerateOptimal(const EncodedDataset& data, const TreeTopology& topology,
                              const OracleOptions& options) {
  return Run<true>(data, topology, options);
}

OracleResult EnumerateOptimalSerial(const EncodedDataset& data,
                                    const TreeTopology& topology,
                                    const OracleOptions& options) {
  return Run<false>(data, topology, options);
}

int64_t TreeObjective(const DecisionTree& tree, const EncodedDataset& data,
                      const OracleOptions& options) {
  const Metrics m = EvaluateSerial(tree, data);
  switch (options.mode) {
    case BuildMode::kAccuracy:
      return options.class_weight.den * m.tp + options.class_weight.num * m.tn;
    case BuildMode::kMaxSensitivity:
      return m.tp;
    case BuildMode::kMaxSpecificity:
      return m.tn;
  }
  return 0;
}

}  // namespace odt

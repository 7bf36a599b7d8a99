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

#include "odt/experiments.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <sstream>

#include "odt/errors.h"
#include "odt/heuristic.h"

namespace odt {
namespace {

uint64_t SplitMix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::vector<int> Complement(int n, const std::vector<int>& sorted) {
  std::vector<int> out;
  size_t p = 0;
  for (int i = 0; i < n; ++i) {
    if (p < sorted.size() && sorted[p] == i) {
      ++p;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

// Right-aligned columns separated by two spaces.
std::string Align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream out;
  for (const auto& r : rows) {
    for (size_t c = 0; c < r.size(); ++c) {
      if (c > 0) out << "  ";
      out << std::string(width[c] - r[c].size(), ' ') << r[c];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

Rng::Rng(uint64_t seed) : state_(SplitMix64(seed)) {
  if (state_ == 0) state_ = 1;
}

uint64_t Rng::Next() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

uint64_t Rng::Uniform(uint64_t bound) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = Next();
  } while (x >= limit);
  return x % bound;
}

int TrainSize(int n) {
  return std::min(static_cast<int>((9LL * n + 9) / 10), 600);
}

Split MakeSplit(int n, int train_size, Rng& rng) {
  if (train_size < 0 || train_size > n) {
    throw Error(ErrorCode::kInvalidConfig, "train size out of range");
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.Shuffle(perm);
  Split s;
  s.train.assign(perm.begin(), perm.begin() + train_size);
  std::sort(s.train.begin(), s.train.end());
  s.test = Complement(n, s.train);
  return s;
}

TrainResult TrainTree(const EncodedDataset& train, const TreeTopology& topology,
                      const TrainOptions& options, const DecisionTree* start) {
  const MilpModel model = BuildModel(train, topology, options.build);
  std::vector<double> start_x;
  if (start != nullptr || options.warm_start) {
    HeuristicOptions h;
    h.class_weight = options.build.class_weight;
    h.mode = options.build.mode;
    h.min_rate = options.build.min_rate;
    h.forbid_trivial = options.build.forbid_trivial;
    DecisionTree tree = start != nullptr ? *start : HeuristicTree(train, topology, h);
    if (options.build.anchor) tree = CanonicalizeAnchors(tree);
    start_x = TreeToAssignment(tree, model, train);
  }
  SolveResult solved =
      SolveMilp(model, options.solve, start_x.empty() ? nullptr : &start_x);
  if (!solved.has_incumbent()) {
    throw Error(ErrorCode::kInfeasible, "no tree satisfies the model constraints");
  }
  DecisionTree tree = ExtractTree(model, solved.x, topology, train.schema_ptr(),
                                  options.solve.integrality_tolerance);
  const bool flagged = solved.status == SolveStatus::kFeasibleTimeLimit;
  return TrainResult{std::move(tree), std::move(solved), ComputeModelStats(model), flagged};
}

RunResult TrainTestRun(const EncodedDataset& data, const TreeTopology& topology,
                       const TrainOptions& options, uint64_t seed) {
  const int n = data.num_samples();
  if (n < 10) {
    throw Error(ErrorCode::kInvalidConfig, "train/test runs need at least 10 samples");
  }
  Rng rng(seed);
  const Split split = MakeSplit(n, TrainSize(n), rng);
  const EncodedDataset train = data.Subset(split.train);
  const EncodedDataset test = data.Subset(split.test);
  TrainResult result = TrainTree(train, topology, options);
  const Metrics train_m = Evaluate(result.tree, train);
  const Metrics test_m = Evaluate(result.tree, test);
  return RunResult{seed,
                   static_cast<int>(split.train.size()),
                   static_cast<int>(split.test.size()),
                   train_m,
                   test_m,
                   std::move(result)};
}

CvResult CrossValidateTopology(const EncodedDataset& data,
                               const std::vector<TreeTopology>& topologies,
                               const TrainOptions& options, uint64_t seed) {
  if (topologies.size() < 2) {
    throw Error(ErrorCode::kInvalidConfig, "cross validation needs two or more topologies");
  }
  const int n = data.num_samples();
  if (n < 10) {
    throw Error(ErrorCode::kInvalidConfig, "cross validation needs at least 10 samples");
  }
  Rng rng(seed);
  const Split split = MakeSplit(n, TrainSize(n), rng);
  std::vector<int> pool = split.train;
  rng.Shuffle(pool);
  const int p = static_cast<int>(pool.size());
  constexpr int kFolds = 4;

  const int t_count = static_cast<int>(topologies.size());
  std::vector<double> accuracy(static_cast<size_t>(t_count) * kFolds, 0.0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (int job = 0; job < t_count * kFolds; ++job) {
    try {
      const int t = job / kFolds;
      const int f = job % kFolds;
      const int lo = f * p / kFolds;
      const int hi = (f + 1) * p / kFolds;
      std::vector<int> fit, val;
      for (int q = 0; q < p; ++q) (q >= lo && q < hi ? val : fit).push_back(pool[q]);
      std::sort(fit.begin(), fit.end());
      std::sort(val.begin(), val.end());
      const TrainResult r = TrainTree(data.Subset(fit), topologies[t], options);
      accuracy[job] = Evaluate(r.tree, data.Subset(val)).accuracy();
    } catch (...) {
#pragma omp critical(odt_cv_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<CvCandidate> candidates;
  int chosen = 0;
  for (int t = 0; t < t_count; ++t) {
    CvCandidate c;
    c.topology = topologies[t].name();
    c.num_leaves = topologies[t].num_leaves();
    c.fold_accuracy.assign(accuracy.begin() + t * kFolds, accuracy.begin() + (t + 1) * kFolds);
    c.mean_accuracy = std::accumulate(c.fold_accuracy.begin(), c.fold_accuracy.end(), 0.0) / kFolds;
    candidates.push_back(std::move(c));
    const CvCandidate& best = candidates[chosen];
    const CvCandidate& cur = candidates.back();
    if (cur.mean_accuracy > best.mean_accuracy + 1e-12 ||
        (std::abs(cur.mean_accuracy - best.mean_accuracy) <= 1e-12 &&
         cur.num_leaves < best.num_leaves)) {
      chosen = t;
    }
  }

  const EncodedDataset train = data.Subset(split.train);
  const EncodedDataset test = data.Subset(split.test);
  TrainResult final_result = TrainTree(train, topologies[chosen], options);
  const Metrics train_m = Evaluate(final_result.tree, train);
  const Metrics test_m = Evaluate(final_result.tree, test);
  RunResult run{seed,
                static_cast<int>(split.train.size()),
                static_cast<int>(split.test.size()),
                train_m,
                test_m,
                std::move(final_result)};
  const int leaves = topologies[chosen].num_leaves();
  return CvResult{seed, std::move(candidates), chosen, leaves, std::move(run)};
}

SweepResult SensitivitySweep(const EncodedDataset& data, const TreeTopology& topology,
                             const std::vector<Rational>& betas,
                             const TrainOptions& options, uint64_t seed) {
  if (data.positive_indices().empty() || data.negative_indices().empty()) {
    throw Error(ErrorCode::kEmptyClass, "the sweep needs both classes");
  }
  const int n = data.num_samples();
  Rng rng(seed);
  const Split split = MakeSplit(n, TrainSize(n), rng);
  const EncodedDataset train = data.Subset(split.train);
  const EncodedDataset test = data.Subset(split.test);

  std::vector<int> order(betas.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return betas[a].num * betas[b].den > betas[b].num * betas[a].den;
  });
  std::vector<std::optional<SweepRow>> rows(betas.size());
  std::optional<DecisionTree> previous;
  for (int idx : order) {
    TrainOptions opt = options;
    opt.build.mode = BuildMode::kMaxSensitivity;
    opt.build.min_rate = betas[idx];
    TrainResult r = TrainTree(train, topology, opt, previous ? &*previous : nullptr);
    previous = r.tree;
    const Metrics train_m = Evaluate(r.tree, train);
    const Metrics test_m = Evaluate(r.tree, test);
    rows[idx] = SweepRow{betas[idx], train_m, test_m, std::move(r.solve), std::move(r.tree),
                         r.flagged};
  }
  SweepResult out;
  out.seed = seed;
  out.train_size = static_cast<int>(split.train.size());
  out.test_size = static_cast<int>(split.test.size());
  for (auto& row : rows) out.rows.push_back(std::move(*row));
  return out;
}

nlohmann::json RunResultToJson(const RunResult& run) {
  nlohmann::json j;
  j["seed"] = run.seed;
  j["train_size"] = run.train_size;
  j["test_size"] = run.test_size;
  j["solve"] = SolveResultToJson(run.result.solve);
  j["flagged"] = run.result.flagged;
  j["model"] = ModelStatsToJson(run.result.stats);
  j["train"] = MetricsToJson(run.train);
  j["test"] = MetricsToJson(run.test);
  j["tree"] = TreeToJson(run.result.tree);
  j["tree_text"] = RenderTree(run.result.tree);
  return j;
}

nlohmann::json CvResultToJson(const CvResult& cv) {
  nlohmann::json j;
  j["seed"] = cv.seed;
  nlohmann::json cands = nlohmann::json::array();
  for (const CvCandidate& c : cv.candidates) {
    cands.push_back({{"topology", c.topology},
                     {"num_leaves", c.num_leaves},
                     {"fold_accuracy", c.fold_accuracy},
                     {"mean_accuracy", c.mean_accuracy}});
  }
  j["candidates"] = cands;
  j["chosen"] = cv.candidates[cv.chosen].topology;
  j["leaf_count"] = cv.leaf_count;
  j["final"] = RunResultToJson(cv.final_run);
  return j;
}

nlohmann::json SweepResultToJson(const SweepResult& sweep) {
  nlohmann::json j;
  j["seed"] = sweep.seed;
  j["train_size"] = sweep.train_size;
  j["test_size"] = sweep.test_size;
  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& r : sweep.rows) {
    rows.push_back({{"beta", r.beta.ToString()},
                    {"solve", SolveResultToJson(r.solve)},
                    {"flagged", r.flagged},
                    {"train", MetricsToJson(r.train)},
                    {"test", MetricsToJson(r.test)},
                    {"tree", TreeToJson(r.tree)}});
  }
  j["rows"] = rows;
  return j;
}

std::string RunTable(const std::vector<RunResult>& runs) {
  std::vector<std::vector<std::string>> rows = {
      {"seed", "train", "test", "status", "objective", "bound", "train_acc", "test_acc"}};
  double train_sum = 0.0, test_sum = 0.0;
  for (const RunResult& r : runs) {
    rows.push_back({std::to_string(r.seed), std::to_string(r.train_size),
                    std::to_string(r.test_size),
                    std::string(SolveStatusName(r.result.solve.status)) +
                        (r.result.flagged ? "*" : ""),
                    Fixed(r.result.solve.objective, 0), Fixed(r.result.solve.best_bound, 2),
                    Fixed(100.0 * r.train.accuracy(), 1), Fixed(100.0 * r.test.accuracy(), 1)});
    train_sum += r.train.accuracy();
    test_sum += r.test.accuracy();
  }
  if (runs.size() > 1) {
    const double k = static_cast<double>(runs.size());
    rows.push_back({"mean", "", "", "", "", "", Fixed(100.0 * train_sum / k, 1),
                    Fixed(100.0 * test_sum / k, 1)});
  }
  return Align(rows);
}

std::string CvTable(const CvResult& cv) {
  std::vector<std::vector<std::string>> rows = {{"topology", "leaves", "f1", "f2", "f3", "f4", "mean"}};
  for (size_t t = 0; t < cv.candidates.size(); ++t) {
    const CvCandidate& c = cv.candidates[t];
    std::vector<std::string> r = {c.topology + (static_cast<int>(t) == cv.chosen ? " <" : ""),
                                  std::to_string(c.num_leaves)};
    for (double a : c.fold_accuracy) r.push_back(Fixed(100.0 * a, 1));
    r.push_back(Fixed(100.0 * c.mean_accuracy, 2));
    rows.push_back(std::move(r));
  }
  return Align(rows) + "\n" + RunTable({cv.final_run});
}

std::string SweepTable(const SweepResult& sweep) {
  std::vector<std::vector<std::string>> rows = {
      {"beta", "status", "train_tpr", "train_tnr", "test_tpr", "test_tnr"}};
  for (const SweepRow& r : sweep.rows) {
    rows.push_back({Fixed(r.beta.ToDouble(), 3),
                    std::string(SolveStatusName(r.solve.status)) + (r.flagged ? "*" : ""),
                    Fixed(100.0 * r.train.tpr(), 1), Fixed(100.0 * r.train.tnr(), 1),
                    Fixed(100.0 * r.test.tpr(), 1), Fixed(100.0 * r.test.tnr(), 1)});
  }
  return Align(rows);
}

}  // namespace odt

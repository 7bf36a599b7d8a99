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

// Experimental protocols: seeded train/test splits, training through the
// integer program, 4-fold topology selection and sensitivity sweeps.
//
// Randomness: xorshift64* seeded through one splitmix64 step, with
// Fisher-Yates shuffles drawing j uniformly from [0, i] by rejection. Every
// protocol consumes a single generator created from the run seed.

#ifndef ODT_EXPERIMENTS_H_
#define ODT_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "odt/branch_and_bound.h"
#include "odt/dataset.h"
#include "odt/milp_model.h"
#include "odt/rational.h"
#include "odt/topology.h"
#include "odt/tree.h"

namespace odt {

class Rng {
 public:
  explicit Rng(uint64_t seed);
  uint64_t Next();
  // Uniform in [0, bound); bound > 0.
  uint64_t Uniform(uint64_t bound);
  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[Uniform(i)]);
    }
  }

 private:
  uint64_t state_;
};

// min(ceil(0.9 n), 600).
int TrainSize(int n);

struct Split {
  std::vector<int> train;  // ascending
  std::vector<int> test;   // ascending
};

Split MakeSplit(int n, int train_size, Rng& rng);

struct TrainOptions {
  BuildConfig build;
  SolveConfig solve;
  // Seed the search with the heuristic tree.
  bool warm_start = true;
};

struct TrainResult {
  DecisionTree tree;
  SolveResult solve;
  ModelStats stats;
  // Set when the solve stopped at a limit; the incumbent was used.
  bool flagged = false;
};

// Builds and solves the model, then extracts the tree. `start`, if given,
// replaces the heuristic as warm start.
TrainResult TrainTree(const EncodedDataset& train, const TreeTopology& topology,
                      const TrainOptions& options,
                      const DecisionTree* start = nullptr);

struct RunResult {
  uint64_t seed = 0;
  int train_size = 0;
  int test_size = 0;
  Metrics train;
  Metrics test;
  TrainResult result;
};

// Requires N >= 10.
RunResult TrainTestRun(const EncodedDataset& data, const TreeTopology& topology,
                       const TrainOptions& options, uint64_t seed);

struct CvCandidate {
  std::string topology;
  int num_leaves = 0;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

struct CvResult {
  uint64_t seed = 0;
  std::vector<CvCandidate> candidates;
  int chosen = 0;  // index into candidates
  int leaf_count = 0;
  RunResult final_run;
};

// Pool of TrainSize(n) samples, 4 folds of it; the topology with the best
// mean validation accuracy (ties: fewer leaves, then list order) is
// retrained on the pool and tested on the holdout.
CvResult CrossValidateTopology(const EncodedDataset& data,
                               const std::vector<TreeTopology>& topologies,
                               const TrainOptions& options, uint64_t seed);

struct SweepRow {
  Rational beta;
  Metrics train;
  Metrics test;
  SolveResult solve;
  DecisionTree tree;
  bool flagged = false;
};

struct SweepResult {
  uint64_t seed = 0;
  int train_size = 0;
  int test_size = 0;
  std::vector<SweepRow> rows;  // in the order of `betas`
};

// Maximises sensitivity subject to specificity >= beta for each beta, on one
// seeded split. Solves run from the largest beta down; each tree is feasible
// for every smaller beta and seeds the next solve.
SweepResult SensitivitySweep(const EncodedDataset& data, const TreeTopology& topology,
                             const std::vector<Rational>& betas,
                             const TrainOptions& options, uint64_t seed);

nlohmann::json RunResultToJson(const RunResult& run);
nlohmann::json CvResultToJson(const CvResult& cv);
nlohmann::json SweepResultToJson(const SweepResult& sweep);

// Aligned text tables.
std::string RunTable(const std::vector<RunResult>& runs);
std::string CvTable(const CvResult& cv);
std::string SweepTable(const SweepResult& sweep);

}  // namespace odt

#endif  // ODT_EXPERIMENTS_H_

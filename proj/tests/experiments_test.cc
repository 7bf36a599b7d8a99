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

#include <gtest/gtest.h>

#include <numeric>

#include "odt/errors.h"
#include "odt/heuristic.h"
#include "odt/oracle.h"
#include "test_util.h"

namespace odt {
namespace {

using testing::FromCsv;
using testing::RandomInstance;

// Reference values from a separate implementation of the same generator.
TEST(Rng, ReferenceStream) {
  Rng r(1);
  EXPECT_EQ(r.Next(), 0x4b46a55df3611b9bULL);
  EXPECT_EQ(r.Next(), 0xd7e1f1410e763ef4ULL);
  EXPECT_EQ(r.Next(), 0x5f14ec66975f9b06ULL);
  Rng s(42);
  std::vector<int> p(10);
  std::iota(p.begin(), p.end(), 0);
  s.Shuffle(p);
  EXPECT_EQ(p, (std::vector<int>{0, 1, 6, 8, 3, 9, 5, 7, 4, 2}));
}

TEST(Split, Sizes) {
  EXPECT_EQ(TrainSize(958), 600);
  EXPECT_EQ(TrainSize(432), 389);
  EXPECT_EQ(TrainSize(10), 9);
  EXPECT_EQ(TrainSize(699), 600);
  Rng rng(3);
  const Split s = MakeSplit(958, TrainSize(958), rng);
  EXPECT_EQ(s.train.size(), 600u);
  EXPECT_EQ(s.test.size(), 358u);
  EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
  std::vector<int> all = s.train;
  all.insert(all.end(), s.test.begin(), s.test.end());
  std::sort(all.begin(), all.end());
  std::vector<int> expect(958);
  std::iota(expect.begin(), expect.end(), 0);
  EXPECT_EQ(all, expect);
  Rng again(3);
  EXPECT_EQ(MakeSplit(958, 600, again).train, s.train);
  Rng other(4);
  EXPECT_NE(MakeSplit(958, 600, other).train, s.train);
}

TEST(TrainTestRun, DeterministicAndConsistent) {
  const EncodedDataset d = RandomInstance(17, 60).data;
  const TreeTopology t = TreeTopology::Preset("depth2_5");
  TrainOptions o;
  const RunResult a = TrainTestRun(d, t, o, 9);
  const RunResult b = TrainTestRun(d, t, o, 9);
  EXPECT_EQ(a.train_size, 54);
  EXPECT_EQ(a.test_size, 6);
  EXPECT_EQ(RunResultToJson(a), RunResultToJson(b));
  EXPECT_EQ(a.result.solve.status, SolveStatus::kOptimal);
  // Train accuracy times N is the objective when C = 1.
  EXPECT_EQ(static_cast<double>(a.train.correct()), a.result.solve.objective);
  EXPECT_FALSE(RunResultToJson(a)["solve"].contains("wall_time"));
}

TEST(TrainTestRun, WarmStartDoesNotChangeOptimum) {
  const EncodedDataset d = RandomInstance(18, 60).data;
  const TreeTopology t = TreeTopology::Preset("depth2");
  TrainOptions cold;
  cold.warm_start = false;
  EXPECT_EQ(TrainTestRun(d, t, cold, 1).result.solve.objective,
            TrainTestRun(d, t, {}, 1).result.solve.objective);
}

TEST(TrainTestRun, TooSmall) {
  EXPECT_THROW(TrainTestRun(RandomInstance(1, 8).data, TreeTopology::Preset("depth2"), {}, 1),
               Error);
}

TEST(TrainTree, FlagsTimeLimit) {
  const EncodedDataset d = RandomInstance(19, 60, 4, 4, 3, 4).data;
  TrainOptions o;
  o.solve.node_limit = 1;
  o.build.relax_integrality = false;
  const TrainResult r = TrainTree(d, TreeTopology::Preset("depth3"), o);
  if (r.solve.status == SolveStatus::kFeasibleTimeLimit) {
    EXPECT_TRUE(r.flagged);
  } else {
    EXPECT_FALSE(r.flagged);
  }
  EXPECT_EQ(static_cast<double>(Evaluate(r.tree, d).correct()), r.solve.objective);
}

// Labels depend only on column a, so every topology fits the validation
// folds perfectly and the smallest one wins.
TEST(CrossValidate, TieGoesToFewestLeaves) {
  std::string text = "a,b,c,y\n";
  Rng rng(2);
  for (int i = 0; i < 80; ++i) {
    const int a = static_cast<int>(rng.Uniform(3));
    text += "x" + std::to_string(a) + ",u" + std::to_string(rng.Uniform(3)) + ",w" +
            std::to_string(rng.Uniform(2)) + (a == 1 ? ",p\n" : ",n\n");
  }
  const EncodedDataset d = FromCsv(text);
  std::vector<TreeTopology> topos;
  for (const char* name : {"depth3", "depth2_5", "depth2", "imbalanced"}) {
    topos.push_back(TreeTopology::Preset(name));
  }
  const CvResult cv = CrossValidateTopology(d, topos, {}, 4);
  EXPECT_EQ(cv.candidates[cv.chosen].topology, "depth2");
  EXPECT_EQ(cv.leaf_count, 4);
  for (const CvCandidate& c : cv.candidates) {
    EXPECT_EQ(c.fold_accuracy.size(), 4u);
    EXPECT_DOUBLE_EQ(c.mean_accuracy, 1.0);
  }
  EXPECT_DOUBLE_EQ(cv.final_run.test.accuracy(), 1.0);
  EXPECT_EQ(CvResultToJson(cv), CvResultToJson(CrossValidateTopology(d, topos, {}, 4)));
  EXPECT_THROW(CrossValidateTopology(d, {topos[0]}, {}, 4), Error);
}

TEST(Sweep, FloorsAndOrder) {
  const EncodedDataset d = RandomInstance(23, 80).data;
  const std::vector<Rational> betas = {Rational::Of(1, 2), Rational::Of(0), Rational::Of(9, 10),
                                       Rational::Of(1)};
  const SweepResult s = SensitivitySweep(d, TreeTopology::Preset("depth2"), betas, {}, 5);
  ASSERT_EQ(s.rows.size(), betas.size());
  for (size_t r = 0; r < betas.size(); ++r) {
    EXPECT_EQ(s.rows[r].beta, betas[r]);
    EXPECT_GE(s.rows[r].train.tnr() + 1e-12, betas[r].ToDouble());
    EXPECT_EQ(s.rows[r].solve.status, SolveStatus::kOptimal);
  }
  EXPECT_DOUBLE_EQ(s.rows[1].train.tpr(), 1.0);  // beta = 0
  EXPECT_GE(s.rows[1].train.tpr(), s.rows[0].train.tpr());
  EXPECT_GE(s.rows[0].train.tpr(), s.rows[2].train.tpr());
  EXPECT_GE(s.rows[2].train.tpr(), s.rows[3].train.tpr());
  EXPECT_EQ(SweepResultToJson(s),
            SweepResultToJson(SensitivitySweep(d, TreeTopology::Preset("depth2"), betas, {}, 5)));

  // Each optimum matches the oracle on the same training rows.
  Rng rng(5);
  const EncodedDataset train = d.Subset(MakeSplit(d.num_samples(), TrainSize(80), rng).train);
  for (const SweepRow& row : s.rows) {
    OracleOptions o;
    o.mode = BuildMode::kMaxSensitivity;
    o.min_rate = row.beta;
    EXPECT_EQ(row.train.tp,
              EnumerateOptimal(train, TreeTopology::Preset("depth2"), o).objective);
  }
}

TEST(Tables, Layout) {
  const EncodedDataset d = RandomInstance(29, 40).data;
  const RunResult r = TrainTestRun(d, TreeTopology::Preset("depth2"), {}, 2);
  const std::string table = RunTable({r, r});
  EXPECT_EQ(table.rfind("seed", 0), 0u);
  EXPECT_NE(table.find("\nmean"), std::string::npos);
  EXPECT_NE(table.find("optimal"), std::string::npos);
  const SweepResult s = SensitivitySweep(d, TreeTopology::Preset("depth2"),
                                         {Rational::Parse("0.95")}, {}, 2);
  EXPECT_NE(SweepTable(s).find("0.950"), std::string::npos);
}

}  // namespace
}  // namespace odt

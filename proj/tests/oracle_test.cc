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

#include <gtest/gtest.h>

#include "odt/branch_and_bound.h"
#include "odt/errors.h"
#include "test_util.h"

namespace odt {
namespace {

using testing::DataPath;
using testing::FromCsv;
using testing::RandomInstance;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

struct Frozen {
  const char* csv;
  int64_t depth2[3];    // accuracy, max TPR at TNR >= 3/4, max TNR at TPR >= 3/4
  int64_t depth2_5[3];
};

// Values from a separate brute-force script that parses the topology text
// and scores every assignment directly.
const Frozen kFrozen[] = {
    {"g0,g1,y\nv0,v0,n\nv1,v1,n\nv2,v1,n\nv2,v0,p\nv0,v0,n\nv1,v0,p\nv2,v0,p\nv0,v0,n\n"
     "v1,v1,p\nv0,v0,p\nv0,v1,n\nv0,v0,n\n",
     {10, 4, 6},
     {10, 4, 6}},
    {"g0,g1,y\nv0,v0,n\nv1,v1,p\nv0,v1,n\nv0,v0,p\nv0,v0,p\nv1,v1,n\nv1,v1,p\nv1,v1,p\n"
     "v1,v0,p\nv0,v0,n\nv0,v1,n\nv1,v1,n\n",
     {8, 1, 2},
     {8, 1, 2}},
    {"g0,g1,y\nv0,v0,n\nv1,v1,n\nv2,v2,p\nv2,v1,n\nv2,v1,n\nv2,v1,p\nv0,v0,n\nv1,v1,p\n"
     "v2,v2,n\nv0,v0,p\nv2,v2,p\nv1,v2,p\n",
     {8, 3, 2},
     {8, 3, 2}},
};

TEST(EnumerateOptimal, FrozenValues) {
  for (const Frozen& f : kFrozen) {
    const EncodedDataset d = FromCsv(f.csv);
    for (const char* topo : {"depth2", "depth2_5"}) {
      const int64_t* expect = std::string(topo) == "depth2" ? f.depth2 : f.depth2_5;
      const TreeTopology t = TreeTopology::Preset(topo);
      OracleOptions o;
      EXPECT_EQ(EnumerateOptimal(d, t, o).objective, expect[0]) << topo;
      o.min_rate = Rational::Of(3, 4);
      o.mode = BuildMode::kMaxSensitivity;
      const OracleResult sens = EnumerateOptimal(d, t, o);
      EXPECT_EQ(sens.objective, expect[1]) << topo;
      const Metrics m = Evaluate(sens.tree, d);
      EXPECT_EQ(m.tp, expect[1]);
      EXPECT_GE(4 * m.tn, 3 * static_cast<int64_t>(d.negative_indices().size()));
      o.mode = BuildMode::kMaxSpecificity;
      EXPECT_EQ(EnumerateOptimal(d, t, o).objective, expect[2]) << topo;
    }
  }
}

TEST(EnumerateOptimal, AllPositive) {
  std::string text = "a,b,y\n";
  for (int i = 0; i < 10; ++i) text += "x" + std::to_string(i % 4) + ",w" + std::to_string(i % 3) + ",p\n";
  const EncodedDataset d = FromCsv(text);
  const OracleResult r = EnumerateOptimal(d, TreeTopology::Preset("depth2"));
  EXPECT_EQ(r.objective, 10);
  for (int leaf : RouteAll(r.tree, d)) EXPECT_EQ(leaf % 2, 0);
}

TEST(EnumerateOptimal, TreeScoresItsObjective) {
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 40).data;
    OracleOptions o;
    o.class_weight = Rational::Of(seed, 3);
    o.budget = 1e12;
    const OracleResult r = EnumerateOptimal(d, TreeTopology::Preset("depth2_5"), o);
    EXPECT_EQ(TreeObjective(r.tree, d, o), r.objective);
    const Metrics m = Evaluate(r.tree, d);
    EXPECT_EQ(r.objective, o.class_weight.den * m.tp + o.class_weight.num * m.tn);
  }
}

TEST(EnumerateOptimal, ParallelMatchesSerial) {
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 50).data;
    for (const char* topo : {"depth2", "depth2_5"}) {
      OracleOptions o;
      o.budget = 1e12;
      if (seed % 2 == 0) {
        o.mode = BuildMode::kMaxSpecificity;
        o.min_rate = Rational::Of(2, 3);
      }
      const TreeTopology t = TreeTopology::Preset(topo);
      const OracleResult p = EnumerateOptimal(d, t, o);
      const OracleResult s = EnumerateOptimalSerial(d, t, o);
      EXPECT_EQ(p.objective, s.objective);
      EXPECT_EQ(p.tree, s.tree);
    }
  }
}

TEST(EnumerateOptimal, FlipInvariance) {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 30, 2, 3, 2, 3).data;
    const TreeTopology t = TreeTopology::Preset("depth3");
    OracleOptions o;
    o.budget = 1e15;
    const OracleResult r = EnumerateOptimal(d, t, o);
    for (int k : t.AnchorEligible()) {
      EXPECT_EQ(TreeObjective(Flip(r.tree, k), d, o), r.objective);
    }
  }
}

TEST(EnumerateOptimal, TopologyMinors) {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 40, 2, 3, 2, 3).data;
    OracleOptions o;
    o.budget = 1e15;
    const int64_t d2 = EnumerateOptimal(d, TreeTopology::Preset("depth2"), o).objective;
    const int64_t d25 = EnumerateOptimal(d, TreeTopology::Preset("depth2_5"), o).objective;
    const int64_t d3 = EnumerateOptimal(d, TreeTopology::Preset("depth3"), o).objective;
    EXPECT_LE(d2, d25);
    EXPECT_LE(d25, d3);
  }
}

TEST(EnumerateOptimal, GroupedBeatsSimple) {
  const EncodedDataset ttt = Encode(ReadTableFile(DataPath("tic-tac-toe.csv"), TableFormat::kCsv,
                                                  {"Class", std::string("positive")}));
  Rng rng(5);
  const Split s = MakeSplit(ttt.num_samples(), 100, rng);
  const EncodedDataset sub = ttt.Subset(s.train);
  const TreeTopology t = TreeTopology::Preset("depth2");
  OracleOptions o;
  o.budget = 1e12;
  const int64_t grouped = EnumerateOptimal(sub, t, o).objective;
  const int64_t simple = EnumerateOptimal(BinarizeForSimpleBranching(sub), t, o).objective;
  EXPECT_GE(grouped, simple);
}

TEST(EnumerateOptimal, AgreesWithSolver) {
  for (uint64_t seed = 200; seed < 210; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 25).data;
    const TreeTopology t = TreeTopology::Preset("depth2");
    BuildConfig b;
    b.mode = BuildMode::kMaxSensitivity;
    b.min_rate = Rational::Of(4, 5);
    OracleOptions o;
    o.mode = b.mode;
    o.min_rate = b.min_rate;
    const SolveResult r = SolveMilp(BuildModel(d, t, b), {});
    ASSERT_EQ(r.status, SolveStatus::kOptimal);
    EXPECT_EQ(r.objective, static_cast<double>(EnumerateOptimal(d, t, o).objective));
  }
}

TEST(Counts, SymmetryReduction) {
  const auto one = FromCsv("a,y\nx,p\nz,n\nq,p\n").schema_ptr();
  const TreeTopology d3 = TreeTopology::Preset("depth3");
  EXPECT_EQ(UnreducedCount(d3, *one), 2097152u);  // 8^7
  EXPECT_EQ(UnreducedCount(d3, *one) / SymmetryReducedCount(d3, *one), 8u);
  const TreeTopology imb = TreeTopology::Preset("imbalanced");
  EXPECT_EQ(UnreducedCount(imb, *one) / SymmetryReducedCount(imb, *one), 2u);

  const auto two = FromCsv("a,b,y\nx,u,p\nz,v,n\nx,w,p\n").schema_ptr();
  const TreeTopology d2 = TreeTopology::Preset("depth2");
  EXPECT_EQ(UnreducedCount(d2, *two), 12u * 12u * 12u);
  EXPECT_EQ(SymmetryReducedCount(d2, *two), 6u * 12u * 12u);
  EXPECT_DOUBLE_EQ(SearchSize(d2, *two), 1728.0);
}

TEST(EnumerateOptimal, Errors) {
  const EncodedDataset ttt = Encode(ReadTableFile(DataPath("tic-tac-toe.csv"), TableFormat::kCsv,
                                                  {"Class", std::string("positive")}));
  EXPECT_EQ(CodeOf([&] { EnumerateOptimal(ttt, TreeTopology::Preset("depth3")); }),
            ErrorCode::kBudgetExceeded);
  const EncodedDataset pos = FromCsv("a,y\nx,p\nz,p\n");
  OracleOptions o;
  o.mode = BuildMode::kMaxSensitivity;
  EXPECT_EQ(CodeOf([&] { EnumerateOptimal(pos, TreeTopology::Preset("depth2"), o); }),
            ErrorCode::kEmptyClass);
}

}  // namespace
}  // namespace odt

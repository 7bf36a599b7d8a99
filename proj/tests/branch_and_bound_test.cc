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

#include "odt/branch_and_bound.h"

#include <gtest/gtest.h>

#include <cmath>

#include "odt/errors.h"
#include "odt/heuristic.h"
#include "odt/oracle.h"
#include "odt/tree.h"
#include "test_util.h"

namespace odt {
namespace {

using testing::FromCsv;
using testing::RandomInstance;

// Labels follow column a exactly; b is noise.
EncodedDataset Separable() {
  return FromCsv("a,b,y\nr,u,p\ns,u,n\nt,w,p\nr,w,p\ns,w,n\nt,u,p\nr,u,p\ns,u,n\n");
}

TEST(SolveMilp, SeparableToy) {
  const EncodedDataset d = Separable();
  const TreeTopology t = TreeTopology::Preset("depth2");
  const MilpModel m = BuildModel(d, t, {});
  const SolveResult r = SolveMilp(m, {});
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.objective, 8.0);
  EXPECT_EQ(r.objective, static_cast<double>(EnumerateOptimal(d, t).objective));
  const DecisionTree tree = ExtractTree(m, r.x, t, d.schema_ptr());
  EXPECT_EQ(Evaluate(tree, d).correct(), 8);
}

TEST(SolveMilp, SingleClass) {
  std::string text = "a,b,y\n";
  for (int i = 0; i < 10; ++i) text += "v" + std::to_string(i % 3) + ",w" + std::to_string(i % 2) + ",p\n";
  const EncodedDataset d = FromCsv(text);
  const TreeTopology t = TreeTopology::Preset("depth2");
  const MilpModel m = BuildModel(d, t, {});
  const SolveResult r = SolveMilp(m, {});
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.objective, 10.0);
  const DecisionTree tree = ExtractTree(m, r.x, t, d.schema_ptr());
  for (int leaf : RouteAll(tree, d)) EXPECT_EQ(leaf % 2, 0);
}

TEST(SolveMilp, MatchesOracle) {
  for (uint64_t seed = 100; seed < 112; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 30).data;
    for (const char* topo : {"depth2", "depth2_5"}) {
      const TreeTopology t = TreeTopology::Preset(topo);
      const SolveResult r = SolveMilp(BuildModel(d, t, {}), {});
      ASSERT_EQ(r.status, SolveStatus::kOptimal);
      OracleOptions o;
      o.budget = 1e12;
      EXPECT_EQ(r.objective, static_cast<double>(EnumerateOptimal(d, t, o).objective))
          << "seed " << seed << " " << topo;
    }
  }
}

// Child LP bounds never exceed the parent bound; the incumbent only rises
// and the global bound only falls.
TEST(SolveMilp, SearchInvariants) {
  for (uint64_t seed = 1; seed <= 6; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 40).data;
    SolveConfig c;
    double last_incumbent = -std::numeric_limits<double>::infinity();
    double last_bound = std::numeric_limits<double>::infinity();
    int events = 0;
    c.node_observer = [&](const NodeEvent& e) {
      ++events;
      if (e.parent >= 0 && e.lp_bound > -std::numeric_limits<double>::infinity()) {
        EXPECT_LE(e.lp_bound, e.parent_bound + 1e-6);
      }
      EXPECT_GE(e.incumbent, last_incumbent);
      EXPECT_LE(e.global_bound, last_bound + 1e-9);
      EXPECT_GE(e.global_bound, e.incumbent - 1e-9);
      last_incumbent = e.incumbent;
      last_bound = e.global_bound;
    };
    BuildConfig b;
    b.relax_integrality = false;
    const SolveResult r = SolveMilp(BuildModel(d, TreeTopology::Preset("depth2_5"), b), c);
    EXPECT_EQ(events, r.nodes_processed);
    EXPECT_LE(r.objective, r.best_bound + 1e-9);
    EXPECT_LE(r.best_bound - r.objective, 0.999);
  }
}

TEST(SolveMilp, Deterministic) {
  const MilpModel m = BuildModel(RandomInstance(21, 40).data, TreeTopology::Preset("depth3"), {});
  const SolveResult a = SolveMilp(m, {});
  const SolveResult b = SolveMilp(m, {});
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.nodes_processed, b.nodes_processed);
  EXPECT_EQ(a.lp_iterations, b.lp_iterations);
  EXPECT_EQ(SolveResultToJson(a), SolveResultToJson(b));
}

TEST(SolveMilp, RelaxedColumnsComeOutIntegral) {
  for (uint64_t seed = 30; seed < 40; ++seed) {
    const EncodedDataset d = RandomInstance(seed, 35).data;
    const TreeTopology t = TreeTopology::Preset(seed % 2 ? "depth2" : "depth2_5");
    const MilpModel m = BuildModel(d, t, {});
    const SolveResult r = SolveMilp(m, {});
    ASSERT_EQ(r.status, SolveStatus::kOptimal);
    for (int j = 0; j < m.num_variables(); ++j) {
      const double x = r.x[j];
      EXPECT_LE(std::min(std::abs(x), std::abs(1.0 - x)), 1e-6) << m.variables[j].name;
    }
  }
}

TEST(SolveMilp, MipStartGivesSameOptimum) {
  const EncodedDataset d = RandomInstance(44, 45).data;
  const TreeTopology t = TreeTopology::Preset("depth2_5");
  const MilpModel m = BuildModel(d, t, {});
  const std::vector<double> start =
      TreeToAssignment(CanonicalizeAnchors(HeuristicTree(d, t)), m, d);
  const SolveResult with = SolveMilp(m, {}, &start);
  const SolveResult without = SolveMilp(m, {});
  EXPECT_EQ(with.objective, without.objective);
  EXPECT_GE(with.objective, m.ObjectiveValue(start));
}

TEST(SolveMilp, Limits) {
  const EncodedDataset d = RandomInstance(50, 50, 4, 4, 3, 4).data;
  const TreeTopology t = TreeTopology::Preset("depth3");
  BuildConfig b;
  b.relax_integrality = false;
  b.strengthen = false;
  const MilpModel m = BuildModel(d, t, b);
  SolveConfig one;
  one.node_limit = 1;
  try {
    SolveMilp(m, one);
    ADD_FAILURE() << "expected no incumbent after one node";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTimeLimitNoIncumbent);
  }
  const std::vector<double> start = TreeToAssignment(CanonicalizeAnchors(GreedyTree(d, t)), m, d);
  const SolveResult r = SolveMilp(m, one, &start);
  EXPECT_EQ(r.status, SolveStatus::kFeasibleTimeLimit);
  EXPECT_GE(r.objective, m.ObjectiveValue(start));
  EXPECT_GE(r.best_bound, r.objective);
}

TEST(SolveMilp, InfeasibleModel) {
  // A one-category column cannot be split non-trivially.
  const EncodedDataset d = FromCsv("a,y\nx,p\nx,n\nx,p\n");
  BuildConfig b;
  b.forbid_trivial = true;
  const SolveResult r = SolveMilp(BuildModel(d, TreeTopology::Preset("depth2"), b), {});
  EXPECT_EQ(r.status, SolveStatus::kInfeasible);
  EXPECT_FALSE(r.has_incumbent());
}

TEST(SolveMilp, ConfigValidation) {
  SolveConfig c;
  c.time_limit = 0.0;
  EXPECT_THROW(c.Validate(), Error);
  c.time_limit = 1.0;
  c.integrality_tolerance = -1.0;
  EXPECT_THROW(c.Validate(), Error);
}

TEST(SolveMilp, ProgressLines) {
  std::vector<std::string> lines;
  SolveConfig c;
  c.progress = [&](const std::string& s) { lines.push_back(s); };
  SolveMilp(BuildModel(RandomInstance(3, 20).data, TreeTopology::Preset("depth2"), {}), c);
  ASSERT_FALSE(lines.empty());
  EXPECT_EQ(lines.back().rfind("node=", 0), 0u);
  for (const char* key : {" incumbent=", " bound=", " gap=", " time="}) {
    EXPECT_NE(lines.back().find(key), std::string::npos);
  }
}

}  // namespace
}  // namespace odt

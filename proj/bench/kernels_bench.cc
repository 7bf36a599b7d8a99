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

// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <memory>
#include <string>
#include <vector>

#include "odt/dataset.h"
#include "odt/experiments.h"
#include "odt/heuristic.h"
#include "odt/oracle.h"
#include "odt/topology.h"
#include "odt/tree.h"

namespace {

// Random categorical table; the label depends on the first two columns.
odt::EncodedDataset MakeData(int n, const std::vector<int>& sizes, uint64_t seed) {
  odt::Rng rng(seed);
  std::string text;
  for (size_t c = 0; c < sizes.size(); ++c) text += "c" + std::to_string(c) + ",";
  text += "y\n";
  for (int i = 0; i < n; ++i) {
    std::vector<uint64_t> v;
    for (int s : sizes) v.push_back(rng.Uniform(s));
    for (uint64_t x : v) text += "v" + std::to_string(x) + ",";
    const bool pos = (v[0] + v[1]) % 3 == 0 || rng.Uniform(10) == 0;
    text += pos ? "p\n" : "n\n";
  }
  odt::LabelOptions label;
  label.positive = "p";
  return odt::Encode(odt::ParseTable(text, odt::TableFormat::kCsv, label));
}

const odt::EncodedDataset& LargeData() {
  static const odt::EncodedDataset data = MakeData(200000, {4, 3, 4, 2, 3, 4, 3, 2}, 1);
  return data;
}

const odt::EncodedDataset& OracleData() {
  static const odt::EncodedDataset data = MakeData(400, {5, 4, 5, 4, 3}, 2);
  return data;
}

odt::DecisionTree BenchTree() {
  const odt::EncodedDataset& data = LargeData();
  return odt::GreedyTree(data.Subset(std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}),
                         odt::TreeTopology::Preset("depth3"));
}

void BM_EvaluateSerial(benchmark::State& state) {
  const odt::DecisionTree tree = BenchTree();
  for (auto _ : state) benchmark::DoNotOptimize(odt::EvaluateSerial(tree, LargeData()));
}
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond);

void BM_EvaluateParallel(benchmark::State& state) {
  const odt::DecisionTree tree = BenchTree();
  for (auto _ : state) benchmark::DoNotOptimize(odt::Evaluate(tree, LargeData()));
}
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond);

void BM_OracleSerial(benchmark::State& state) {
  const odt::TreeTopology topo = odt::TreeTopology::Preset("depth2");
  for (auto _ : state) {
    benchmark::DoNotOptimize(odt::EnumerateOptimalSerial(OracleData(), topo).objective);
  }
}
BENCHMARK(BM_OracleSerial)->Unit(benchmark::kMillisecond);

void BM_OracleParallel(benchmark::State& state) {
  const odt::TreeTopology topo = odt::TreeTopology::Preset("depth2");
  for (auto _ : state) {
    benchmark::DoNotOptimize(odt::EnumerateOptimal(OracleData(), topo).objective);
  }
}
BENCHMARK(BM_OracleParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

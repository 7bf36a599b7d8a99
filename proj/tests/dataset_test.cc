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

#include "odt/dataset.h"

#include <gtest/gtest.h>

#include <numeric>

#include "odt/errors.h"
#include "test_util.h"

namespace odt {
namespace {

using testing::DataPath;
using testing::FromCsv;

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kIoError;
}

TEST(ParseTable, LargerLabelIsPositiveByDefault) {
  const RawTable t = ParseTable("a,b,y\nx,1,yes\nz,2,no\nx,2,no\nz,1,yes\n", TableFormat::kCsv);
  EXPECT_EQ(t.num_rows(), 4u);
  EXPECT_EQ(t.num_columns(), 2u);
  EXPECT_EQ(t.positive_label, "yes");
  EXPECT_EQ(t.labels, (std::vector<int>{1, -1, -1, 1}));
}

TEST(ParseTable, ExplicitPositiveWins) {
  LabelOptions label;
  label.positive = "no";
  const RawTable t = ParseTable("a,y\nx,yes\nz,no\n", TableFormat::kCsv, label);
  EXPECT_EQ(t.labels, (std::vector<int>{-1, 1}));
}

TEST(ParseTable, LabelColumnByNameOrIndex) {
  LabelOptions by_name;
  by_name.column = "y";
  LabelOptions by_index;
  by_index.column = "0";
  const std::string text = "y,a\nt,x\nf,z\n";
  EXPECT_EQ(ParseTable(text, TableFormat::kCsv, by_name).column_names,
            std::vector<std::string>{"a"});
  EXPECT_EQ(ParseTable(text, TableFormat::kCsv, by_index).labels, (std::vector<int>{1, -1}));
}

TEST(ParseTable, QuotedFields) {
  const RawTable t = ParseTable("\"a,b\",y\n\"x \"\"q\"\"\",1\n\"z\",0\n", TableFormat::kCsv);
  EXPECT_EQ(t.column_names[0], "a,b");
  EXPECT_EQ(t.rows[0][0], "x \"q\"");
}

TEST(ParseTable, Errors) {
  EXPECT_EQ(CodeOf([] { ParseTable("a,b,c,y\n1,2,3,p\n1,2,p\n", TableFormat::kCsv); }),
            ErrorCode::kMalformedRow);
  EXPECT_EQ(CodeOf([] { ParseTable("a,y\n1,p\n2,q\n3,r\n", TableFormat::kCsv); }),
            ErrorCode::kNonBinaryLabel);
  EXPECT_EQ(CodeOf([] { ParseTable("a,y\n", TableFormat::kCsv); }), ErrorCode::kEmptyTable);
  EXPECT_EQ(CodeOf([] { ReadTableFile("/nonexistent/table.csv", TableFormat::kCsv); }),
            ErrorCode::kIoError);
}

TEST(ParseTable, MonksLayout) {
  const RawTable t = ParseTable(" 1 1 1 1 1 3 1 data_5\n 0 1 1 1 1 3 2 data_6\n", TableFormat::kMonks);
  EXPECT_EQ(t.num_columns(), 6u);
  EXPECT_EQ(t.labels, (std::vector<int>{1, -1}));
  EXPECT_EQ(t.column_names[0], "a1");
}

TEST(ParseTable, MonksFiles) {
  const RawTable t = ReadTableFile(DataPath("monks-1.txt"), TableFormat::kMonks);
  EXPECT_EQ(t.num_rows(), 432u);
  EXPECT_EQ(t.num_columns(), 6u);
  const GroupSchema s = BuildSchema(t);
  EXPECT_EQ(s.num_groups(), 6);
  EXPECT_EQ(s.num_features(), 17);
}

TEST(BuildSchema, LexicographicGroupsWithFirstAnchor) {
  const EncodedDataset d = FromCsv("colour,y\nred,p\nblue,n\nyellow,p\n");
  const GroupSchema& s = d.schema();
  ASSERT_EQ(s.num_groups(), 1);
  EXPECT_EQ(s.GroupSize(0), 3);
  EXPECT_EQ(s.feature(0).value, "blue");
  EXPECT_EQ(s.feature(1).value, "red");
  EXPECT_EQ(s.feature(2).value, "yellow");
  EXPECT_EQ(s.Anchor(0), 0);
  EXPECT_EQ(s.FindFeature(0, "red"), 1);
  EXPECT_EQ(s.FindFeature(0, "green"), -1);
}

TEST(BuildSchema, SingleCategoryColumn) {
  const EncodedDataset d = FromCsv("c,k,y\nx,a,p\nx,b,n\nx,a,n\n");
  EXPECT_EQ(d.schema().GroupSize(0), 1);
  for (int i = 0; i < d.num_samples(); ++i) EXPECT_EQ(d.Bit(i, 0), 1);
}

TEST(Encode, UnitVectorPerGroup) {
  const EncodedDataset d = FromCsv(
      "status,y\nsingle,p\nmarried,n\ndivorced,p\nwidowed,n\nseparated,p\nmarried,p\n");
  const int married = d.schema().FindFeature(0, "married");
  std::vector<uint8_t> expect(5, 0);
  expect[married] = 1;
  const auto row = d.Row(1);
  EXPECT_EQ(std::vector<uint8_t>(row.begin(), row.end()), expect);
}

TEST(Encode, OneHotAndIndexSets) {
  const EncodedDataset d = Encode(ReadTableFile(DataPath("tic-tac-toe.csv"), TableFormat::kCsv,
                                                {"Class", std::string("positive")}));
  EXPECT_EQ(d.num_samples(), 958);
  EXPECT_EQ(d.num_features(), 27);
  EXPECT_EQ(d.num_groups(), 9);
  for (int i = 0; i < d.num_samples(); ++i) {
    for (int g = 0; g < d.num_groups(); ++g) {
      int ones = 0;
      for (int j : d.schema().group(g).features) ones += d.Bit(i, j);
      ASSERT_EQ(ones, 1);
    }
  }
  std::vector<int> all = d.positive_indices();
  all.insert(all.end(), d.negative_indices().begin(), d.negative_indices().end());
  std::sort(all.begin(), all.end());
  std::vector<int> expect(d.num_samples());
  std::iota(expect.begin(), expect.end(), 0);
  EXPECT_EQ(all, expect);
}

TEST(Encode, UnseenCategory) {
  const RawTable train = ParseTable("a,y\nx,p\nz,n\n", TableFormat::kCsv);
  const RawTable test = ParseTable("a,y\nq,p\nz,n\n", TableFormat::kCsv);
  const auto schema = std::make_shared<const GroupSchema>(BuildSchema(train));
  EXPECT_EQ(CodeOf([&] { Encode(test, schema); }), ErrorCode::kUnknownCategory);
}

TEST(Encode, DecodeRoundTrip) {
  const RawTable t = ReadTableFile(DataPath("monks-2.txt"), TableFormat::kMonks);
  EXPECT_EQ(DecodeRows(Encode(t)), t.rows);
}

TEST(Encode, RejectsBrokenOneHot) {
  const auto schema = std::make_shared<const GroupSchema>(
      std::vector<FeatureGroup>{{"a", {0, 1}, 0}});
  EXPECT_EQ(CodeOf([&] { EncodedDataset(schema, {1, 1}, {1}); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { EncodedDataset(schema, {1, 0}, {0}); }), ErrorCode::kInvalidConfig);
}

TEST(Binarize, DoublesFeatures) {
  const EncodedDataset d = Encode(ReadTableFile(DataPath("tic-tac-toe.csv"), TableFormat::kCsv,
                                                {"Class", std::string("positive")}));
  const EncodedDataset b = BinarizeForSimpleBranching(d);
  EXPECT_EQ(b.num_features(), 54);
  EXPECT_EQ(b.num_groups(), 27);
  EXPECT_EQ(b.num_samples(), d.num_samples());
  EXPECT_EQ(b.labels(), d.labels());
  for (int j = 0; j < d.num_features(); ++j) {
    const FeatureGroup& g = b.schema().group(j);
    ASSERT_EQ(g.features.size(), 2u);
    EXPECT_EQ(g.anchor, g.features[0]);
    for (int i = 0; i < d.num_samples(); ++i) {
      ASSERT_EQ(b.Bit(i, g.features[0]), d.Bit(i, j));
      ASSERT_EQ(b.Bit(i, g.features[1]), 1 - d.Bit(i, j));
    }
  }
}

TEST(Dataset, SubsetKeepsSchema) {
  const EncodedDataset d = FromCsv("a,y\nx,p\nz,n\nx,n\n");
  const EncodedDataset s = d.Subset(std::vector<int>{2, 0});
  EXPECT_EQ(s.num_samples(), 2);
  EXPECT_EQ(s.schema_ptr(), d.schema_ptr());
  EXPECT_EQ(s.labels(), (std::vector<int>{-1, 1}));
  EXPECT_EQ(s.positive_indices(), std::vector<int>{1});
}

TEST(Dataset, JsonRoundTrip) {
  const EncodedDataset d = testing::RandomInstance(3, 30).data;
  const EncodedDataset back = DatasetFromJson(DatasetToJson(d));
  EXPECT_EQ(back.schema(), d.schema());
  EXPECT_EQ(back.bits(), d.bits());
  EXPECT_EQ(back.labels(), d.labels());
  EXPECT_EQ(SchemaFromJson(SchemaToJson(d.schema())), d.schema());
}

}  // namespace
}  // namespace odt

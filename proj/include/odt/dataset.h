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

// Categorical tables and their grouped one-hot encoding.
//
// A column with t distinct values becomes a group of t binary features, of
// which exactly one is set for every sample. Features are numbered
// 0..d-1 in (column order, lexicographic category value) order and the
// first feature of every group is its anchor.

#ifndef ODT_DATASET_H_
#define ODT_DATASET_H_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace odt {

enum class TableFormat { kCsv, kMonks };

TableFormat ParseTableFormat(std::string_view name);

struct LabelOptions {
  // Column name or 0-based index. Empty selects the format default: the
  // last column for CSV, the first for the monks layout.
  std::string column;
  // Raw label value mapped to +1. Without it the lexicographically larger
  // of the two values is positive.
  std::optional<std::string> positive;
};

struct RawTable {
  std::vector<std::string> column_names;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> labels;  // each -1 or +1
  std::string positive_label;
  std::string negative_label;

  size_t num_rows() const { return rows.size(); }
  size_t num_columns() const { return column_names.size(); }

  // Throws MalformedRow / NonBinaryLabel / EmptyTable on violations.
  void Validate() const;
};

RawTable ParseTable(std::string_view text, TableFormat format,
                    const LabelOptions& label = {});
RawTable ReadTableFile(const std::string& path, TableFormat format,
                       const LabelOptions& label = {});

struct Feature {
  int id = 0;
  int group = 0;
  std::string value;
};

struct FeatureGroup {
  std::string column;
  std::vector<int> features;  // contiguous ids in category order
  int anchor = 0;
};

class GroupSchema {
 public:
  GroupSchema() = default;
  explicit GroupSchema(std::vector<FeatureGroup> groups);

  int num_features() const { return static_cast<int>(features_.size()); }
  int num_groups() const { return static_cast<int>(groups_.size()); }
  const FeatureGroup& group(int g) const { return groups_[g]; }
  const Feature& feature(int j) const { return features_[j]; }
  const std::vector<FeatureGroup>& groups() const { return groups_; }
  int GroupOf(int j) const { return features_[j].group; }
  int Anchor(int g) const { return groups_[g].anchor; }
  int GroupSize(int g) const {
    return static_cast<int>(groups_[g].features.size());
  }

  // Feature id carrying `value` in group g, or -1.
  int FindFeature(int g, std::string_view value) const;

  friend bool operator==(const GroupSchema& a, const GroupSchema& b);

 private:
  friend struct SchemaBuilder;

  std::vector<FeatureGroup> groups_;
  std::vector<Feature> features_;
  std::vector<std::map<std::string, int, std::less<>>> lookup_;
};

class EncodedDataset {
 public:
  EncodedDataset() = default;
  // `bits` is row-major N x d. Throws InvalidConfig if a sample violates the
  // one-hot-per-group property or a label is not +-1.
  EncodedDataset(std::shared_ptr<const GroupSchema> schema,
                 std::vector<uint8_t> bits, std::vector<int> labels);

  int num_samples() const { return static_cast<int>(labels_.size()); }
  int num_features() const { return schema_->num_features(); }
  int num_groups() const { return schema_->num_groups(); }

  const GroupSchema& schema() const { return *schema_; }
  const std::shared_ptr<const GroupSchema>& schema_ptr() const {
    return schema_;
  }

  std::span<const uint8_t> Row(int i) const {
    return {bits_.data() + static_cast<size_t>(i) * num_features(),
            static_cast<size_t>(num_features())};
  }
  uint8_t Bit(int i, int j) const {
    return bits_[static_cast<size_t>(i) * num_features() + j];
  }
  int Label(int i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<uint8_t>& bits() const { return bits_; }

  // The feature of group g that is set for sample i.
  int ActiveFeature(int i, int g) const {
    return active_[static_cast<size_t>(i) * num_groups() + g];
  }

  const std::vector<int>& positive_indices() const { return positives_; }
  const std::vector<int>& negative_indices() const { return negatives_; }

  EncodedDataset Subset(std::span<const int> indices) const;

 private:
  std::shared_ptr<const GroupSchema> schema_ =
      std::make_shared<GroupSchema>();
  std::vector<uint8_t> bits_;
  std::vector<int> labels_;
  std::vector<int> active_;
  std::vector<int> positives_;
  std::vector<int> negatives_;
};

GroupSchema BuildSchema(const RawTable& table);

// Throws UnknownCategory when a cell value is missing from the schema.
EncodedDataset Encode(const RawTable& table,
                      std::shared_ptr<const GroupSchema> schema);
EncodedDataset Encode(const RawTable& table);

// Argmax per group; inverse of Encode on the feature columns.
std::vector<std::vector<std::string>> DecodeRows(const EncodedDataset& data);

// Replaces every feature j by a two-member group (bit_j, not bit_j), so a
// combinatorial split on the result is a split on one original feature.
EncodedDataset BinarizeForSimpleBranching(const EncodedDataset& data);

nlohmann::json SchemaToJson(const GroupSchema& schema);
GroupSchema SchemaFromJson(const nlohmann::json& json);
nlohmann::json DatasetToJson(const EncodedDataset& data);
EncodedDataset DatasetFromJson(const nlohmann::json& json);

}  // namespace odt

#endif  // ODT_DATASET_H_

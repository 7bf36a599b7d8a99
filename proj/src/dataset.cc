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

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "odt/errors.h"

namespace odt {
namespace {

using Records = std::vector<std::vector<std::string>>;

// RFC 4180: quoted fields may contain separators, doubled quotes and line
// breaks. Returns records with their 1-based starting line numbers.
Records ParseCsvRecords(std::string_view text, std::vector<int>* lines) {
  Records records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  int line = 1;
  int record_line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) {
      records.push_back(std::move(record));
      lines->push_back(record_line);
    }
    record.clear();
  };

  for (size_t pos = 0; pos < text.size(); ++pos) {
    const char ch = text[pos];
    if (in_quotes) {
      if (ch == '"') {
        if (pos + 1 < text.size() && text[pos + 1] == '"') {
          field.push_back('"');
          ++pos;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started || !field.empty()) {
          throw Error(ErrorCode::kParseError,
                      "stray quote on line " + std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        record_line = line;
        break;
      default:
        field.push_back(ch);
    }
  }
  if (in_quotes) {
    throw Error(ErrorCode::kParseError, "unterminated quoted field");
  }
  if (!field.empty() || field_started || !record.empty()) end_record();
  return records;
}

Records ParseMonksRecords(std::string_view text, std::vector<int>* lines) {
  Records records;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::istringstream tokens(raw);
    std::vector<std::string> record;
    for (std::string token; tokens >> token;) record.push_back(token);
    if (record.empty()) continue;
    records.push_back(std::move(record));
    lines->push_back(line);
  }
  return records;
}

std::optional<long long> AsInteger(const std::string& text) {
  long long value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

// True when a should be ordered after b for the default +1 choice.
bool LabelGreater(const std::string& a, const std::string& b) {
  auto ia = AsInteger(a);
  auto ib = AsInteger(b);
  if (ia && ib) return *ia > *ib;
  return a > b;
}

int ResolveLabelColumn(const std::vector<std::string>& header,
                       const std::string& column, int fallback) {
  if (column.empty()) return fallback;
  for (size_t c = 0; c < header.size(); ++c) {
    if (header[c] == column) return static_cast<int>(c);
  }
  if (auto index = AsInteger(column);
      index && *index >= 0 && *index < static_cast<long long>(header.size())) {
    return static_cast<int>(*index);
  }
  throw Error(ErrorCode::kInvalidConfig,
              "label column '" + column + "' not found");
}

}  // namespace

TableFormat ParseTableFormat(std::string_view name) {
  if (name == "csv") return TableFormat::kCsv;
  if (name == "monks") return TableFormat::kMonks;
  throw Error(ErrorCode::kInvalidConfig,
              "unknown table format '" + std::string(name) + "'");
}

void RawTable::Validate() const {
  if (rows.empty() || column_names.empty()) {
    throw Error(ErrorCode::kEmptyTable, "table has no data");
  }
  if (labels.size() != rows.size()) {
    throw Error(ErrorCode::kMalformedRow, "label count differs from rows");
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != column_names.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "row " + std::to_string(r) + " has " +
                      std::to_string(rows[r].size()) + " fields, expected " +
                      std::to_string(column_names.size()));
    }
    if (labels[r] != 1 && labels[r] != -1) {
      throw Error(ErrorCode::kNonBinaryLabel,
                  "row " + std::to_string(r) + " label is not +-1");
    }
  }
}

RawTable ParseTable(std::string_view text, TableFormat format,
                    const LabelOptions& label) {
  std::vector<int> lines;
  std::vector<std::string> header;
  Records records;
  int default_label = 0;
  if (format == TableFormat::kCsv) {
    records = ParseCsvRecords(text, &lines);
    if (records.empty()) throw Error(ErrorCode::kEmptyTable, "no header row");
    header = std::move(records.front());
    records.erase(records.begin());
    lines.erase(lines.begin());
    default_label = static_cast<int>(header.size()) - 1;
  } else {
    records = ParseMonksRecords(text, &lines);
    if (records.empty()) throw Error(ErrorCode::kEmptyTable, "no rows");
    const size_t width = records.front().size();
    if (width < 3) {
      throw Error(ErrorCode::kMalformedRow,
                  "monks rows need a label, attributes and an identifier");
    }
    header.push_back("class");
    for (size_t c = 1; c + 1 < width; ++c) {
      header.push_back("a" + std::to_string(c));
    }
    header.push_back("id");
  }
  if (records.empty()) throw Error(ErrorCode::kEmptyTable, "no data rows");

  for (size_t r = 0; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      throw Error(ErrorCode::kMalformedRow,
                  "line " + std::to_string(lines[r]) + " has " +
                      std::to_string(records[r].size()) +
                      " fields, expected " + std::to_string(header.size()));
    }
  }

  const int label_col = ResolveLabelColumn(header, label.column,
                                           default_label);
  std::set<std::string> distinct;
  for (const auto& record : records) distinct.insert(record[label_col]);
  if (distinct.size() > 2) {
    throw Error(ErrorCode::kNonBinaryLabel,
                std::to_string(distinct.size()) + " distinct label values");
  }
  std::vector<std::string> values(distinct.begin(), distinct.end());
  std::sort(values.begin(), values.end(), LabelGreater);  // largest first

  RawTable table;
  if (label.positive) {
    if (!distinct.count(*label.positive) && distinct.size() == 2) {
      throw Error(ErrorCode::kInvalidConfig,
                  "positive label '" + *label.positive + "' not present");
    }
    table.positive_label = *label.positive;
    for (const auto& v : values) {
      if (v != *label.positive) table.negative_label = v;
    }
  } else {
    table.positive_label = values[0];
    if (values.size() > 1) table.negative_label = values[1];
  }

  for (size_t c = 0; c < header.size(); ++c) {
    if (static_cast<int>(c) == label_col) continue;
    if (format == TableFormat::kMonks && c + 1 == header.size()) continue;
    table.column_names.push_back(header[c]);
  }
  if (table.column_names.empty()) {
    throw Error(ErrorCode::kEmptyTable, "no attribute columns");
  }
  for (auto& record : records) {
    std::vector<std::string> row;
    row.reserve(table.column_names.size());
    for (size_t c = 0; c < record.size(); ++c) {
      if (static_cast<int>(c) == label_col) continue;
      if (format == TableFormat::kMonks && c + 1 == record.size()) continue;
      row.push_back(std::move(record[c]));
    }
    table.labels.push_back(record[label_col] == table.positive_label ? 1 : -1);
    table.rows.push_back(std::move(row));
  }
  table.Validate();
  return table;
}

RawTable ReadTableFile(const std::string& path, TableFormat format,
                       const LabelOptions& label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseTable(buffer.str(), format, label);
}

GroupSchema::GroupSchema(std::vector<FeatureGroup> groups)
    : groups_(std::move(groups)) {
  lookup_.resize(groups_.size());
  for (size_t g = 0; g < groups_.size(); ++g) {
    const FeatureGroup& group = groups_[g];
    if (group.features.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "group '" + group.column + "' has no features");
    }
    if (std::find(group.features.begin(), group.features.end(),
                  group.anchor) == group.features.end()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "anchor of group '" + group.column + "' is not a member");
    }
    for (int id : group.features) {
      if (id != static_cast<int>(features_.size())) {
        throw Error(ErrorCode::kInvalidConfig,
                    "feature ids must be contiguous in group order");
      }
      features_.push_back(Feature{id, static_cast<int>(g), ""});
    }
  }
}

int GroupSchema::FindFeature(int g, std::string_view value) const {
  const auto& table = lookup_[g];
  auto it = table.find(value);
  return it == table.end() ? -1 : it->second;
}

bool operator==(const GroupSchema& a, const GroupSchema& b) {
  if (a.groups_.size() != b.groups_.size() ||
      a.features_.size() != b.features_.size()) {
    return false;
  }
  for (size_t g = 0; g < a.groups_.size(); ++g) {
    if (a.groups_[g].column != b.groups_[g].column ||
        a.groups_[g].features != b.groups_[g].features ||
        a.groups_[g].anchor != b.groups_[g].anchor) {
      return false;
    }
  }
  for (size_t j = 0; j < a.features_.size(); ++j) {
    if (a.features_[j].value != b.features_[j].value) return false;
  }
  return true;
}

namespace {

// Builds a schema from per-group value lists given in feature order; the
// first value of each group becomes its anchor.
GroupSchema MakeSchema(
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        columns) {
  std::vector<FeatureGroup> groups;
  int next = 0;
  for (const auto& [name, values] : columns) {
    FeatureGroup group;
    group.column = name;
    group.anchor = next;
    for (size_t v = 0; v < values.size(); ++v) group.features.push_back(next++);
    groups.push_back(std::move(group));
  }
  return GroupSchema(std::move(groups));
}

}  // namespace

// Values are attached after construction so the constructor stays focused on
// id/anchor structure.
struct SchemaBuilder {
  static GroupSchema Build(
      const std::vector<std::pair<std::string, std::vector<std::string>>>&
          columns) {
    GroupSchema schema = MakeSchema(columns);
    schema.lookup_.resize(columns.size());
    for (size_t g = 0; g < columns.size(); ++g) {
      const auto& values = columns[g].second;
      for (size_t v = 0; v < values.size(); ++v) {
        const int id = schema.groups_[g].features[v];
        schema.features_[id].value = values[v];
        if (!schema.lookup_[g].emplace(values[v], id).second) {
          throw Error(ErrorCode::kInvalidConfig,
                      "duplicate category '" + values[v] + "' in group '" +
                          columns[g].first + "'");
        }
      }
    }
    return schema;
  }
};

GroupSchema BuildSchema(const RawTable& table) {
  table.Validate();
  std::vector<std::pair<std::string, std::vector<std::string>>> columns;
  for (size_t c = 0; c < table.num_columns(); ++c) {
    std::set<std::string> distinct;
    for (const auto& row : table.rows) distinct.insert(row[c]);
    columns.emplace_back(table.column_names[c],
                         std::vector<std::string>(distinct.begin(),
                                                  distinct.end()));
  }
  return SchemaBuilder::Build(columns);
}

EncodedDataset::EncodedDataset(std::shared_ptr<const GroupSchema> schema,
                               std::vector<uint8_t> bits,
                               std::vector<int> labels)
    : schema_(std::move(schema)),
      bits_(std::move(bits)),
      labels_(std::move(labels)) {
  const int d = schema_->num_features();
  const int groups = schema_->num_groups();
  if (bits_.size() != labels_.size() * static_cast<size_t>(d)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "bit matrix size does not match N x d");
  }
  active_.assign(labels_.size() * static_cast<size_t>(groups), -1);
  for (int i = 0; i < num_samples(); ++i) {
    if (labels_[i] == 1) {
      positives_.push_back(i);
    } else if (labels_[i] == -1) {
      negatives_.push_back(i);
    } else {
      throw Error(ErrorCode::kInvalidConfig,
                  "sample " + std::to_string(i) + " label is not +-1");
    }
    for (int g = 0; g < groups; ++g) {
      int count = 0;
      for (int j : schema_->group(g).features) {
        if (Bit(i, j) > 1) {
          throw Error(ErrorCode::kInvalidConfig, "bit value must be 0 or 1");
        }
        if (Bit(i, j)) {
          ++count;
          active_[static_cast<size_t>(i) * groups + g] = j;
        }
      }
      if (count != 1) {
        throw Error(ErrorCode::kInvalidConfig,
                    "sample " + std::to_string(i) + " is not one-hot in group '" +
                        schema_->group(g).column + "'");
      }
    }
  }
}

EncodedDataset EncodedDataset::Subset(std::span<const int> indices) const {
  const size_t d = num_features();
  std::vector<uint8_t> bits;
  bits.reserve(indices.size() * d);
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= num_samples()) {
      throw Error(ErrorCode::kDimensionMismatch, "subset index out of range");
    }
    auto row = Row(i);
    bits.insert(bits.end(), row.begin(), row.end());
    labels.push_back(labels_[i]);
  }
  return EncodedDataset(schema_, std::move(bits), std::move(labels));
}

EncodedDataset Encode(const RawTable& table,
                      std::shared_ptr<const GroupSchema> schema) {
  table.Validate();
  if (static_cast<size_t>(schema->num_groups()) != table.num_columns()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "schema has " + std::to_string(schema->num_groups()) +
                    " groups, table has " +
                    std::to_string(table.num_columns()) + " columns");
  }
  const size_t d = schema->num_features();
  std::vector<uint8_t> bits(table.num_rows() * d, 0);
  for (size_t r = 0; r < table.num_rows(); ++r) {
    for (size_t c = 0; c < table.num_columns(); ++c) {
      const int j = schema->FindFeature(static_cast<int>(c), table.rows[r][c]);
      if (j < 0) {
        throw Error(ErrorCode::kUnknownCategory,
                    "row " + std::to_string(r) + " column '" +
                        table.column_names[c] + "' value '" +
                        table.rows[r][c] + "'");
      }
      bits[r * d + j] = 1;
    }
  }
  return EncodedDataset(std::move(schema), std::move(bits), table.labels);
}

EncodedDataset Encode(const RawTable& table) {
  return Encode(table, std::make_shared<GroupSchema>(BuildSchema(table)));
}

std::vector<std::vector<std::string>> DecodeRows(const EncodedDataset& data) {
  std::vector<std::vector<std::string>> rows(data.num_samples());
  for (int i = 0; i < data.num_samples(); ++i) {
    for (int g = 0; g < data.num_groups(); ++g) {
      rows[i].push_back(data.schema().feature(data.ActiveFeature(i, g)).value);
    }
  }
  return rows;
}

EncodedDataset BinarizeForSimpleBranching(const EncodedDataset& data) {
  const GroupSchema& schema = data.schema();
  std::vector<std::pair<std::string, std::vector<std::string>>> columns;
  for (int j = 0; j < schema.num_features(); ++j) {
    const Feature& f = schema.feature(j);
    columns.emplace_back(schema.group(f.group).column + "=" + f.value,
                         std::vector<std::string>{"yes", "no"});
  }
  auto binary = std::make_shared<GroupSchema>(SchemaBuilder::Build(columns));
  const int d = schema.num_features();
  std::vector<uint8_t> bits(static_cast<size_t>(data.num_samples()) * 2 * d);
  for (int i = 0; i < data.num_samples(); ++i) {
    for (int j = 0; j < d; ++j) {
      const uint8_t bit = data.Bit(i, j);
      bits[static_cast<size_t>(i) * 2 * d + 2 * j] = bit;
      bits[static_cast<size_t>(i) * 2 * d + 2 * j + 1] = 1 - bit;
    }
  }
  return EncodedDataset(std::move(binary), std::move(bits), data.labels());
}

nlohmann::json SchemaToJson(const GroupSchema& schema) {
  nlohmann::json groups = nlohmann::json::array();
  for (const FeatureGroup& group : schema.groups()) {
    nlohmann::json features = nlohmann::json::array();
    for (int id : group.features) {
      features.push_back({{"id", id}, {"value", schema.feature(id).value}});
    }
    groups.push_back({{"column", group.column},
                      {"anchor", group.anchor},
                      {"features", std::move(features)}});
  }
  return {{"groups", std::move(groups)}};
}

GroupSchema SchemaFromJson(const nlohmann::json& json) {
  std::vector<std::pair<std::string, std::vector<std::string>>> columns;
  int next = 0;
  for (const auto& group : json.at("groups")) {
    std::vector<std::string> values;
    for (const auto& feature : group.at("features")) {
      if (feature.at("id").get<int>() != next++) {
        throw Error(ErrorCode::kParseError, "feature ids are not contiguous");
      }
      values.push_back(feature.at("value").get<std::string>());
    }
    if (!values.empty() &&
        group.at("anchor").get<int>() != next - static_cast<int>(values.size())) {
      throw Error(ErrorCode::kParseError,
                  "anchor must be the first feature of its group");
    }
    columns.emplace_back(group.at("column").get<std::string>(),
                         std::move(values));
  }
  return SchemaBuilder::Build(columns);
}

nlohmann::json DatasetToJson(const EncodedDataset& data) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < data.num_samples(); ++i) {
    auto row = data.Row(i);
    rows.push_back(std::vector<int>(row.begin(), row.end()));
  }
  return {{"format", "odt-encoded-dataset"},
          {"version", 1},
          {"num_samples", data.num_samples()},
          {"num_features", data.num_features()},
          {"num_groups", data.num_groups()},
          {"schema", SchemaToJson(data.schema())},
          {"rows", std::move(rows)},
          {"labels", data.labels()}};
}

EncodedDataset DatasetFromJson(const nlohmann::json& json) {
  auto schema = std::make_shared<GroupSchema>(SchemaFromJson(json.at("schema")));
  std::vector<uint8_t> bits;
  for (const auto& row : json.at("rows")) {
    if (row.size() != static_cast<size_t>(schema->num_features())) {
      throw Error(ErrorCode::kDimensionMismatch, "row width differs from d");
    }
    for (const auto& bit : row) bits.push_back(bit.get<uint8_t>());
  }
  return EncodedDataset(std::move(schema), std::move(bits),
                        json.at("labels").get<std::vector<int>>());
}

}  // namespace odt

/*
 * Copyright 2026 The driftbench Authors.
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

#include "driftbench/data.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

namespace driftbench {
namespace {

constexpr std::string_view kLabelToken = "label";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(fmt::format("{}: cannot open file", path.string()));
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError(fmt::format("{}: cannot open file for writing", path.string()));
  return out;
}

void check_writable_cell(const std::string& cell, std::string_view column) {
  if (cell.find_first_of(",\n") != std::string::npos) {
    throw std::invalid_argument(
        fmt::format("cell in column '{}' contains a separator: '{}'", column, cell));
  }
}

}  // namespace

std::string_view to_token(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Numerical: return "num";
    case FeatureKind::Categorical: return "cat";
    case FeatureKind::MultiValuedCategorical: return "mvc";
    case FeatureKind::Time: return "time";
  }
  return "?";
}

std::optional<FeatureKind> kind_from_token(std::string_view token) {
  if (token == "num") return FeatureKind::Numerical;
  if (token == "cat") return FeatureKind::Categorical;
  if (token == "mvc") return FeatureKind::MultiValuedCategorical;
  if (token == "time") return FeatureKind::Time;
  return std::nullopt;
}

FeatureSchema::FeatureSchema(std::vector<Column> columns, std::string label)
    : columns_(std::move(columns)), label_(std::move(label)) {
  if (label_.empty()) throw std::invalid_argument("schema: empty label column name");
  std::set<std::string_view> seen;
  for (const auto& column : columns_) {
    if (column.name.empty()) throw std::invalid_argument("schema: empty column name");
    if (column.name == label_) {
      throw std::invalid_argument(
          fmt::format("schema: label column '{}' listed as a feature", label_));
    }
    if (!seen.insert(column.name).second) {
      throw std::invalid_argument(fmt::format("schema: duplicate column '{}'", column.name));
    }
  }
}

std::optional<std::size_t> FeatureSchema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t FeatureSchema::count(FeatureKind kind) const {
  return static_cast<std::size_t>(std::count_if(
      columns_.begin(), columns_.end(), [kind](const Column& c) { return c.kind == kind; }));
}

void ChronoDataset::validate() const {
  if (!labels.empty() && labels.size() != rows.size()) {
    throw std::invalid_argument(
        fmt::format("dataset '{}': {} rows but {} labels", provenance, rows.size(), labels.size()));
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.size()) {
      throw std::invalid_argument(fmt::format("dataset '{}': row {} has {} cells, expected {}",
                                              provenance, r, rows[r].size(), schema.size()));
    }
  }
  for (std::size_t r = 0; r < labels.size(); ++r) {
    if (labels[r] != 0 && labels[r] != 1) {
      throw std::invalid_argument(
          fmt::format("dataset '{}': row {} has non-binary label {}", provenance, r, labels[r]));
    }
  }
}

BlockPlan::BlockPlan(std::vector<RowRange> blocks) : blocks_(std::move(blocks)) {
  std::size_t expected_begin = 0;
  for (const auto& block : blocks_) {
    if (block.begin != expected_begin || block.end <= block.begin) {
      throw PlanError(fmt::format("block plan: range [{}, {}) is empty or not contiguous",
                                  block.begin, block.end));
    }
    expected_begin = block.end;
  }
}

BlockPlan split_blocks(std::size_t row_count, std::size_t block_count) {
  if (block_count < 2) {
    throw PlanError(fmt::format("block plan: need at least 2 blocks, got {}", block_count));
  }
  if (block_count > row_count) {
    throw PlanError(
        fmt::format("block plan: {} blocks requested for only {} rows", block_count, row_count));
  }
  const std::size_t base = row_count / block_count;
  const std::size_t extra = row_count % block_count;
  std::vector<RowRange> blocks;
  blocks.reserve(block_count);
  std::size_t begin = 0;
  for (std::size_t b = 0; b < block_count; ++b) {
    const std::size_t size = base + (b < extra ? 1 : 0);
    blocks.push_back({begin, begin + size});
    begin += size;
  }
  return BlockPlan(std::move(blocks));
}

BlockPlan split_blocks(const ChronoDataset& dataset, std::size_t block_count) {
  return split_blocks(dataset.size(), block_count);
}

FeatureSchema load_schema(const std::filesystem::path& schema_path) {
  auto in = open_input(schema_path);
  std::vector<Column> columns;
  std::optional<std::string> label;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw LoadError(fmt::format("{}: line {}: expected 'name,kind', got '{}'",
                                  schema_path.string(), line_no, line));
    }
    if (fields[1] == kLabelToken) {
      if (label) {
        throw LoadError(fmt::format("{}: line {}: second label column '{}'", schema_path.string(),
                                    line_no, fields[0]));
      }
      label = fields[0];
      continue;
    }
    const auto kind = kind_from_token(fields[1]);
    if (!kind) {
      throw LoadError(fmt::format("{}: line {}: unknown kind '{}' for column '{}'",
                                  schema_path.string(), line_no, fields[1], fields[0]));
    }
    columns.push_back({fields[0], *kind});
  }
  if (!label) throw LoadError(fmt::format("{}: no label column declared", schema_path.string()));
  try {
    return FeatureSchema(std::move(columns), *label);
  } catch (const std::invalid_argument& e) {
    throw LoadError(fmt::format("{}: {}", schema_path.string(), e.what()));
  }
}

ChronoDataset load_dataset(const std::filesystem::path& data_path,
                           const std::filesystem::path& schema_path, LabelColumn label) {
  ChronoDataset dataset;
  dataset.schema = load_schema(schema_path);
  dataset.provenance = data_path.string();
  const auto& schema = dataset.schema;

  auto in = open_input(data_path);
  std::string line;
  if (!std::getline(in, line)) {
    throw LoadError(fmt::format("{}: missing header line", data_path.string()));
  }
  const auto header = split_fields(line);

  // Position in the file of each schema column, and of the label.
  constexpr auto kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> source(schema.size(), kUnset);
  std::size_t label_source = kUnset;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == schema.label()) {
      label_source = i;
      continue;
    }
    const auto index = schema.index_of(header[i]);
    if (!index) {
      throw LoadError(fmt::format("{}: column '{}' is not declared in {}", data_path.string(),
                                  header[i], schema_path.string()));
    }
    if (source[*index] != kUnset) {
      throw LoadError(fmt::format("{}: duplicate column '{}'", data_path.string(), header[i]));
    }
    source[*index] = i;
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (source[c] == kUnset) {
      throw LoadError(
          fmt::format("{}: missing column '{}'", data_path.string(), schema[c].name));
    }
  }
  if (label == LabelColumn::Required && label_source == kUnset) {
    throw LoadError(
        fmt::format("{}: missing label column '{}'", data_path.string(), schema.label()));
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t row_index = dataset.rows.size();
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw LoadError(fmt::format("{}: line {} (row {}): {} fields, header has {}",
                                  data_path.string(), line_no, row_index, fields.size(),
                                  header.size()));
    }
    Row row(schema.size());
    for (std::size_t c = 0; c < schema.size(); ++c) row[c] = std::move(fields[source[c]]);
    dataset.rows.push_back(std::move(row));
    if (label == LabelColumn::Required) {
      const auto& cell = fields[label_source];
      if (cell != "0" && cell != "1") {
        throw LoadError(fmt::format("{}: line {} (row {}): label column '{}' has value '{}', "
                                    "expected 0 or 1",
                                    data_path.string(), line_no, row_index, schema.label(),
                                    cell));
      }
      dataset.labels.push_back(cell == "1" ? 1 : 0);
    }
  }
  return dataset;
}

void write_schema(const FeatureSchema& schema, const std::filesystem::path& schema_path) {
  auto out = open_output(schema_path);
  for (const auto& column : schema.columns()) {
    out << column.name << ',' << to_token(column.kind) << '\n';
  }
  out << schema.label() << ',' << kLabelToken << '\n';
}

void write_rows(const FeatureSchema& schema, std::span<const Row> rows,
                std::span<const Label> labels, const std::filesystem::path& data_path) {
  const bool with_label = !labels.empty();
  if (with_label && labels.size() != rows.size()) {
    throw std::invalid_argument(
        fmt::format("write_rows: {} rows but {} labels", rows.size(), labels.size()));
  }
  auto out = open_output(data_path);
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c > 0) out << ',';
    out << schema[c].name;
  }
  if (with_label) out << (schema.size() > 0 ? "," : "") << schema.label();
  out << '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != schema.size()) {
      throw std::invalid_argument(fmt::format("write_rows: row {} has {} cells, expected {}", r,
                                              row.size(), schema.size()));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      check_writable_cell(row[c], schema[c].name);
      if (c > 0) out << ',';
      out << row[c];
    }
    if (with_label) out << (row.empty() ? "" : ",") << static_cast<int>(labels[r]);
    out << '\n';
  }
  if (!out) throw LoadError(fmt::format("{}: write failed", data_path.string()));
}

void write_dataset(const ChronoDataset& dataset, RowRange range,
                   const std::filesystem::path& data_path, LabelColumn label) {
  if (range.end > dataset.size() || range.begin > range.end) {
    throw std::out_of_range(fmt::format("write_dataset: range [{}, {}) outside {} rows",
                                        range.begin, range.end, dataset.size()));
  }
  std::span<const Label> labels;
  if (label == LabelColumn::Required) {
    if (dataset.labels.size() != dataset.size()) {
      throw std::invalid_argument("write_dataset: dataset is unlabeled");
    }
    labels = {dataset.labels.data() + range.begin, range.size()};
  }
  write_rows(dataset.schema, {dataset.rows.data() + range.begin, range.size()}, labels,
             data_path);
}

void write_dataset(const ChronoDataset& dataset, const std::filesystem::path& data_path,
                   const std::filesystem::path& schema_path) {
  write_schema(dataset.schema, schema_path);
  write_dataset(dataset, RowRange{0, dataset.size()}, data_path, LabelColumn::Required);
}

}  // namespace driftbench

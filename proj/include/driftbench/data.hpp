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

// Tabular stream data model: schemas, time-ordered datasets, block plans,
// the on-disk text format and the synthetic drifting-stream generator.

#ifndef DRIFTBENCH_DATA_HPP_
#define DRIFTBENCH_DATA_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace driftbench {

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class FeatureKind { Numerical, Categorical, MultiValuedCategorical, Time };

// Schema-file tokens: num, cat, mvc, time.
std::string_view to_token(FeatureKind kind);
std::optional<FeatureKind> kind_from_token(std::string_view token);

// Separator between tokens of a multi-valued categorical cell.
inline constexpr char kMvcSeparator = '|';

struct Column {
  std::string name;
  FeatureKind kind;

  bool operator==(const Column&) const = default;
};

// Ordered feature columns plus the name of the label column. Column names
// are unique and never equal the label name.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  FeatureSchema(std::vector<Column> columns, std::string label);

  const std::vector<Column>& columns() const { return columns_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return columns_.size(); }
  const Column& operator[](std::size_t i) const { return columns_[i]; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  std::size_t count(FeatureKind kind) const;

  bool operator==(const FeatureSchema&) const = default;

 private:
  std::vector<Column> columns_;
  std::string label_;
};

using Row = std::vector<std::string>;
using Label = std::int8_t;

// Time-ordered rows with binary labels. Rows are never reordered.
struct ChronoDataset {
  FeatureSchema schema;
  std::vector<Row> rows;
  std::vector<Label> labels;
  std::string provenance;

  std::size_t size() const { return rows.size(); }

  // Throws std::invalid_argument when the row/label counts, row widths or
  // label values are inconsistent.
  void validate() const;

  bool operator==(const ChronoDataset&) const = default;
};

struct RowRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const RowRange&) const = default;
};

// Contiguous, ascending, non-empty half-open ranges covering [0, rows).
class BlockPlan {
 public:
  explicit BlockPlan(std::vector<RowRange> blocks);

  std::size_t block_count() const { return blocks_.size(); }
  const RowRange& operator[](std::size_t i) const { return blocks_[i]; }
  const std::vector<RowRange>& blocks() const { return blocks_; }
  std::size_t row_count() const { return blocks_.empty() ? 0 : blocks_.back().end; }

 private:
  std::vector<RowRange> blocks_;
};

inline constexpr std::size_t kDefaultBlockCount = 10;

// Splits `row_count` rows into `block_count` chronological blocks whose
// sizes differ by at most one; the first (row_count % block_count) blocks
// take the extra row. Requires 2 <= block_count <= row_count.
BlockPlan split_blocks(std::size_t row_count, std::size_t block_count);
BlockPlan split_blocks(const ChronoDataset& dataset, std::size_t block_count);

// ---------------------------------------------------------------------------
// Text format.
//
// Data file: comma-separated, header line first, one row per line, "\n"
// terminated. Multi-valued cells join their tokens with '|'. An empty cell
// is a missing value. Cells cannot contain ',' or '\n' (no quoting).
//
// Schema file: one "name,kind" line per column, kind in
// {num, cat, mvc, time, label}. Feature order follows the schema file.
// ---------------------------------------------------------------------------

enum class LabelColumn { Required, Absent };

ChronoDataset load_dataset(const std::filesystem::path& data_path,
                           const std::filesystem::path& schema_path,
                           LabelColumn label = LabelColumn::Required);

FeatureSchema load_schema(const std::filesystem::path& schema_path);

void write_schema(const FeatureSchema& schema,
                  const std::filesystem::path& schema_path);

// Writes rows [range) of the dataset. With LabelColumn::Absent the label
// column is dropped (the unlabeled test-file layout).
void write_dataset(const ChronoDataset& dataset, RowRange range,
                   const std::filesystem::path& data_path,
                   LabelColumn label = LabelColumn::Required);
void write_dataset(const ChronoDataset& dataset,
                   const std::filesystem::path& data_path,
                   const std::filesystem::path& schema_path);

// Writes a data file from a span of rows. Empty `labels` drops the label
// column; otherwise there must be one label per row.
void write_rows(const FeatureSchema& schema, std::span<const Row> rows,
                std::span<const Label> labels, const std::filesystem::path& data_path);

// ---------------------------------------------------------------------------
// Synthetic drifting streams.
// ---------------------------------------------------------------------------

enum class DriftProfile { None, Gradual, Abrupt };

std::string_view to_string(DriftProfile profile);
std::optional<DriftProfile> drift_profile_from_string(std::string_view name);

struct DriftGenSpec {
  std::size_t rows = 10000;
  std::size_t categorical = 0;
  std::size_t numerical = 4;
  std::size_t multi_valued = 0;
  std::size_t time = 0;
  std::size_t blocks = kDefaultBlockCount;
  DriftProfile drift = DriftProfile::None;
  double magnitude = 0.0;
  // Distinct values per categorical / multi-valued column.
  std::size_t cardinality = 100;
  // Category frequency at rank r is proportional to r^-exponent.
  double exponent = 1.0;
  // Scale of the latent logit; larger means cleaner labels.
  double signal = 3.0;
  std::uint64_t seed = 0;

  std::size_t feature_count() const {
    return categorical + numerical + multi_valued + time;
  }
  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

// Deterministic for a given spec. Labels come from a logistic latent score
// over numeric features and per-category effects; the latent parameters move
// linearly across blocks (Gradual) or switch at the middle block (Abrupt).
ChronoDataset generate_drift_stream(const DriftGenSpec& spec);

}  // namespace driftbench

#endif  // DRIFTBENCH_DATA_HPP_

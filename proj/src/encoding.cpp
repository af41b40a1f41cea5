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

#include "driftbench/encoding.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>

#include <fmt/format.h>

namespace driftbench {
namespace {

EncoderKind kind_for(const EncodingOptions& options, FeatureKind feature) {
  return feature == FeatureKind::MultiValuedCategorical ? options.multi_valued
                                                        : options.categorical;
}

bool is_categorical(FeatureKind kind) {
  return kind == FeatureKind::Categorical || kind == FeatureKind::MultiValuedCategorical;
}

// Values (and their labels) an encoder observes for one column. Ordinal
// multi-valued columns see the whole cell; token encoders see each token
// with the row's label.
void collect_observations(FeatureKind feature, EncoderKind kind, std::span<const Row> rows,
                          std::size_t column, std::span<const Label> labels,
                          std::vector<std::string>& values, std::vector<Label>& value_labels) {
  values.clear();
  value_labels.clear();
  const bool tokenize =
      feature == FeatureKind::MultiValuedCategorical && kind != EncoderKind::Ordinal;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::string& cell = rows[r][column];
    if (tokenize) {
      for (auto& token : split_tokens(cell)) {
        values.push_back(std::move(token));
        if (!labels.empty()) value_labels.push_back(labels[r]);
      }
    } else {
      values.push_back(cell);
      if (!labels.empty()) value_labels.push_back(labels[r]);
    }
  }
}

double parse_real(const std::string& cell, std::size_t row, std::string_view column) {
  if (cell.empty()) return 0.0;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    throw EncodeError(
        fmt::format("row {}, column '{}': cannot parse '{}' as a number", row, column, cell));
  }
  return value;
}

double parse_time(const std::string& cell, std::size_t row, std::string_view column) {
  if (cell.empty()) return 0.0;
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw EncodeError(
        fmt::format("row {}, column '{}': cannot parse '{}' as an integer time", row, column,
                    cell));
  }
  return static_cast<double>(value);
}

}  // namespace

std::string_view to_string(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::Ordinal: return "ordinal";
    case EncoderKind::Count: return "count";
    case EncoderKind::TargetMean: return "target";
  }
  return "?";
}

std::optional<EncoderKind> encoder_kind_from_string(std::string_view name) {
  if (name == "ordinal") return EncoderKind::Ordinal;
  if (name == "count") return EncoderKind::Count;
  if (name == "target" || name == "target_mean") return EncoderKind::TargetMean;
  return std::nullopt;
}

std::vector<std::string> split_tokens(std::string_view cell) {
  std::vector<std::string> tokens;
  if (cell.empty()) return tokens;
  std::size_t start = 0;
  while (true) {
    const auto sep = cell.find(kMvcSeparator, start);
    const auto token = cell.substr(start, sep == std::string_view::npos ? sep : sep - start);
    if (!token.empty()) tokens.emplace_back(token);
    if (sep == std::string_view::npos) break;
    start = sep + 1;
  }
  return tokens;
}

void Matrix::append_rows(const Matrix& other) {
  if (rows_ == 0 && cols_ == 0) {
    *this = other;
    return;
  }
  if (other.cols_ != cols_) {
    throw std::invalid_argument(
        fmt::format("Matrix::append_rows: {} columns vs {}", other.cols_, cols_));
  }
  data_.insert(data_.end(), other.data_.begin(), other.data_.end());
  rows_ += other.rows_;
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
  Matrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.data_.begin() + static_cast<std::ptrdiff_t>(i * cols_));
  }
  return out;
}

FittedEncoder FittedEncoder::ordinal(std::unordered_map<std::string, std::size_t> codes) {
  FittedEncoder e(EncoderKind::Ordinal);
  for (const auto& [value, code] : codes) {
    if (code == 0) throw std::invalid_argument("ordinal code 0 is reserved for unseen values");
  }
  e.fitted_rows_ = codes.size();
  e.codes_ = std::move(codes);
  return e;
}

FittedEncoder FittedEncoder::count(std::unordered_map<std::string, std::size_t> counts) {
  FittedEncoder e(EncoderKind::Count);
  for (const auto& [value, n] : counts) e.fitted_rows_ += n;
  e.codes_ = std::move(counts);
  return e;
}

FittedEncoder FittedEncoder::target_mean(std::unordered_map<std::string, TargetStats> stats,
                                         double prior, double smoothing) {
  if (smoothing < 0.0) throw std::invalid_argument("target encoding: smoothing must be >= 0");
  FittedEncoder e(EncoderKind::TargetMean);
  double total = 0.0;
  for (const auto& [value, s] : stats) {
    if (s.count < 0.0 || s.label_sum < 0.0 || s.label_sum > s.count) {
      throw std::invalid_argument(fmt::format("target encoding: bad stats for '{}'", value));
    }
    total += s.count;
  }
  e.stats_ = std::move(stats);
  e.prior_ = prior;
  e.smoothing_ = smoothing;
  e.fitted_rows_ = static_cast<std::size_t>(total);
  e.label_total_ = prior * total;
  return e;
}

double FittedEncoder::encode(std::string_view value) const {
  const std::string key(value);
  switch (kind_) {
    case EncoderKind::Ordinal:
    case EncoderKind::Count: {
      const auto it = codes_.find(key);
      return it == codes_.end() ? 0.0 : static_cast<double>(it->second);
    }
    case EncoderKind::TargetMean: {
      const auto it = stats_.find(key);
      if (it == stats_.end()) return prior_;
      return (it->second.label_sum + smoothing_ * prior_) / (it->second.count + smoothing_);
    }
  }
  return 0.0;
}

std::size_t FittedEncoder::vocabulary_size() const {
  return kind_ == EncoderKind::TargetMean ? stats_.size() : codes_.size();
}

void FittedEncoder::update(std::span<const std::string> values, std::span<const Label> labels) {
  if (kind_ == EncoderKind::TargetMean && labels.size() != values.size()) {
    throw std::invalid_argument(fmt::format(
        "target encoding needs one label per value ({} values, {} labels)", values.size(),
        labels.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::string& value = values[i];
    if (value.empty()) continue;
    ++fitted_rows_;
    switch (kind_) {
      case EncoderKind::Ordinal:
        codes_.try_emplace(value, codes_.size() + 1);
        break;
      case EncoderKind::Count:
        ++codes_[value];
        break;
      case EncoderKind::TargetMean: {
        auto& s = stats_[value];
        s.label_sum += labels[i];
        s.count += 1.0;
        label_total_ += labels[i];
        break;
      }
    }
  }
  if (kind_ == EncoderKind::TargetMean && fitted_rows_ > 0) {
    prior_ = label_total_ / static_cast<double>(fitted_rows_);
  }
}

FittedEncoder fit_encoder(EncoderKind kind, std::span<const std::string> values,
                          std::optional<std::span<const Label>> labels, double smoothing) {
  if (kind == EncoderKind::TargetMean) {
    if (!labels) throw std::invalid_argument("target encoding requires labels at fit time");
    if (smoothing < 0.0) throw std::invalid_argument("target encoding: smoothing must be >= 0");
  }
  if (labels && labels->size() != values.size()) {
    throw std::invalid_argument(fmt::format("fit_encoder: {} values but {} labels",
                                            values.size(), labels->size()));
  }
  FittedEncoder e(kind);
  e.smoothing_ = kind == EncoderKind::TargetMean ? smoothing : 0.0;
  e.update(values, labels.value_or(std::span<const Label>{}));
  return e;
}

std::vector<double> transform_column(const FittedEncoder& encoder,
                                     std::span<const std::string> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& value : values) out.push_back(encoder.encode(value));
  return out;
}

DatasetEncoder::DatasetEncoder(FeatureSchema schema, EncodingOptions options)
    : schema_(std::move(schema)), options_(options) {
  reset();
}

void DatasetEncoder::reset() {
  encoders_.clear();
  encoders_.resize(schema_.size());
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const auto feature = schema_[c].kind;
    if (!is_categorical(feature)) continue;
    const auto kind = kind_for(options_, feature);
    std::vector<Label> no_labels;
    encoders_[c] = fit_encoder(kind, {},
                               kind == EncoderKind::TargetMean
                                   ? std::optional<std::span<const Label>>(no_labels)
                                   : std::nullopt,
                               options_.smoothing);
  }
}

void DatasetEncoder::fit(const ChronoDataset& dataset, RowRange range) {
  if (range.end > dataset.size() || range.begin > range.end) {
    throw std::out_of_range(fmt::format("encoder fit range [{}, {}) outside {} rows", range.begin,
                                        range.end, dataset.size()));
  }
  schema_ = dataset.schema;
  reset();
  const std::span<const Row> rows(dataset.rows.data() + range.begin, range.size());
  std::span<const Label> labels;
  if (!dataset.labels.empty()) labels = {dataset.labels.data() + range.begin, range.size()};
  update(rows, labels);
}

void DatasetEncoder::update(std::span<const Row> rows, std::span<const Label> labels) {
  if (!labels.empty() && labels.size() != rows.size()) {
    throw std::invalid_argument(
        fmt::format("encoder update: {} rows but {} labels", rows.size(), labels.size()));
  }
  std::vector<std::string> values;
  std::vector<Label> value_labels;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    auto& encoder = encoders_[c];
    if (!encoder) continue;
    if (encoder->kind() == EncoderKind::TargetMean && labels.empty() && !rows.empty()) {
      throw std::invalid_argument(fmt::format(
          "column '{}': target encoding requires labels at fit time", schema_[c].name));
    }
    collect_observations(schema_[c].kind, encoder->kind(), rows, c, labels, values,
                         value_labels);
    encoder->update(values, value_labels);
  }
}

void DatasetEncoder::observe(std::span<const Row> rows) {
  std::vector<std::string> values;
  std::vector<Label> unused;
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    auto& encoder = encoders_[c];
    if (!encoder || encoder->kind() == EncoderKind::TargetMean) continue;
    collect_observations(schema_[c].kind, encoder->kind(), rows, c, {}, values, unused);
    encoder->update(values);
  }
}

Matrix DatasetEncoder::transform(std::span<const Row> rows, std::size_t first_row) const {
  Matrix out(rows.size(), schema_.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row& row = rows[r];
    if (row.size() != schema_.size()) {
      throw EncodeError(fmt::format("row {}: {} cells, schema has {} columns", first_row + r,
                                    row.size(), schema_.size()));
    }
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      const auto& column = schema_[c];
      const std::string& cell = row[c];
      switch (column.kind) {
        case FeatureKind::Numerical:
          out(r, c) = parse_real(cell, first_row + r, column.name);
          break;
        case FeatureKind::Time:
          out(r, c) = parse_time(cell, first_row + r, column.name);
          break;
        case FeatureKind::Categorical:
          out(r, c) = encoders_[c]->encode(cell);
          break;
        case FeatureKind::MultiValuedCategorical: {
          const auto& encoder = *encoders_[c];
          if (encoder.kind() == EncoderKind::Ordinal) {
            out(r, c) = encoder.encode(cell);
            break;
          }
          const auto tokens = split_tokens(cell);
          double sum = 0.0;
          for (const auto& token : tokens) sum += encoder.encode(token);
          out(r, c) = tokens.empty() ? 0.0 : sum / static_cast<double>(tokens.size());
          break;
        }
      }
    }
  }
  return out;
}

EncodedDataset encode_dataset(const ChronoDataset& dataset, const EncodingOptions& options,
                              RowRange fit_rows) {
  EncodedDataset out;
  out.encoder = DatasetEncoder(dataset.schema, options);
  out.encoder.fit(dataset, fit_rows);
  if (options.co_encode) {
    // Values of every row outside the fit range, in chronological order.
    out.encoder.observe({dataset.rows.data(), fit_rows.begin});
    out.encoder.observe(
        {dataset.rows.data() + fit_rows.end, dataset.rows.size() - fit_rows.end});
  }
  out.features = out.encoder.transform(dataset.rows);
  return out;
}

}  // namespace driftbench

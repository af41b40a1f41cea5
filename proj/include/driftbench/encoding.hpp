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

// Categorical encoders (ordinal, count, smoothed target mean) and the
// dataset-level encoder that turns raw rows into a dense numeric matrix.

#ifndef DRIFTBENCH_ENCODING_HPP_
#define DRIFTBENCH_ENCODING_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "driftbench/data.hpp"

namespace driftbench {

class EncodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EncoderKind { Ordinal, Count, TargetMean };

std::string_view to_string(EncoderKind kind);
std::optional<EncoderKind> encoder_kind_from_string(std::string_view name);

inline constexpr double kDefaultSmoothing = 10.0;

// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  void append_rows(const Matrix& other);
  // Keeps the given rows, in the given order.
  Matrix select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// State of one fitted categorical encoder.
//
// Ordinal codes start at 1 in order of first appearance; 0 is reserved for
// values never seen at fit time. Count maps a value to its occurrences.
// TargetMean maps a value v to (sum_v + m * prior) / (count_v + m).
// Unseen values encode to 0 (Ordinal, Count) or to the prior (TargetMean).
class FittedEncoder {
 public:
  struct TargetStats {
    double label_sum = 0.0;
    double count = 0.0;

    bool operator==(const TargetStats&) const = default;
  };

  static FittedEncoder ordinal(std::unordered_map<std::string, std::size_t> codes);
  static FittedEncoder count(std::unordered_map<std::string, std::size_t> counts);
  static FittedEncoder target_mean(std::unordered_map<std::string, TargetStats> stats,
                                   double prior, double smoothing);

  EncoderKind kind() const { return kind_; }
  double encode(std::string_view value) const;

  // Adds observations. Ordinal codes already assigned never change.
  // `labels` is required for TargetMean and ignored otherwise. The prior of a
  // TargetMean encoder is the mean label over every observation seen so far.
  void update(std::span<const std::string> values, std::span<const Label> labels = {});

  std::size_t fitted_rows() const { return fitted_rows_; }
  double prior() const { return prior_; }
  double smoothing() const { return smoothing_; }
  std::size_t vocabulary_size() const;

  const std::unordered_map<std::string, std::size_t>& codes() const { return codes_; }
  const std::unordered_map<std::string, TargetStats>& target_stats() const { return stats_; }

  bool operator==(const FittedEncoder&) const = default;

 private:
  friend FittedEncoder fit_encoder(EncoderKind, std::span<const std::string>,
                                   std::optional<std::span<const Label>>, double);

  explicit FittedEncoder(EncoderKind kind) : kind_(kind) {}

  EncoderKind kind_;
  // Ordinal codes or Count occurrences, depending on kind_.
  std::unordered_map<std::string, std::size_t> codes_;
  std::unordered_map<std::string, TargetStats> stats_;
  double prior_ = 0.5;
  double smoothing_ = 0.0;
  double label_total_ = 0.0;
  std::size_t fitted_rows_ = 0;
};

// Throws std::invalid_argument for TargetMean without labels, or when the
// label count differs from the value count.
FittedEncoder fit_encoder(EncoderKind kind, std::span<const std::string> values,
                          std::optional<std::span<const Label>> labels = std::nullopt,
                          double smoothing = kDefaultSmoothing);

std::vector<double> transform_column(const FittedEncoder& encoder,
                                     std::span<const std::string> values);

struct EncodingOptions {
  EncoderKind categorical = EncoderKind::Ordinal;
  EncoderKind multi_valued = EncoderKind::Ordinal;
  double smoothing = kDefaultSmoothing;
  // Co-encoding: Ordinal and Count encoders also observe the values of the
  // rows being transformed (never their labels). Off by default.
  bool co_encode = false;
};

// Encodes whole rows. Numerical cells parse as reals (missing -> 0), Time
// cells as integers, Categorical cells go through their column encoder, and
// Multi-valued cells encode as the full joined string (Ordinal) or the mean
// of per-token encodings (Count, TargetMean; an empty cell -> 0).
class DatasetEncoder {
 public:
  DatasetEncoder() = default;
  DatasetEncoder(FeatureSchema schema, EncodingOptions options);

  // Fits on rows [range) of `dataset`, discarding any previous state.
  void fit(const ChronoDataset& dataset, RowRange range);
  // Adds rows to the fitted state. Labels may be empty unless a TargetMean
  // encoder is configured.
  void update(std::span<const Row> rows, std::span<const Label> labels);
  // Value-only update used for co-encoding: Ordinal and Count encoders
  // observe the rows, TargetMean encoders are left untouched.
  void observe(std::span<const Row> rows);

  // `first_row` only labels error messages.
  Matrix transform(std::span<const Row> rows, std::size_t first_row = 0) const;

  const FeatureSchema& schema() const { return schema_; }
  const EncodingOptions& options() const { return options_; }
  // Encoder for column `c`; absent for Numerical and Time columns.
  const std::optional<FittedEncoder>& encoder(std::size_t c) const { return encoders_[c]; }

 private:
  void reset();

  FeatureSchema schema_;
  EncodingOptions options_;
  std::vector<std::optional<FittedEncoder>> encoders_;
};

struct EncodedDataset {
  Matrix features;
  DatasetEncoder encoder;
};

// Fits encoders on rows [fit_rows) and encodes every row of the dataset.
// Rows outside fit_rows never influence the encoders unless co_encode is set,
// and then only through their values.
EncodedDataset encode_dataset(const ChronoDataset& dataset, const EncodingOptions& options,
                              RowRange fit_rows);

// Tokens of a multi-valued cell; an empty cell has no tokens.
std::vector<std::string> split_tokens(std::string_view cell);

}  // namespace driftbench

#endif  // DRIFTBENCH_ENCODING_HPP_

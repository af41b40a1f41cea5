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

#ifndef DRIFTBENCH_METRICS_HPP_
#define DRIFTBENCH_METRICS_HPP_

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftbench/data.hpp"

namespace driftbench {

// Raised when the labels contain a single class.
class UndefinedAucError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
// (positive, negative) pairs where the positive scores higher, ties counted
// as one half. O(n log n).
double auc(std::span<const Label> labels, std::span<const double> scores);

// AUC a single-class block receives.
inline constexpr double kDegenerateBlockAuc = 0.5;

struct BlockScore {
  std::size_t block = 0;
  double auc = 0.0;
  double elapsed_seconds = 0.0;
  // Set when the block held one class only and `auc` is kDegenerateBlockAuc.
  bool degenerate = false;

  bool operator==(const BlockScore&) const = default;
};

// Scores one block, mapping single-class blocks to kDegenerateBlockAuc.
BlockScore score_block(std::size_t block, std::span<const Label> labels,
                       std::span<const double> scores, double elapsed_seconds);

struct DatasetScore {
  std::string dataset;
  std::vector<BlockScore> blocks;
  double mean_auc = 0.0;
  double total_elapsed_seconds = 0.0;
  bool disqualified = false;

  bool operator==(const DatasetScore&) const = default;
};

// Mean block AUC; total elapsed is the sum over blocks. Exceeding the budget
// disqualifies the dataset and forces its mean AUC to 0.
DatasetScore aggregate_dataset(std::string dataset, std::vector<BlockScore> blocks,
                               double budget_seconds);

}  // namespace driftbench

#endif  // DRIFTBENCH_METRICS_HPP_

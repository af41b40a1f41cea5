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

// Incrementally grown gradient-boosted tree ensemble for binary labels.
//
// The ensemble starts with `initial_trees` regression trees fitted on the
// first labeled block and gains `trees_per_block` more each time a block is
// revealed. Every tree fits the negative gradient y - p of the logistic loss
// on a bounded subsample of the training pool. The drift policy decides which
// rows the pool keeps and how the learning rate evolves:
//
//   GrowFullHistory       all blocks kept; subsample prefers recent blocks
//   SlidingWindow         only the last `window_blocks` blocks kept
//   AdaptiveLearningRate  as GrowFullHistory, with rate lr * lr_decay^k for
//                         the trees added by the k-th extension

#ifndef DRIFTBENCH_BASELINE_HPP_
#define DRIFTBENCH_BASELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stop_token>
#include <string_view>
#include <vector>

#include "driftbench/data.hpp"
#include "driftbench/encoding.hpp"

namespace driftbench {

enum class DriftPolicy { GrowFullHistory, SlidingWindow, AdaptiveLearningRate };

std::string_view to_string(DriftPolicy policy);
std::optional<DriftPolicy> drift_policy_from_string(std::string_view name);

struct BaselineConfig {
  std::size_t initial_trees = 100;
  std::size_t trees_per_block = 20;
  std::size_t depth = 4;
  double learning_rate = 0.1;
  // Maximum rows used by one fit call.
  std::size_t subsample_cap = 100000;
  DriftPolicy policy = DriftPolicy::GrowFullHistory;
  std::size_t window_blocks = 2;
  // Sampling weight of a row is recency_decay^(age in blocks).
  double recency_decay = 0.8;
  double lr_decay = 0.8;
  std::size_t min_leaf_rows = 20;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on violated invariants.
  void validate() const;
};

double sigmoid(double x);
// Loss of label y under raw score f: log(1 + e^f) - y f.
double logistic_loss(Label y, double raw_score);
// -d loss / d raw_score = y - sigmoid(f).
double logistic_negative_gradient(Label y, double raw_score);

struct TreeNode {
  // -1 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool operator==(const TreeNode&) const = default;
};

// Axis-aligned binary regression tree. A row goes left when
// row[feature] <= threshold. Node 0 is the root.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes);

  double predict(std::span<const double> row) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;

  bool operator==(const RegressionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

// Row indices of a matrix sorted by each column, built once per fit call.
class SortedColumns {
 public:
  explicit SortedColumns(const Matrix& x);
  std::span<const std::size_t> column(std::size_t c) const { return order_[c]; }

 private:
  std::vector<std::vector<std::size_t>> order_;
};

// Exact greedy tree on `targets` (one per row of x): each split maximises
// the reduction in squared error, thresholds sit midway between consecutive
// distinct values, leaves hold the mean target of their rows. Splits leaving
// fewer than `min_leaf_rows` rows on a side are not considered.
RegressionTree fit_regression_tree(const Matrix& x, const SortedColumns& sorted,
                                   std::span<const double> targets, std::size_t depth,
                                   std::size_t min_leaf_rows);

struct BoostedEnsemble {
  double base_score = 0.0;
  std::vector<RegressionTree> trees;
  std::vector<double> learning_rates;
  std::size_t feature_count = 0;

  // base + sum of rate * tree(row) over the first `tree_limit` trees.
  double raw_score(std::span<const double> row, std::size_t tree_limit) const;
  double raw_score(std::span<const double> row) const { return raw_score(row, trees.size()); }

  bool operator==(const BoostedEnsemble&) const = default;
};

// sigmoid(raw_score) per row. Throws std::invalid_argument when the row
// width differs from the training width.
std::vector<double> predict_scores(const BoostedEnsemble& ensemble, const Matrix& rows);

// Pool loss before the first new tree, then after each tree.
struct FitReport {
  std::vector<double> loss_history;
  std::size_t pool_rows = 0;
  bool degenerate = false;
};

// Fits `config.initial_trees` trees on the first block.
BoostedEnsemble fit_initial(const Matrix& block, std::span<const Label> labels,
                            const BaselineConfig& config, FitReport* report = nullptr);

// Picks at most `cap` row indices (ascending) from a history whose rows are
// tagged with the block they came from. Rows outside the policy's window are
// never chosen. When the eligible rows exceed the cap they are sampled
// without replacement with weight decay^(newest block - block), uniformly for
// SlidingWindow. Deterministic for a given seed.
std::vector<std::size_t> select_training_pool(std::span<const std::size_t> block_of_row,
                                              DriftPolicy policy, std::size_t cap,
                                              std::uint64_t seed, double decay = 0.8,
                                              std::size_t window_blocks = 2);

// Labeled rows retained for future fits, tagged by block of origin.
class TrainingPool {
 public:
  void add_block(std::size_t block, const Matrix& features, std::span<const Label> labels);
  // Drops every row not in the newest `k` blocks.
  void retain_last_blocks(std::size_t k);
  // Replaces the features of every pooled row (same order), e.g. after the
  // categorical encoders moved.
  void replace_features(Matrix features);

  std::size_t size() const { return labels_.size(); }
  const Matrix& features() const { return features_; }
  const std::vector<Label>& labels() const { return labels_; }
  const std::vector<std::size_t>& block_of_row() const { return block_of_row_; }
  // Distinct block ids present, ascending.
  std::vector<std::size_t> blocks() const;

 private:
  Matrix features_;
  std::vector<Label> labels_;
  std::vector<std::size_t> block_of_row_;
};

// Stateful learner driving the ensemble through the lifelong protocol.
class IncrementalBooster {
 public:
  explicit IncrementalBooster(BaselineConfig config);

  // Trains on the first revealed block. Stops adding trees early when
  // `stop` is triggered.
  FitReport fit_initial(const Matrix& block, std::span<const Label> labels,
                        std::stop_token stop = {});
  // Adds the newly revealed block to the pool and appends trees fitted on it.
  FitReport extend(const Matrix& block, std::span<const Label> labels, std::stop_token stop = {});

  std::vector<double> predict_scores(const Matrix& rows) const;

  bool fitted() const { return fitted_; }
  const BoostedEnsemble& ensemble() const { return ensemble_; }
  const TrainingPool& pool() const { return pool_; }
  TrainingPool& pool() { return pool_; }
  const BaselineConfig& config() const { return config_; }
  // Number of extend() calls so far.
  std::size_t extensions() const { return extensions_; }

 private:
  FitReport grow(std::size_t trees, double rate, std::stop_token stop);

  BaselineConfig config_;
  BoostedEnsemble ensemble_;
  TrainingPool pool_;
  std::size_t extensions_ = 0;
  std::size_t next_block_ = 0;
  bool fitted_ = false;
};

}  // namespace driftbench

#endif  // DRIFTBENCH_BASELINE_HPP_

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

#include "driftbench/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace driftbench {
namespace {

constexpr double kPriorClamp = 1e-6;
constexpr double kMinGain = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double log_odds(double prior) {
  const double p = std::clamp(prior, kPriorClamp, 1.0 - kPriorClamp);
  return std::log(p / (1.0 - p));
}

double mean_label(std::span<const Label> labels) {
  if (labels.empty()) return 0.5;
  double sum = 0.0;
  for (const Label y : labels) sum += y;
  return sum / static_cast<double>(labels.size());
}

bool single_class(std::span<const Label> labels) {
  return std::adjacent_find(labels.begin(), labels.end(), std::not_equal_to<>()) ==
         labels.end();
}

double mean_loss(std::span<const Label> labels, std::span<const double> raw) {
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) sum += logistic_loss(labels[i], raw[i]);
  return labels.empty() ? 0.0 : sum / static_cast<double>(labels.size());
}

}  // namespace

std::string_view to_string(DriftPolicy policy) {
  switch (policy) {
    case DriftPolicy::GrowFullHistory: return "grow-full-history";
    case DriftPolicy::SlidingWindow: return "sliding-window";
    case DriftPolicy::AdaptiveLearningRate: return "adaptive-lr";
  }
  return "?";
}

std::optional<DriftPolicy> drift_policy_from_string(std::string_view name) {
  if (name == "grow-full-history") return DriftPolicy::GrowFullHistory;
  if (name == "sliding-window") return DriftPolicy::SlidingWindow;
  if (name == "adaptive-lr") return DriftPolicy::AdaptiveLearningRate;
  return std::nullopt;
}

void BaselineConfig::validate() const {
  if (initial_trees < 1) throw std::invalid_argument("baseline: initial_trees must be >= 1");
  if (trees_per_block < 1) throw std::invalid_argument("baseline: trees_per_block must be >= 1");
  if (depth < 1) throw std::invalid_argument("baseline: depth must be >= 1");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0))
    throw std::invalid_argument("baseline: learning_rate must be in (0, 1]");
  if (subsample_cap < 1) throw std::invalid_argument("baseline: subsample_cap must be >= 1");
  if (window_blocks < 1) throw std::invalid_argument("baseline: window_blocks must be >= 1");
  if (!(recency_decay > 0.0 && recency_decay <= 1.0))
    throw std::invalid_argument("baseline: recency_decay must be in (0, 1]");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0))
    throw std::invalid_argument("baseline: lr_decay must be in (0, 1]");
  if (min_leaf_rows < 1) throw std::invalid_argument("baseline: min_leaf_rows must be >= 1");
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logistic_loss(Label y, double raw_score) {
  // log(1 + e^f) computed without overflow.
  const double softplus = raw_score > 0.0 ? raw_score + std::log1p(std::exp(-raw_score))
                                          : std::log1p(std::exp(raw_score));
  return softplus - static_cast<double>(y) * raw_score;
}

double logistic_negative_gradient(Label y, double raw_score) {
  return static_cast<double>(y) - sigmoid(raw_score);
}

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

double RegressionTree::predict(std::span<const double> row) const {
  if (nodes_.empty()) return 0.0;
  std::size_t n = 0;
  while (nodes_[n].feature >= 0) {
    const auto& node = nodes_[n];
    n = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold
                                     ? node.left
                                     : node.right);
  }
  return nodes_[n].value;
}

std::size_t RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [n, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes_[n].feature >= 0) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[n].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[n].right), d + 1);
    }
  }
  return deepest;
}

SortedColumns::SortedColumns(const Matrix& x) : order_(x.cols()) {
  for (std::size_t c = 0; c < x.cols(); ++c) {
    auto& order = order_[c];
    order.resize(x.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x(a, c) < x(b, c); });
  }
}

RegressionTree fit_regression_tree(const Matrix& x, const SortedColumns& sorted,
                                   std::span<const double> targets, std::size_t depth,
                                   std::size_t min_leaf_rows) {
  const std::size_t n = x.rows();
  if (targets.size() != n) {
    throw std::invalid_argument(
        fmt::format("fit_regression_tree: {} targets for {} rows", targets.size(), n));
  }
  min_leaf_rows = std::max<std::size_t>(1, min_leaf_rows);
  std::vector<TreeNode> nodes(1);
  if (n == 0) return RegressionTree(std::move(nodes));

  constexpr int kSettled = -1;
  // Node id of each row while its node is still open for splitting.
  std::vector<int> node_of(n, 0);
  std::vector<int> frontier{0};

  struct Candidate {
    double sum = 0.0;
    std::size_t count = 0;
    double best_gain = kMinGain;
    int feature = -1;
    double threshold = 0.0;
    // Running scan state for the current feature.
    double left_sum = 0.0;
    std::size_t left_count = 0;
    double last_value = 0.0;
  };
  std::vector<Candidate> cand;

  for (std::size_t level = 0; level <= depth && !frontier.empty(); ++level) {
    cand.assign(nodes.size(), Candidate{});
    for (std::size_t r = 0; r < n; ++r) {
      if (node_of[r] == kSettled) continue;
      auto& c = cand[static_cast<std::size_t>(node_of[r])];
      c.sum += targets[r];
      ++c.count;
    }
    for (const int id : frontier) {
      auto& c = cand[static_cast<std::size_t>(id)];
      nodes[static_cast<std::size_t>(id)].value =
          c.count == 0 ? 0.0 : c.sum / static_cast<double>(c.count);
    }
    if (level == depth) break;

    for (std::size_t f = 0; f < x.cols(); ++f) {
      for (const int id : frontier) {
        auto& c = cand[static_cast<std::size_t>(id)];
        c.left_sum = 0.0;
        c.left_count = 0;
      }
      for (const std::size_t r : sorted.column(f)) {
        if (node_of[r] == kSettled) continue;
        auto& c = cand[static_cast<std::size_t>(node_of[r])];
        const double v = x(r, f);
        if (c.left_count >= min_leaf_rows && v != c.last_value &&
            c.count - c.left_count >= min_leaf_rows) {
          const double right_sum = c.sum - c.left_sum;
          const auto nl = static_cast<double>(c.left_count);
          const auto nr = static_cast<double>(c.count - c.left_count);
          const double gain = c.left_sum * c.left_sum / nl + right_sum * right_sum / nr -
                              c.sum * c.sum / static_cast<double>(c.count);
          if (gain > c.best_gain) {
            c.best_gain = gain;
            c.feature = static_cast<int>(f);
            double mid = c.last_value + (v - c.last_value) / 2.0;
            if (mid >= v) mid = c.last_value;
            c.threshold = mid;
          }
        }
        c.left_sum += targets[r];
        ++c.left_count;
        c.last_value = v;
      }
    }

    std::vector<int> next;
    for (const int id : frontier) {
      const auto& c = cand[static_cast<std::size_t>(id)];
      if (c.feature < 0) continue;
      const int left = static_cast<int>(nodes.size());
      nodes.push_back(TreeNode{});
      nodes.push_back(TreeNode{});
      auto& node = nodes[static_cast<std::size_t>(id)];
      node.feature = c.feature;
      node.threshold = c.threshold;
      node.left = left;
      node.right = left + 1;
      next.push_back(left);
      next.push_back(left + 1);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (node_of[r] == kSettled) continue;
      const auto& node = nodes[static_cast<std::size_t>(node_of[r])];
      if (node.feature < 0) {
        node_of[r] = kSettled;
      } else {
        node_of[r] = x(r, static_cast<std::size_t>(node.feature)) <= node.threshold ? node.left
                                                                                   : node.right;
      }
    }
    frontier = std::move(next);
  }
  return RegressionTree(std::move(nodes));
}

double BoostedEnsemble::raw_score(std::span<const double> row, std::size_t tree_limit) const {
  double f = base_score;
  const std::size_t limit = std::min(tree_limit, trees.size());
  for (std::size_t t = 0; t < limit; ++t) f += learning_rates[t] * trees[t].predict(row);
  return f;
}

std::vector<double> predict_scores(const BoostedEnsemble& ensemble, const Matrix& rows) {
  if (rows.rows() > 0 && rows.cols() != ensemble.feature_count) {
    throw std::invalid_argument(fmt::format("predict_scores: rows have {} features, model has {}",
                                            rows.cols(), ensemble.feature_count));
  }
  std::vector<double> out(rows.rows());
  for (std::size_t r = 0; r < rows.rows(); ++r) out[r] = sigmoid(ensemble.raw_score(rows.row(r)));
  return out;
}

BoostedEnsemble fit_initial(const Matrix& block, std::span<const Label> labels,
                            const BaselineConfig& config, FitReport* report) {
  IncrementalBooster booster(config);
  auto r = booster.fit_initial(block, labels);
  if (report) *report = std::move(r);
  return booster.ensemble();
}

std::vector<std::size_t> select_training_pool(std::span<const std::size_t> block_of_row,
                                              DriftPolicy policy, std::size_t cap,
                                              std::uint64_t seed, double decay,
                                              std::size_t window_blocks) {
  if (block_of_row.empty()) return {};
  const std::size_t newest = *std::max_element(block_of_row.begin(), block_of_row.end());

  std::vector<std::size_t> eligible;
  eligible.reserve(block_of_row.size());
  if (policy == DriftPolicy::SlidingWindow) {
    std::vector<std::size_t> distinct(block_of_row.begin(), block_of_row.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const std::size_t keep = std::min(window_blocks, distinct.size());
    const std::size_t oldest_kept = distinct[distinct.size() - keep];
    for (std::size_t i = 0; i < block_of_row.size(); ++i)
      if (block_of_row[i] >= oldest_kept) eligible.push_back(i);
  } else {
    eligible.resize(block_of_row.size());
    std::iota(eligible.begin(), eligible.end(), std::size_t{0});
  }
  if (eligible.size() <= cap) return eligible;

  // Weighted sampling without replacement: keep the `cap` largest keys
  // log(u) / w (Efraimidis-Spirakis).
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<double, std::size_t>> keyed;
  keyed.reserve(eligible.size());
  for (const std::size_t i : eligible) {
    const double age = static_cast<double>(newest - block_of_row[i]);
    const double weight = policy == DriftPolicy::SlidingWindow ? 1.0 : std::pow(decay, age);
    const double u = 1.0 - unit(rng);  // (0, 1]
    keyed.emplace_back(std::log(u) / weight, i);
  }
  std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(cap), keyed.end(),
                   [](const auto& a, const auto& b) {
                     return a.first != b.first ? a.first > b.first : a.second < b.second;
                   });
  std::vector<std::size_t> chosen;
  chosen.reserve(cap);
  for (std::size_t k = 0; k < cap; ++k) chosen.push_back(keyed[k].second);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

void TrainingPool::add_block(std::size_t block, const Matrix& features,
                             std::span<const Label> labels) {
  if (features.rows() != labels.size()) {
    throw std::invalid_argument(fmt::format("training pool: {} rows but {} labels",
                                            features.rows(), labels.size()));
  }
  features_.append_rows(features);
  labels_.insert(labels_.end(), labels.begin(), labels.end());
  block_of_row_.insert(block_of_row_.end(), labels.size(), block);
}

void TrainingPool::retain_last_blocks(std::size_t k) {
  const auto present = blocks();
  if (present.size() <= k) return;
  const std::size_t oldest_kept = present[present.size() - k];
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < block_of_row_.size(); ++i)
    if (block_of_row_[i] >= oldest_kept) keep.push_back(i);
  features_ = features_.select_rows(keep);
  std::vector<Label> labels;
  std::vector<std::size_t> tags;
  for (const std::size_t i : keep) {
    labels.push_back(labels_[i]);
    tags.push_back(block_of_row_[i]);
  }
  labels_ = std::move(labels);
  block_of_row_ = std::move(tags);
}

void TrainingPool::replace_features(Matrix features) {
  if (features.rows() != labels_.size()) {
    throw std::invalid_argument(fmt::format("training pool: replacement has {} rows, pool has {}",
                                            features.rows(), labels_.size()));
  }
  features_ = std::move(features);
}

std::vector<std::size_t> TrainingPool::blocks() const {
  std::vector<std::size_t> out(block_of_row_.begin(), block_of_row_.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IncrementalBooster::IncrementalBooster(BaselineConfig config) : config_(config) {
  config_.validate();
}

FitReport IncrementalBooster::fit_initial(const Matrix& block, std::span<const Label> labels,
                                          std::stop_token stop) {
  pool_ = TrainingPool{};
  pool_.add_block(0, block, labels);
  next_block_ = 1;
  extensions_ = 0;
  ensemble_ = BoostedEnsemble{};
  ensemble_.feature_count = block.cols();
  ensemble_.base_score = log_odds(mean_label(labels));
  fitted_ = true;
  return grow(config_.initial_trees, config_.learning_rate, stop);
}

FitReport IncrementalBooster::extend(const Matrix& block, std::span<const Label> labels,
                                     std::stop_token stop) {
  if (!fitted_) throw std::logic_error("IncrementalBooster::extend before fit_initial");
  if (block.rows() > 0 && block.cols() != ensemble_.feature_count) {
    throw std::invalid_argument(fmt::format("extend: block has {} features, model has {}",
                                            block.cols(), ensemble_.feature_count));
  }
  pool_.add_block(next_block_++, block, labels);
  if (config_.policy == DriftPolicy::SlidingWindow) pool_.retain_last_blocks(config_.window_blocks);
  ++extensions_;
  double rate = config_.learning_rate;
  if (config_.policy == DriftPolicy::AdaptiveLearningRate)
    rate *= std::pow(config_.lr_decay, static_cast<double>(extensions_));
  return grow(config_.trees_per_block, rate, stop);
}

FitReport IncrementalBooster::grow(std::size_t trees, double rate, std::stop_token stop) {
  FitReport report;
  const auto chosen =
      select_training_pool(pool_.block_of_row(), config_.policy, config_.subsample_cap,
                           config_.seed + extensions_, config_.recency_decay,
                           config_.window_blocks);
  const Matrix x = pool_.features().select_rows(chosen);
  std::vector<Label> y;
  y.reserve(chosen.size());
  for (const std::size_t i : chosen) y.push_back(pool_.labels()[i]);
  report.pool_rows = y.size();

  if (y.empty() || single_class(y)) {
    report.degenerate = true;
    ensemble_.base_score = log_odds(mean_label(y));
    return report;
  }

  std::vector<double> raw(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) raw[r] = ensemble_.raw_score(x.row(r));
  report.loss_history.push_back(mean_loss(y, raw));

  const SortedColumns sorted(x);
  std::vector<double> targets(x.rows());
  for (std::size_t t = 0; t < trees; ++t) {
    if (stop.stop_requested()) break;
    for (std::size_t r = 0; r < x.rows(); ++r)
      targets[r] = logistic_negative_gradient(y[r], raw[r]);
    auto tree = fit_regression_tree(x, sorted, targets, config_.depth, config_.min_leaf_rows);
    for (std::size_t r = 0; r < x.rows(); ++r) raw[r] += rate * tree.predict(x.row(r));
    ensemble_.trees.push_back(std::move(tree));
    ensemble_.learning_rates.push_back(rate);
    report.loss_history.push_back(mean_loss(y, raw));
  }
  return report;
}

std::vector<double> IncrementalBooster::predict_scores(const Matrix& rows) const {
  return driftbench::predict_scores(ensemble_, rows);
}

}  // namespace driftbench

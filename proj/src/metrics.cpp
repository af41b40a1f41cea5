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

#include "driftbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace driftbench {

double auc(std::span<const Label> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) {
    throw std::invalid_argument(
        fmt::format("auc: {} labels but {} scores", labels.size(), scores.size()));
  }
  for (const double s : scores) {
    if (!std::isfinite(s)) throw std::invalid_argument("auc: non-finite score");
  }
  const std::size_t n = labels.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of mid-ranks (1-based) of the positives; tied groups share the
  // average of the ranks they span. Twice the ranks keeps this integral.
  double twice_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    std::size_t group_positives = 0;
    while (j < n && scores[order[j]] == scores[order[i]]) {
      group_positives += labels[order[j]] == 1 ? 1 : 0;
      ++j;
    }
    // Ranks i+1 .. j, average (i + 1 + j) / 2.
    twice_rank_sum += static_cast<double>(group_positives) * static_cast<double>(i + 1 + j);
    positives += group_positives;
    i = j;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedAucError(fmt::format(
        "auc: undefined for single-class labels ({} positives, {} negatives)", positives,
        negatives));
  }
  const double p = static_cast<double>(positives);
  const double u = twice_rank_sum / 2.0 - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

BlockScore score_block(std::size_t block, std::span<const Label> labels,
                       std::span<const double> scores, double elapsed_seconds) {
  BlockScore out{block, kDegenerateBlockAuc, elapsed_seconds, false};
  try {
    out.auc = auc(labels, scores);
  } catch (const UndefinedAucError&) {
    out.degenerate = true;
  }
  return out;
}

DatasetScore aggregate_dataset(std::string dataset, std::vector<BlockScore> blocks,
                               double budget_seconds) {
  DatasetScore out;
  out.dataset = std::move(dataset);
  double auc_sum = 0.0;
  for (const auto& b : blocks) {
    auc_sum += b.auc;
    out.total_elapsed_seconds += b.elapsed_seconds;
  }
  out.mean_auc = blocks.empty() ? 0.0 : auc_sum / static_cast<double>(blocks.size());
  out.blocks = std::move(blocks);
  if (out.total_elapsed_seconds > budget_seconds) {
    out.disqualified = true;
    out.mean_auc = 0.0;
  }
  return out;
}

}  // namespace driftbench

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

#include "driftbench/predictors.hpp"

#include <algorithm>

namespace driftbench {

BaselinePredictor::BaselinePredictor(BaselineOptions options)
    : options_(options), booster_(options.model) {}

bool BaselinePredictor::reencodes() const {
  return options_.encoding.categorical != EncoderKind::Ordinal ||
         options_.encoding.multi_valued != EncoderKind::Ordinal;
}

void BaselinePredictor::learn(const BlockView& block, const CallContext& ctx) {
  if (!encoder_) encoder_.emplace(block.schema, options_.encoding);
  encoder_->update(block.rows, block.labels);
  const Matrix x = encoder_->transform(block.rows, block.first_row);

  if (!booster_.fitted()) {
    booster_.fit_initial(x, block.labels, ctx.stop);
  } else {
    if (reencodes()) {
      std::vector<Row> pooled;
      for (const auto& raw : raw_pool_) pooled.insert(pooled.end(), raw.rows.begin(), raw.rows.end());
      booster_.pool().replace_features(encoder_->transform(pooled));
    }
    booster_.extend(x, block.labels, ctx.stop);
  }

  if (reencodes()) {
    raw_pool_.push_back({block.block, {block.rows.begin(), block.rows.end()}});
    // Mirror the booster's retention so pooled rows line up.
    const std::size_t kept = booster_.pool().blocks().size();
    if (raw_pool_.size() > kept) {
      raw_pool_.erase(raw_pool_.begin(),
                      raw_pool_.begin() + static_cast<std::ptrdiff_t>(raw_pool_.size() - kept));
    }
  }
  if (ctx.stop.stop_requested()) throw BudgetExceeded("baseline: stopped during learn");
}

std::vector<double> BaselinePredictor::predict(const BlockView& block, const CallContext& ctx) {
  if (!booster_.fitted() || !encoder_) return std::vector<double>(block.rows.size(), 0.5);
  if (options_.encoding.co_encode) encoder_->observe(block.rows);
  const Matrix x = encoder_->transform(block.rows, block.first_row);
  auto scores = booster_.predict_scores(x);
  if (ctx.stop.stop_requested()) throw BudgetExceeded("baseline: stopped during predict");
  return scores;
}

}  // namespace driftbench

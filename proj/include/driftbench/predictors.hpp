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

// In-process predictors: the boosted baseline and a constant scorer.

#ifndef DRIFTBENCH_PREDICTORS_HPP_
#define DRIFTBENCH_PREDICTORS_HPP_

#include <string>
#include <vector>

#include "driftbench/baseline.hpp"
#include "driftbench/encoding.hpp"
#include "driftbench/harness.hpp"

namespace driftbench {

// Scores every row with the same value.
class ConstantPredictor : public Predictor {
 public:
  explicit ConstantPredictor(double value = 0.5) : value_(value) {}

  std::string id() const override { return "constant"; }
  void learn(const BlockView&, const CallContext&) override {}
  std::vector<double> predict(const BlockView& block, const CallContext&) override {
    return std::vector<double>(block.rows.size(), value_);
  }

 private:
  double value_;
};

struct BaselineOptions {
  BaselineConfig model;
  EncodingOptions encoding;
};

// Encodes raw rows and drives an IncrementalBooster: the first revealed
// block fits the initial trees, every later block extends the ensemble.
// Ordinal codes are stable as new values appear; with count or target
// encoding the pooled rows are re-encoded before each extension.
class BaselinePredictor : public Predictor {
 public:
  explicit BaselinePredictor(BaselineOptions options = {});

  std::string id() const override { return "baseline"; }
  void learn(const BlockView& block, const CallContext& ctx) override;
  std::vector<double> predict(const BlockView& block, const CallContext& ctx) override;

  const IncrementalBooster& booster() const { return booster_; }

 private:
  struct RawBlock {
    std::size_t block;
    std::vector<Row> rows;
  };

  bool reencodes() const;

  BaselineOptions options_;
  IncrementalBooster booster_;
  std::optional<DatasetEncoder> encoder_;
  std::vector<RawBlock> raw_pool_;
};

}  // namespace driftbench

#endif  // DRIFTBENCH_PREDICTORS_HPP_

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

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "driftbench/metrics.hpp"
#include "testkit.hpp"

namespace {

namespace db = driftbench;
using Labels = std::vector<db::Label>;
using Scores = std::vector<double>;

TEST(Auc, PerfectSeparation) { EXPECT_EQ(db::auc(Labels{0, 1}, Scores{0.2, 0.9}), 1.0); }

TEST(Auc, AllTies) { EXPECT_EQ(db::auc(Labels{0, 1, 1, 0, 1}, Scores(5, 0.3)), 0.5); }

TEST(Auc, SmallExampleMatchesPairCount) {
  const Labels labels{0, 1, 1, 0};
  const Scores scores{0.1, 0.4, 0.8, 0.5};
  const double oracle = testkit::brute_force_auc(labels, scores);
  EXPECT_EQ(oracle, 0.75);
  EXPECT_EQ(db::auc(labels, scores), oracle);
}

TEST(Auc, Errors) {
  EXPECT_THROW(db::auc(Labels{1, 1}, Scores{0.1, 0.2}), db::UndefinedAucError);
  EXPECT_THROW(db::auc(Labels{}, Scores{}), db::UndefinedAucError);
  EXPECT_THROW(db::auc(Labels{0, 1}, Scores{0.1}), std::invalid_argument);
  EXPECT_THROW(db::auc(Labels{0, 1}, Scores{0.1, std::nan("")}), std::invalid_argument);
}

struct Instance {
  Labels labels;
  Scores scores;
};

Instance random_instance(std::mt19937_64& rng, bool ties) {
  const std::size_t n = 2 + rng() % 199;
  Instance in{Labels(n), Scores(n)};
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (std::size_t i = 0; i < n; ++i) {
    in.labels[i] = static_cast<db::Label>(rng() % 2);
    in.scores[i] = ties ? std::round(u(rng) * 2.0) / 2.0 : u(rng);
  }
  in.labels[0] = 0;
  in.labels[n - 1] = 1;
  return in;
}

TEST(Auc, EqualsBruteForceWithTies) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 1000; ++t) {
    const auto in = random_instance(rng, t % 2 == 0);
    ASSERT_NEAR(db::auc(in.labels, in.scores), testkit::brute_force_auc(in.labels, in.scores),
                1e-12);
  }
}

TEST(Auc, InvariantUnderIncreasingTransform) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 300; ++t) {
    const auto in = random_instance(rng, t % 3 == 0);
    Scores transformed(in.scores.size());
    for (std::size_t i = 0; i < in.scores.size(); ++i) {
      transformed[i] = std::exp(in.scores[i]) * 7.0 - 2.0;
    }
    ASSERT_EQ(db::auc(in.labels, in.scores), db::auc(in.labels, transformed));
  }
}

TEST(Auc, NegatedScoresComplement) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 300; ++t) {
    const auto in = random_instance(rng, false);
    Scores negated(in.scores.size());
    for (std::size_t i = 0; i < in.scores.size(); ++i) negated[i] = -in.scores[i];
    ASSERT_NEAR(db::auc(in.labels, in.scores) + db::auc(in.labels, negated), 1.0, 1e-12);
  }
}

TEST(ScoreBlock, SingleClassIsDegenerate) {
  const auto s = db::score_block(3, Labels{1, 1, 1}, Scores{0.1, 0.2, 0.3}, 0.5);
  EXPECT_EQ(s.auc, db::kDegenerateBlockAuc);
  EXPECT_TRUE(s.degenerate);
  EXPECT_EQ(s.block, 3u);
  const auto t = db::score_block(1, Labels{0, 1}, Scores{0.1, 0.2}, 0.5);
  EXPECT_FALSE(t.degenerate);
  EXPECT_EQ(t.auc, 1.0);
}

TEST(AggregateDataset, MeanWithinBudget) {
  const auto s = db::aggregate_dataset("x", {{1, 0.6, 1.0, false}, {2, 0.8, 1.0, false}}, 600.0);
  EXPECT_DOUBLE_EQ(s.mean_auc, 0.7);
  EXPECT_FALSE(s.disqualified);
  EXPECT_EQ(s.total_elapsed_seconds, 2.0);
}

TEST(AggregateDataset, OverBudgetDisqualifies) {
  const auto s =
      db::aggregate_dataset("B", {{1, 0.9, 300.0, false}, {2, 0.9, 301.0, false}}, 600.0);
  EXPECT_EQ(s.mean_auc, 0.0);
  EXPECT_TRUE(s.disqualified);
  EXPECT_EQ(s.total_elapsed_seconds, 601.0);
}

TEST(AggregateDataset, SingleBlock) {
  const auto s = db::aggregate_dataset("x", {{1, 0.55, 0.1, false}}, 10.0);
  EXPECT_EQ(s.mean_auc, 0.55);
}

}  // namespace

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

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "driftbench/data.hpp"
#include "driftbench/encoding.hpp"
#include "testkit.hpp"

namespace {

namespace db = driftbench;
using testkit::TempDir;

db::DriftGenSpec b_analog(std::uint64_t seed) {
  db::DriftGenSpec s;
  s.rows = 4000;
  s.categorical = 17;
  s.numerical = 7;
  s.multi_valued = 1;
  s.time = 0;
  s.drift = db::DriftProfile::Gradual;
  s.magnitude = 1.0;
  s.seed = seed;
  return s;
}

TEST(Generator, DeterministicForEqualSpecs) {
  const auto a = db::generate_drift_stream(b_analog(9));
  const auto b = db::generate_drift_stream(b_analog(9));
  EXPECT_EQ(a, b);
  const auto c = db::generate_drift_stream(b_analog(10));
  EXPECT_NE(a.rows, c.rows);
}

TEST(Generator, DatasetBAnalogRoundTripsByteForByte) {
  TempDir dir;
  const auto ds = db::generate_drift_stream(b_analog(3));
  EXPECT_EQ(ds.schema.size(), 25u);
  EXPECT_EQ(ds.schema.count(db::FeatureKind::Categorical), 17u);
  EXPECT_EQ(ds.schema.count(db::FeatureKind::Numerical), 7u);
  EXPECT_EQ(ds.schema.count(db::FeatureKind::MultiValuedCategorical), 1u);
  EXPECT_EQ(ds.schema.count(db::FeatureKind::Time), 0u);

  db::write_dataset(ds, dir.path() / "b.csv", dir.path() / "b.schema.csv");
  const auto loaded = db::load_dataset(dir.path() / "b.csv", dir.path() / "b.schema.csv");
  EXPECT_EQ(loaded.rows, ds.rows);
  EXPECT_EQ(loaded.labels, ds.labels);
  EXPECT_EQ(loaded.schema, ds.schema);
  db::write_dataset(loaded, dir.path() / "b2.csv", dir.path() / "b2.schema.csv");
  EXPECT_EQ(testkit::read_file(dir.path() / "b.csv"), testkit::read_file(dir.path() / "b2.csv"));
  EXPECT_EQ(testkit::read_file(dir.path() / "b.schema.csv"),
            testkit::read_file(dir.path() / "b2.schema.csv"));
}

TEST(Generator, TimeColumnsAreNonDecreasingIntegers) {
  db::DriftGenSpec s;
  s.rows = 3000;
  s.numerical = 1;
  s.time = 3;
  s.seed = 5;
  const auto ds = db::generate_drift_stream(s);
  for (std::size_t c = 0; c < ds.schema.size(); ++c) {
    if (ds.schema[c].kind != db::FeatureKind::Time) continue;
    long long previous = std::numeric_limits<long long>::min();
    for (const auto& row : ds.rows) {
      std::size_t used = 0;
      const long long v = std::stoll(row[c], &used);
      ASSERT_EQ(used, row[c].size()) << row[c];
      ASSERT_GE(v, previous);
      previous = v;
    }
  }
}

TEST(Generator, MultiValuedCellsHoldDistinctTokens) {
  db::DriftGenSpec s;
  s.rows = 2000;
  s.numerical = 1;
  s.multi_valued = 2;
  s.cardinality = 30;
  s.seed = 2;
  const auto ds = db::generate_drift_stream(s);
  bool saw_empty = false, saw_multi = false;
  for (std::size_t c = 0; c < ds.schema.size(); ++c) {
    if (ds.schema[c].kind != db::FeatureKind::MultiValuedCategorical) continue;
    for (const auto& row : ds.rows) {
      const auto tokens = db::split_tokens(row[c]);
      ASSERT_LE(tokens.size(), 3u);
      ASSERT_EQ(std::set<std::string>(tokens.begin(), tokens.end()).size(), tokens.size());
      saw_empty |= tokens.empty();
      saw_multi |= tokens.size() > 1;
    }
  }
  EXPECT_TRUE(saw_empty);
  EXPECT_TRUE(saw_multi);
}

TEST(Generator, LabelsAreBinaryAndBalancedEnough) {
  const auto ds = db::generate_drift_stream(b_analog(4));
  const auto positives = std::count(ds.labels.begin(), ds.labels.end(), 1);
  EXPECT_GT(positives, static_cast<long>(ds.size() / 5));
  EXPECT_LT(positives, static_cast<long>(4 * ds.size() / 5));
}

TEST(Generator, RejectsInvalidSpecs) {
  db::DriftGenSpec s;
  s.blocks = 1;
  EXPECT_THROW(db::generate_drift_stream(s), std::invalid_argument);
  s = {};
  s.exponent = 0.0;
  EXPECT_THROW(db::generate_drift_stream(s), std::invalid_argument);
  s = {};
  s.numerical = 0;
  EXPECT_THROW(db::generate_drift_stream(s), std::invalid_argument);
  s = {};
  s.rows = 5;
  s.blocks = 6;
  EXPECT_THROW(db::generate_drift_stream(s), std::invalid_argument);
}

class PowerLaw : public ::testing::TestWithParam<double> {};

// Log-log frequency-rank slope of a generated column over ranks 1..20.
TEST_P(PowerLaw, SlopeMatchesExponent) {
  const double exponent = GetParam();
  db::DriftGenSpec s;
  s.rows = 100000;
  s.numerical = 0;
  s.categorical = 1;
  s.cardinality = 100;
  s.exponent = exponent;
  s.seed = 17;
  const auto ds = db::generate_drift_stream(s);
  std::map<std::string, std::size_t> counts;
  for (const auto& row : ds.rows) ++counts[row[0]];
  std::vector<std::size_t> desc;
  for (const auto& [value, n] : counts) desc.push_back(n);
  std::sort(desc.rbegin(), desc.rend());
  ASSERT_GE(desc.size(), 20u);
  EXPECT_NEAR(testkit::log_log_slope(desc, 20), -exponent, 0.3);
}

INSTANTIATE_TEST_SUITE_P(Exponents, PowerLaw, ::testing::Values(0.7, 1.0, 1.5));

// A model trained on the start of a stationary stream scores the same on
// the rest of the first half and on the second half.
TEST(GeneratorDrift, NoDriftHalvesAgree) {
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto gap = testkit::half_gap(testkit::no_drift_spec(seed));
    total += std::abs(gap.held_out_auc - gap.second_half_auc);
  }
  EXPECT_LT(total / 10.0, 0.03);
}

// With an abrupt switch the same model loses at least 0.10 AUC after the
// middle block.
TEST(GeneratorDrift, AbruptDriftDegradesFrozenModel) {
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto gap = testkit::half_gap(testkit::abrupt_spec(seed));
    total += gap.held_out_auc - gap.second_half_auc;
  }
  EXPECT_GE(total / 10.0, 0.10);
}

}  // namespace

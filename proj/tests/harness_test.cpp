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

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <limits>
#include <mutex>
#include <thread>

#include <gtest/gtest.h>

#include "driftbench/harness.hpp"
#include "driftbench/predictors.hpp"
#include "testkit.hpp"

namespace {

namespace db = driftbench;
using namespace std::chrono_literals;

// Waits for `duration` or until stop is requested.
void interruptible_sleep(std::chrono::duration<double> duration, std::stop_token stop) {
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  cv.wait_for(lock, stop, duration, [] { return false; });
}

class SleepingPredictor : public db::Predictor {
 public:
  SleepingPredictor(int step, double seconds, bool cooperative)
      : step_(step), seconds_(seconds), cooperative_(cooperative) {}
  std::string id() const override { return "sleeper"; }
  void learn(const db::BlockView&, const db::CallContext& ctx) override {
    if (ctx.step != step_) return;
    if (cooperative_) {
      interruptible_sleep(std::chrono::duration<double>(seconds_), ctx.stop);
      if (ctx.stop.stop_requested()) throw db::BudgetExceeded("stopped");
    } else {
      std::this_thread::sleep_for(std::chrono::duration<double>(seconds_));
    }
  }
  std::vector<double> predict(const db::BlockView& b, const db::CallContext&) override {
    return std::vector<double>(b.rows.size(), 0.5);
  }

 private:
  int step_;
  double seconds_;
  bool cooperative_;
};

// Scores every test row with its true label.
class OraclePredictor : public db::Predictor {
 public:
  explicit OraclePredictor(const db::ChronoDataset& ds) : ds_(ds) {}
  std::string id() const override { return "oracle"; }
  void learn(const db::BlockView&, const db::CallContext&) override {}
  std::vector<double> predict(const db::BlockView& b, const db::CallContext&) override {
    std::vector<double> s;
    for (std::size_t i = 0; i < b.rows.size(); ++i) s.push_back(ds_.labels[b.first_row + i]);
    return s;
  }

 private:
  const db::ChronoDataset& ds_;
};

class FaultyPredictor : public db::Predictor {
 public:
  enum class Fault { Throw, ShortScores, NanScore };
  explicit FaultyPredictor(Fault fault) : fault_(fault) {}
  std::string id() const override { return "faulty"; }
  void learn(const db::BlockView&, const db::CallContext&) override {}
  std::vector<double> predict(const db::BlockView& b, const db::CallContext& ctx) override {
    if (ctx.step < 2) return std::vector<double>(b.rows.size(), 0.5);
    switch (fault_) {
      case Fault::Throw: throw std::runtime_error("boom");
      case Fault::ShortScores: return std::vector<double>(b.rows.size() - 1, 0.5);
      case Fault::NanScore: return std::vector<double>(b.rows.size(), std::nan(""));
    }
    return {};
  }

 private:
  Fault fault_;
};

TEST(RunLifelong, ThirtyRowsThreeBlocks) {
  const auto ds = testkit::row_id_dataset(30, 1);
  const auto plan = db::split_blocks(ds, 3);
  testkit::RecordingPredictor p;
  const auto trace = db::run_lifelong(ds, plan, p, 10.0, "tiny");
  ASSERT_EQ(p.observations.size(), 2u);
  EXPECT_EQ(p.observations[0].train_first, 0u);
  EXPECT_EQ(p.observations[0].train_rows, 10u);
  EXPECT_EQ(p.observations[0].test_first, 10u);
  EXPECT_EQ(p.observations[1].train_first, 10u);
  EXPECT_EQ(p.observations[1].test_first, 20u);
  EXPECT_EQ(p.observations[1].test_rows, 10u);
  EXPECT_EQ(trace.outcome, db::Outcome::Completed);
  ASSERT_EQ(trace.steps.size(), 2u);
  EXPECT_EQ(trace.steps[0].rows_trained, 10u);
  EXPECT_EQ(trace.steps[1].rows_trained, 20u);
  EXPECT_EQ(trace.steps[1].block_predicted, 2u);
  EXPECT_EQ(trace.dataset, "tiny");
  EXPECT_EQ(trace.predictor, "recorder");
}

TEST(RunLifelong, RevealMonotonicityTenBlocks) {
  const auto ds = testkit::row_id_dataset(1003, 2);
  const auto plan = db::split_blocks(ds, 10);
  testkit::RecordingPredictor p;
  db::run_lifelong(ds, plan, p, 10.0);
  EXPECT_EQ(testkit::check_reveal_monotonicity(p.observations, plan), "");
}

TEST(RunLifelong, OraclePredictorScoresOne) {
  const auto ds = testkit::row_id_dataset(500, 3);
  const auto plan = db::split_blocks(ds, 10);
  OraclePredictor p(ds);
  const auto trace = db::run_lifelong(ds, plan, p, 10.0);
  ASSERT_EQ(trace.steps.size(), 9u);
  for (const auto& s : trace.steps) EXPECT_EQ(s.score.auc, 1.0);
  EXPECT_EQ(db::score_trace(trace).mean_auc, 1.0);
}

TEST(RunLifelong, CooperativeSleeperTimesOut) {
  const auto ds = testkit::row_id_dataset(100, 4);
  const auto plan = db::split_blocks(ds, 10);
  const double budget = 1.0;
  SleepingPredictor p(1, budget + 1.0, true);
  const auto start = std::chrono::steady_clock::now();
  const auto trace = db::run_lifelong(ds, plan, p, budget);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(trace.outcome, db::Outcome::TimedOut);
  EXPECT_LT(wall, budget + 0.5);
  const auto score = db::score_trace(trace);
  EXPECT_EQ(score.mean_auc, 0.0);
  EXPECT_TRUE(score.disqualified);
}

TEST(RunLifelong, UncooperativeSleeperStillDisqualified) {
  const auto ds = testkit::row_id_dataset(100, 4);
  const auto plan = db::split_blocks(ds, 10);
  SleepingPredictor p(3, 0.6, false);
  const auto trace = db::run_lifelong(ds, plan, p, 0.4);
  EXPECT_EQ(trace.outcome, db::Outcome::TimedOut);
  EXPECT_TRUE(db::score_trace(trace).disqualified);
  EXPECT_EQ(trace.steps.size(), 2u);
}

TEST(RunLifelong, PredictorFaults) {
  const auto ds = testkit::row_id_dataset(100, 5);
  const auto plan = db::split_blocks(ds, 10);
  for (auto fault : {FaultyPredictor::Fault::Throw, FaultyPredictor::Fault::ShortScores,
                     FaultyPredictor::Fault::NanScore}) {
    FaultyPredictor p(fault);
    const auto trace = db::run_lifelong(ds, plan, p, 10.0);
    EXPECT_EQ(trace.outcome, db::Outcome::PredictorError);
    EXPECT_EQ(trace.steps.size(), 1u);
    EXPECT_FALSE(trace.message.empty());
    const auto score = db::score_trace(trace);
    EXPECT_TRUE(score.disqualified);
    EXPECT_EQ(score.mean_auc, 0.0);
  }
}

// Staging time is not charged to the predictor.
TEST(RunLifelong, StagingIsUntimed) {
  class SlowStager : public db::ConstantPredictor {
   public:
    void stage(int, const db::BlockView*, const db::BlockView&) override {
      std::this_thread::sleep_for(100ms);
    }
  };
  const auto ds = testkit::row_id_dataset(100, 6);
  const auto plan = db::split_blocks(ds, 10);
  SlowStager p;
  const auto trace = db::run_lifelong(ds, plan, p, 0.5);
  EXPECT_EQ(trace.outcome, db::Outcome::Completed);
  EXPECT_LT(trace.total_elapsed_seconds, 0.5);
  double sum = 0.0;
  for (const auto& s : trace.steps) {
    EXPECT_GE(s.score.elapsed_seconds, 0.0);
    sum += s.score.elapsed_seconds;
  }
  EXPECT_NEAR(sum, trace.total_elapsed_seconds, 1e-9);
}

TEST(RunLifelong, DegenerateBlockFlagged) {
  auto ds = testkit::row_id_dataset(40, 7);
  for (std::size_t r = 20; r < 30; ++r) ds.labels[r] = 1;
  const auto plan = db::split_blocks(ds, 4);
  db::ConstantPredictor p;
  const auto trace = db::run_lifelong(ds, plan, p, 10.0);
  ASSERT_EQ(trace.steps.size(), 3u);
  EXPECT_TRUE(trace.steps[1].score.degenerate);
  EXPECT_EQ(trace.steps[1].score.auc, 0.5);
  EXPECT_FALSE(trace.steps[0].score.degenerate);
}

TEST(RunLifelong, Preconditions) {
  const auto ds = testkit::row_id_dataset(40, 7);
  db::ConstantPredictor p;
  EXPECT_THROW(db::run_lifelong(ds, db::split_blocks(30, 3), p, 1.0), db::PlanError);
  EXPECT_THROW(db::run_lifelong(ds, db::split_blocks(ds, 4), p, 0.0), std::invalid_argument);
  auto unlabeled = ds;
  unlabeled.labels.clear();
  EXPECT_THROW(db::run_lifelong(unlabeled, db::split_blocks(ds, 4), p, 1.0),
               std::invalid_argument);
}

void expect_same_except_timing(const db::EvaluationTrace& a, const db::EvaluationTrace& b) {
  ASSERT_EQ(a.steps.size(), b.steps.size());
  EXPECT_EQ(a.outcome, b.outcome);
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    EXPECT_EQ(a.steps[i].score.auc, b.steps[i].score.auc);
    EXPECT_EQ(a.steps[i].rows_trained, b.steps[i].rows_trained);
    EXPECT_EQ(a.steps[i].score.degenerate, b.steps[i].score.degenerate);
  }
}

TEST(RunLifelong, DeterministicWithBaseline) {
  auto spec = testkit::no_drift_spec(2);
  spec.rows = 2000;
  const auto ds = db::generate_drift_stream(spec);
  const auto plan = db::split_blocks(ds, 10);
  db::BaselinePredictor a, b;
  expect_same_except_timing(db::run_lifelong(ds, plan, a, 60.0),
                            db::run_lifelong(ds, plan, b, 60.0));
}

db::PhaseConfig desk_suite() {
  db::PhaseConfig phase;
  const std::vector<std::array<std::size_t, 4>> shapes{
      {51, 23, 6, 2}, {17, 7, 1, 0}, {44, 20, 9, 6}, {17, 54, 1, 4}, {25, 6, 1, 2}};
  const std::vector<db::DriftProfile> drifts{db::DriftProfile::Gradual, db::DriftProfile::None,
                                             db::DriftProfile::Abrupt, db::DriftProfile::Gradual,
                                             db::DriftProfile::Abrupt};
  for (std::size_t i = 0; i < 5; ++i) {
    db::DriftGenSpec s;
    s.rows = 1500;
    s.categorical = shapes[i][0];
    s.numerical = shapes[i][1];
    s.multi_valued = shapes[i][2];
    s.time = shapes[i][3];
    s.drift = drifts[i];
    s.magnitude = 1.0;
    s.seed = 100 + i;
    phase.datasets.push_back({std::string(1, static_cast<char>('A' + i)), {}, {}, 60.0,
                              [s] { return db::generate_drift_stream(s); }});
  }
  return phase;
}

TEST(RunSuite, EmptyPhase) {
  const auto result = db::run_suite(db::PhaseConfig{}, [](std::string_view) {
    return std::make_unique<db::ConstantPredictor>();
  });
  EXPECT_TRUE(result.scores.empty());
  EXPECT_EQ(result.total_duration_seconds, 0.0);
}

// Regression values recorded from the first run of this suite.
TEST(RunSuite, BaselineOnDeskSuite) {
  const auto result = db::run_suite(desk_suite(), [](std::string_view) {
    return std::make_unique<db::BaselinePredictor>();
  });
  ASSERT_EQ(result.scores.size(), 5u);
  const std::vector<double> pinned{0.619945542215, 0.670039346735, 0.565356157819,
                                   0.708981315128, 0.633203041434};
  double total = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(result.traces[i].outcome, db::Outcome::Completed) << result.traces[i].message;
    EXPECT_FALSE(result.scores[i].disqualified);
    EXPECT_NEAR(result.scores[i].mean_auc, pinned[i], 1e-9) << result.scores[i].dataset;
    total += result.traces[i].total_elapsed_seconds;
  }
  EXPECT_DOUBLE_EQ(result.total_duration_seconds, total);
}

TEST(RunSuite, TimeoutIsIsolated) {
  auto phase = desk_suite();
  phase.datasets[2].budget_seconds = 0.5;
  const auto result = db::run_suite(phase, [](std::string_view id) -> std::unique_ptr<db::Predictor> {
    if (id == "C") return std::make_unique<SleepingPredictor>(1, 1000.0, true);
    return std::make_unique<db::ConstantPredictor>();
  });
  ASSERT_EQ(result.scores.size(), 5u);
  int disqualified = 0;
  for (const auto& s : result.scores) disqualified += s.disqualified ? 1 : 0;
  EXPECT_EQ(disqualified, 1);
  EXPECT_EQ(result.traces[2].outcome, db::Outcome::TimedOut);
}

TEST(RunSuite, LoadFailureBecomesPredictorError) {
  auto phase = desk_suite();
  phase.datasets[1].load = nullptr;
  phase.datasets[1].data = "/nonexistent/data.csv";
  phase.datasets[1].schema = "/nonexistent/schema.csv";
  const auto result = db::run_suite(phase, [](std::string_view) {
    return std::make_unique<db::ConstantPredictor>();
  });
  EXPECT_EQ(result.traces[1].outcome, db::Outcome::PredictorError);
  EXPECT_NE(result.traces[1].message.find("B"), std::string::npos);
  EXPECT_TRUE(result.scores[1].disqualified);
  EXPECT_FALSE(result.scores[0].disqualified);
}

TEST(RunSuite, ParallelJobsMatchSequential) {
  auto phase = desk_suite();
  auto factory = [](std::string_view) { return std::make_unique<db::BaselinePredictor>(); };
  const auto sequential = db::run_suite(phase, factory);
  phase.jobs = 3;
  const auto parallel = db::run_suite(phase, factory);
  ASSERT_EQ(parallel.traces.size(), sequential.traces.size());
  for (std::size_t i = 0; i < parallel.traces.size(); ++i) {
    EXPECT_EQ(parallel.scores[i].dataset, sequential.scores[i].dataset);
    expect_same_except_timing(parallel.traces[i], sequential.traces[i]);
  }
}

TEST(Phase, Names) {
  EXPECT_EQ(db::phase_from_string("feedback"), db::Phase::Feedback);
  EXPECT_EQ(db::phase_from_string(db::to_string(db::Phase::Final)), db::Phase::Final);
  EXPECT_FALSE(db::phase_from_string("practice").has_value());
}

}  // namespace

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
#include <fstream>

#include <gtest/gtest.h>

#include "driftbench/harness.hpp"
#include "driftbench/predictors.hpp"
#include "testkit.hpp"

namespace {

namespace db = driftbench;
using testkit::TempDir;

db::EvaluationTrace run_fixture(const std::string& script, double budget = 30.0) {
  TempDir dir("subprocess");
  const auto ds = testkit::row_id_dataset(200, 1);
  db::SubprocessPredictor p(testkit::fixture_dir() / script, dir.path());
  return db::run_lifelong(ds, db::split_blocks(ds, 10), p, budget, script);
}

TEST(SubprocessPredictor, EchoScoresHalfEverywhere) {
  const auto trace = run_fixture("echo_predictor.sh");
  ASSERT_EQ(trace.outcome, db::Outcome::Completed) << trace.message;
  ASSERT_EQ(trace.steps.size(), 9u);
  for (const auto& s : trace.steps) EXPECT_EQ(s.score.auc, 0.5);
  EXPECT_EQ(trace.predictor, "echo_predictor.sh");
}

TEST(SubprocessPredictor, MalformedOutputIsPredictorError) {
  for (const char* script : {"short_predictor.sh", "nan_predictor.sh", "fail_predictor.sh"}) {
    const auto trace = run_fixture(script);
    EXPECT_EQ(trace.outcome, db::Outcome::PredictorError) << script;
    EXPECT_TRUE(trace.steps.empty()) << script;
    EXPECT_FALSE(trace.message.empty());
    EXPECT_TRUE(db::score_trace(trace).disqualified);
  }
  EXPECT_NE(run_fixture("fail_predictor.sh").message.find("code 3"), std::string::npos);
}

TEST(SubprocessPredictor, MissingExecutableIsPredictorError) {
  TempDir dir;
  const auto ds = testkit::row_id_dataset(50, 1);
  db::SubprocessPredictor p(dir.path() / "no-such-predictor", dir.path() / "work");
  const auto trace = db::run_lifelong(ds, db::split_blocks(ds, 5), p, 5.0);
  EXPECT_EQ(trace.outcome, db::Outcome::PredictorError);
}

TEST(SubprocessPredictor, SleeperKilledAtBudget) {
  const double budget = 1.0;
  const auto start = std::chrono::steady_clock::now();
  const auto trace = run_fixture("sleep_predictor.sh", budget);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(trace.outcome, db::Outcome::TimedOut);
  EXPECT_LT(wall, budget + 2.0);
  const auto score = db::score_trace(trace);
  EXPECT_EQ(score.mean_auc, 0.0);
  EXPECT_TRUE(score.disqualified);
}

TEST(SubprocessPredictor, StateDirectoryPersistsAcrossSteps) {
  TempDir dir;
  const auto ds = testkit::row_id_dataset(100, 2);
  const auto plan = db::split_blocks(ds, 10);
  db::SubprocessPredictor p(testkit::tool_path("protocol_probe"), dir.path());
  ASSERT_EQ(db::run_lifelong(ds, plan, p, 30.0).outcome, db::Outcome::Completed);
  const auto obs = testkit::read_probe_log(dir.path() / "state" / "probe.log");
  EXPECT_EQ(obs.size(), 9u);
  EXPECT_EQ(testkit::check_reveal_monotonicity(obs, plan), "");
}

TEST(RunProcess, ExitCodeAndKill) {
  TempDir dir;
  const auto ok = db::run_process({"/bin/sh", "-c", "exit 4"}, 5.0, dir.path() / "log");
  EXPECT_EQ(ok.status, db::ProcessStatus::Exited);
  EXPECT_EQ(ok.exit_code, 4);
  // The child shell's own children are in the same group and die with it.
  const auto killed =
      db::run_process({"/bin/sh", "-c", "sleep 30 & sleep 30"}, 0.3, dir.path() / "log");
  EXPECT_EQ(killed.status, db::ProcessStatus::Killed);
  EXPECT_LT(killed.elapsed_seconds, 2.0);
  const auto missing = db::run_process({(dir.path() / "absent").string()}, 1.0, dir.path() / "log");
  EXPECT_NE(missing.status, db::ProcessStatus::Killed);
  EXPECT_NE(missing.exit_code, 0);
}

TEST(RunProcess, OutputGoesToLog) {
  TempDir dir;
  db::run_process({"/bin/sh", "-c", "echo hello; echo oops >&2"}, 5.0, dir.path() / "log");
  const auto log = testkit::read_file(dir.path() / "log");
  EXPECT_NE(log.find("hello"), std::string::npos);
  EXPECT_NE(log.find("oops"), std::string::npos);
}

TEST(ReadPredictions, ParsesAndRejects) {
  TempDir dir;
  const auto write = [&](const std::string& text) {
    std::ofstream(dir.path() / "p.txt") << text;
    return dir.path() / "p.txt";
  };
  EXPECT_EQ(db::read_predictions(write("0.25\n 1e-3 \n\n-2\n"), 3),
            (std::vector<double>{0.25, 1e-3, -2.0}));
  EXPECT_THROW(db::read_predictions(write("0.1\n0.2\n"), 3), std::runtime_error);
  EXPECT_THROW(db::read_predictions(write("0.1\nabc\n0.2\n"), 3), std::runtime_error);
  EXPECT_THROW(db::read_predictions(write("0.1\ninf\n0.2\n"), 3), std::runtime_error);
  EXPECT_THROW(db::read_predictions(write("0.1\n0.2\n0.3\n0.4\n"), 3), std::runtime_error);
  EXPECT_THROW(db::read_predictions(dir.path() / "absent.txt", 1), std::runtime_error);
}

// The reference executable replays its history into the same baseline, so
// its scores match the in-process predictor.
TEST(ReferencePredictor, MatchesInProcessBaseline) {
  db::DriftGenSpec spec;
  spec.rows = 1500;
  spec.categorical = 3;
  spec.numerical = 3;
  spec.multi_valued = 1;
  spec.time = 1;
  spec.cardinality = 20;
  spec.drift = db::DriftProfile::Gradual;
  spec.magnitude = 1.0;
  spec.seed = 31;
  const auto ds = db::generate_drift_stream(spec);
  const auto plan = db::split_blocks(ds, 10);

  db::BaselineOptions options;
  options.model.seed = 7;
  db::BaselinePredictor in_process(options);
  const auto expected = db::run_lifelong(ds, plan, in_process, 120.0);

  TempDir dir;
  db::SubprocessPredictor external(DRIFTBENCH_REFERENCE, dir.path(), {"--seed", "7"});
  const auto actual = db::run_lifelong(ds, plan, external, 120.0);
  ASSERT_EQ(actual.outcome, db::Outcome::Completed) << actual.message;
  ASSERT_EQ(actual.steps.size(), expected.steps.size());
  for (std::size_t i = 0; i < actual.steps.size(); ++i) {
    EXPECT_NEAR(actual.steps[i].score.auc, expected.steps[i].score.auc, 1e-12) << i;
  }
}

}  // namespace

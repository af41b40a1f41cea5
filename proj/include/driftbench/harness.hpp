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

// Lifelong predict-then-reveal evaluation.
//
// For a plan of N blocks, step k = 1..N-1 reveals the labels of block k-1 to
// the predictor (learn), then asks for scores on block k (predict) and scores
// them by AUC. The predictor keeps its own history: learn only ever receives
// the newly revealed block. The time spent inside learn and predict counts
// against a per-dataset budget; overrunning it, crashing, or returning
// malformed scores zeroes the dataset.

#ifndef DRIFTBENCH_HARNESS_HPP_
#define DRIFTBENCH_HARNESS_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "driftbench/data.hpp"
#include "driftbench/metrics.hpp"

namespace driftbench {

// Rows of one block, labeled or not. `first_row` is the index of rows[0] in
// the dataset.
struct BlockView {
  const FeatureSchema& schema;
  std::span<const Row> rows;
  std::span<const Label> labels;
  std::size_t block = 0;
  std::size_t first_row = 0;
};

struct CallContext {
  int step = 0;
  double remaining_seconds = 0.0;
  // Requested when the budget expires. In-process predictors must return
  // promptly once it is set; subprocess predictors are killed instead.
  std::stop_token stop;
};

// Thrown by predictors whose budget expired mid-call.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual std::string id() const = 0;

  // Untimed hook called before each step's learn/predict, for I/O that
  // should not count against the budget. `train` is absent only if a
  // predictor is asked to predict without new labels.
  virtual void stage(int /*step*/, const BlockView* /*train*/, const BlockView& /*test*/) {}

  virtual void learn(const BlockView& block, const CallContext& ctx) = 0;
  // One finite score per row of `block`.
  virtual std::vector<double> predict(const BlockView& block, const CallContext& ctx) = 0;
};

using PredictorFactory = std::function<std::unique_ptr<Predictor>(std::string_view dataset)>;

enum class Outcome { Completed, TimedOut, PredictorError };

std::string_view to_string(Outcome outcome);

struct StepRecord {
  int step = 0;
  // Labeled rows revealed so far, i.e. blocks 0..step-1.
  std::size_t rows_trained = 0;
  std::size_t block_predicted = 0;
  BlockScore score;
};

struct EvaluationTrace {
  std::string dataset;
  std::string predictor;
  std::vector<StepRecord> steps;
  double total_elapsed_seconds = 0.0;
  double budget_seconds = 0.0;
  Outcome outcome = Outcome::Completed;
  std::string message;
};

// Mean AUC over the scored test blocks; zero and disqualified unless the
// trace completed within budget.
DatasetScore score_trace(const EvaluationTrace& trace);

EvaluationTrace run_lifelong(const ChronoDataset& dataset, const BlockPlan& plan,
                             Predictor& predictor, double budget_seconds,
                             std::string dataset_id = {});

enum class Phase { Feedback, Final };

std::string_view to_string(Phase phase);
std::optional<Phase> phase_from_string(std::string_view name);

struct DatasetEntry {
  std::string id;
  std::filesystem::path data;
  std::filesystem::path schema;
  double budget_seconds = 0.0;
  // Used instead of the files when set.
  std::function<ChronoDataset()> load;
};

struct PhaseConfig {
  Phase phase = Phase::Feedback;
  std::vector<DatasetEntry> datasets;
  std::size_t block_count = kDefaultBlockCount;
  // Informational only; not enforced.
  int daily_submission_cap = 2;
  // Datasets evaluated concurrently.
  std::size_t jobs = 1;

  void validate() const;
};

struct SuiteResult {
  std::vector<EvaluationTrace> traces;
  std::vector<DatasetScore> scores;
  // Sum of per-dataset elapsed time; the leaderboard tie-breaker.
  double total_duration_seconds = 0.0;
};

// Evaluates a fresh predictor from `factory` on every dataset, in order.
// Failures stay local to their dataset.
SuiteResult run_suite(const PhaseConfig& phase, const PredictorFactory& factory);

// ---------------------------------------------------------------------------
// External predictors.
//
// Per step the harness writes train.csv (newly revealed block, with label),
// test.csv (block to predict, no label) and schema.csv into
// <workdir>/step_<k>/ and runs
//
//   <exe> --train <path> --test <path> --schema <path> --pred-out <path>
//         --remaining-budget <seconds> --step <k> --workdir <path>
//
// where --workdir is <workdir>/state, kept across steps. Exit code 0 means
// success; the predictions file holds one decimal score per line in test-row
// order. The process group is killed when the remaining budget runs out.
// ---------------------------------------------------------------------------

class SubprocessPredictor : public Predictor {
 public:
  SubprocessPredictor(std::filesystem::path executable, std::filesystem::path workdir,
                      std::vector<std::string> extra_args = {});

  std::string id() const override { return executable_.filename().string(); }
  void stage(int step, const BlockView* train, const BlockView& test) override;
  void learn(const BlockView& block, const CallContext& ctx) override;
  std::vector<double> predict(const BlockView& block, const CallContext& ctx) override;

  const std::filesystem::path& workdir() const { return workdir_; }

 private:
  std::filesystem::path step_dir(int step) const;

  std::filesystem::path executable_;
  std::filesystem::path workdir_;
  std::vector<std::string> extra_args_;
  int staged_step_ = -1;
};

enum class ProcessStatus { Exited, Killed, LaunchFailed };

struct ProcessResult {
  ProcessStatus status = ProcessStatus::LaunchFailed;
  int exit_code = -1;
  double elapsed_seconds = 0.0;
};

// Runs argv[0] with the given arguments in its own process group, stdout and
// stderr appended to `log_path`. Kills the group with SIGKILL once
// `timeout_seconds` pass or `stop` is requested.
ProcessResult run_process(const std::vector<std::string>& argv, double timeout_seconds,
                          const std::filesystem::path& log_path, std::stop_token stop = {});

// Reads one score per line; throws std::runtime_error on a short file,
// unparseable line or non-finite value.
std::vector<double> read_predictions(const std::filesystem::path& path, std::size_t expected);

}  // namespace driftbench

#endif  // DRIFTBENCH_HARNESS_HPP_

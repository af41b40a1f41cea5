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

#include "driftbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <future>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace driftbench {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CallResult {
  double elapsed_seconds = 0.0;
  bool timed_out = false;
  std::string error;
};

// Runs `call` on a worker thread and waits at most `remaining` seconds. On
// expiry the stop token is triggered and the worker joined; cooperative
// predictors return promptly, subprocess predictors kill their child.
template <typename Call>
CallResult timed_call(Call&& call, int step, double remaining) {
  CallResult result;
  std::stop_source stop;
  std::promise<void> done;
  auto finished = done.get_future();
  const auto start = Clock::now();
  {
    std::jthread worker([&] {
      try {
        call(CallContext{step, remaining, stop.get_token()});
        done.set_value();
      } catch (...) {
        done.set_exception(std::current_exception());
      }
    });
    const auto budget = std::chrono::duration<double>(std::max(0.0, remaining));
    if (finished.wait_for(budget) != std::future_status::ready) {
      stop.request_stop();
      result.timed_out = true;
    }
  }
  result.elapsed_seconds = seconds_since(start);
  if (result.timed_out) {
    result.elapsed_seconds = std::max(result.elapsed_seconds, remaining);
    return result;
  }
  try {
    finished.get();
  } catch (const BudgetExceeded&) {
    result.timed_out = true;
  } catch (const std::exception& e) {
    result.error = e.what();
  } catch (...) {
    result.error = "unknown exception";
  }
  return result;
}

BlockView view_of(const ChronoDataset& dataset, const BlockPlan& plan, std::size_t block,
                  bool with_labels) {
  const auto& range = plan[block];
  BlockView v{dataset.schema, {dataset.rows.data() + range.begin, range.size()}, {}, block,
              range.begin};
  if (with_labels) v.labels = {dataset.labels.data() + range.begin, range.size()};
  return v;
}

}  // namespace

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Completed: return "completed";
    case Outcome::TimedOut: return "timed-out";
    case Outcome::PredictorError: return "predictor-error";
  }
  return "?";
}

std::string_view to_string(Phase phase) {
  return phase == Phase::Feedback ? "feedback" : "final";
}

std::optional<Phase> phase_from_string(std::string_view name) {
  if (name == "feedback") return Phase::Feedback;
  if (name == "final") return Phase::Final;
  return std::nullopt;
}

DatasetScore score_trace(const EvaluationTrace& trace) {
  std::vector<BlockScore> blocks;
  blocks.reserve(trace.steps.size());
  for (const auto& s : trace.steps) blocks.push_back(s.score);
  auto score = aggregate_dataset(trace.dataset, std::move(blocks), trace.budget_seconds);
  score.total_elapsed_seconds = trace.total_elapsed_seconds;
  if (trace.outcome != Outcome::Completed ||
      trace.total_elapsed_seconds > trace.budget_seconds) {
    score.disqualified = true;
    score.mean_auc = 0.0;
  }
  return score;
}

EvaluationTrace run_lifelong(const ChronoDataset& dataset, const BlockPlan& plan,
                             Predictor& predictor, double budget_seconds,
                             std::string dataset_id) {
  if (plan.row_count() != dataset.size()) {
    throw PlanError(fmt::format("run_lifelong: plan covers {} rows, dataset has {}",
                                plan.row_count(), dataset.size()));
  }
  if (plan.block_count() < 2) throw PlanError("run_lifelong: need at least 2 blocks");
  if (!(budget_seconds > 0.0)) throw std::invalid_argument("run_lifelong: budget must be > 0");
  if (dataset.labels.size() != dataset.size()) {
    throw std::invalid_argument("run_lifelong: dataset must be labeled");
  }

  EvaluationTrace trace;
  trace.dataset = dataset_id.empty() ? dataset.provenance : std::move(dataset_id);
  trace.predictor = predictor.id();
  trace.budget_seconds = budget_seconds;

  double used = 0.0;
  std::size_t revealed = 0;
  auto fail = [&](Outcome outcome, std::string message) {
    trace.outcome = outcome;
    trace.message = std::move(message);
  };

  for (std::size_t k = 1; k < plan.block_count(); ++k) {
    const int step = static_cast<int>(k);
    const BlockView train = view_of(dataset, plan, k - 1, true);
    const BlockView test = view_of(dataset, plan, k, false);

    try {
      predictor.stage(step, &train, test);
    } catch (const std::exception& e) {
      fail(Outcome::PredictorError, fmt::format("step {}: staging failed: {}", step, e.what()));
      break;
    }

    const auto learned =
        timed_call([&](const CallContext& ctx) { predictor.learn(train, ctx); }, step,
                   budget_seconds - used);
    used += learned.elapsed_seconds;
    revealed += train.rows.size();
    if (learned.timed_out || used > budget_seconds) {
      fail(Outcome::TimedOut, fmt::format("step {}: budget of {} s exceeded during learn", step,
                                          budget_seconds));
      break;
    }
    if (!learned.error.empty()) {
      fail(Outcome::PredictorError, fmt::format("step {}: learn failed: {}", step, learned.error));
      break;
    }

    std::vector<double> scores;
    const auto predicted = timed_call(
        [&](const CallContext& ctx) { scores = predictor.predict(test, ctx); }, step,
        budget_seconds - used);
    used += predicted.elapsed_seconds;
    if (predicted.timed_out || used > budget_seconds) {
      fail(Outcome::TimedOut, fmt::format("step {}: budget of {} s exceeded during predict",
                                          step, budget_seconds));
      break;
    }
    if (!predicted.error.empty()) {
      fail(Outcome::PredictorError,
           fmt::format("step {}: predict failed: {}", step, predicted.error));
      break;
    }
    if (scores.size() != test.rows.size()) {
      fail(Outcome::PredictorError, fmt::format("step {}: {} scores for {} rows", step,
                                                scores.size(), test.rows.size()));
      break;
    }
    if (std::any_of(scores.begin(), scores.end(), [](double s) { return !std::isfinite(s); })) {
      fail(Outcome::PredictorError, fmt::format("step {}: non-finite score", step));
      break;
    }

    const auto& range = plan[k];
    const std::span<const Label> truth(dataset.labels.data() + range.begin, range.size());
    StepRecord record;
    record.step = step;
    record.rows_trained = revealed;
    record.block_predicted = k;
    record.score = score_block(k, truth, scores,
                               learned.elapsed_seconds + predicted.elapsed_seconds);
    trace.steps.push_back(record);
  }
  trace.total_elapsed_seconds = used;
  return trace;
}

void PhaseConfig::validate() const {
  if (block_count < 2) throw std::invalid_argument("phase: block_count must be >= 2");
  for (const auto& d : datasets) {
    if (!(d.budget_seconds > 0.0)) {
      throw std::invalid_argument(fmt::format("phase: dataset '{}' needs a positive budget", d.id));
    }
  }
}

SuiteResult run_suite(const PhaseConfig& phase, const PredictorFactory& factory) {
  phase.validate();
  const std::size_t n = phase.datasets.size();
  SuiteResult result;
  result.traces.resize(n);
  result.scores.resize(n);

  auto evaluate = [&](std::size_t i) {
    const auto& entry = phase.datasets[i];
    EvaluationTrace trace;
    trace.dataset = entry.id;
    trace.budget_seconds = entry.budget_seconds;
    try {
      const ChronoDataset dataset =
          entry.load ? entry.load() : load_dataset(entry.data, entry.schema);
      const BlockPlan plan = split_blocks(dataset, phase.block_count);
      auto predictor = factory(entry.id);
      if (!predictor) throw std::runtime_error("predictor factory returned nothing");
      trace = run_lifelong(dataset, plan, *predictor, entry.budget_seconds, entry.id);
    } catch (const std::exception& e) {
      trace.outcome = Outcome::PredictorError;
      trace.message = fmt::format("dataset '{}' could not be evaluated: {}", entry.id, e.what());
    }
    result.scores[i] = score_trace(trace);
    result.traces[i] = std::move(trace);
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(phase.jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) evaluate(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) evaluate(i);
      });
    }
  }
  for (const auto& t : result.traces) result.total_duration_seconds += t.total_elapsed_seconds;
  return result;
}

}  // namespace driftbench

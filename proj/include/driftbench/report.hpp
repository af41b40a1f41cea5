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

// JSON documents written by `evaluate` and read by `leaderboard`.
//
//   <dataset>.trace.json   dataset, predictor, budget_seconds, outcome,
//                          message, total_elapsed_seconds, steps[] of
//                          {step, rows_trained, block_predicted, auc,
//                           elapsed_seconds, degenerate}
//   <dataset>.score.json   dataset, mean_auc, disqualified,
//                          total_elapsed_seconds, blocks[] of
//                          {block, auc, elapsed_seconds, degenerate}
//   submission.json        team, bundle, phase, datasets[], duration_seconds
//
// Keys whose name contains "elapsed" or "duration" carry wall-clock time;
// everything else is deterministic for deterministic predictors.

#ifndef DRIFTBENCH_REPORT_HPP_
#define DRIFTBENCH_REPORT_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "driftbench/harness.hpp"
#include "driftbench/metrics.hpp"
#include "driftbench/ranking.hpp"

namespace driftbench {

using Json = nlohmann::ordered_json;

Json to_json(const EvaluationTrace& trace);
Json to_json(const DatasetScore& score);
DatasetScore dataset_score_from_json(const Json& j);

struct SubmissionInfo {
  std::string team;
  std::string bundle;
  std::string phase;
  std::vector<std::string> datasets;
  double duration_seconds = 0.0;
};

Json to_json(const SubmissionInfo& info);
SubmissionInfo submission_from_json(const Json& j);

// Writes the trace, score and submission files of one evaluated submission.
void write_submission(const std::filesystem::path& dir, const SubmissionInfo& info,
                      const SuiteResult& result);

// Reads submission.json and the <dataset>.score.json files it names.
// Throws std::runtime_error when a file is missing or malformed.
SubmissionEntry read_submission(const std::filesystem::path& dir,
                                std::vector<std::string>* datasets = nullptr);

Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

// Copy of `j` without the wall-clock keys.
Json strip_timing(const Json& j);

}  // namespace driftbench

#endif  // DRIFTBENCH_REPORT_HPP_

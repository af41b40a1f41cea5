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

// Run configuration and the three commands behind the `driftbench` tool.
// The config grammar is documented in README.md.

#ifndef DRIFTBENCH_CLI_HPP_
#define DRIFTBENCH_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "driftbench/data.hpp"
#include "driftbench/harness.hpp"
#include "driftbench/predictors.hpp"
#include "driftbench/report.hpp"

namespace driftbench {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetConfig {
  std::string id;
  Phase phase = Phase::Feedback;
  double budget_seconds = 0.0;
  // Either a generator spec or a pair of existing files.
  std::optional<DriftGenSpec> generate;
  std::filesystem::path data;
  std::filesystem::path schema;
};

struct PredictorConfig {
  std::string id;
  std::string bundle;
  // Built-in name ("baseline" or "constant"); empty for executables.
  std::string builtin;
  std::filesystem::path executable;
  std::vector<std::string> args;
  BaselineOptions baseline;
  double constant = 0.5;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "driftbench-out";
  std::size_t blocks = kDefaultBlockCount;
  std::vector<DatasetConfig> datasets;
  std::vector<PredictorConfig> predictors;

  const PredictorConfig* find_predictor(std::string_view id) const;
};

// Relative paths in the document resolve against `base_dir`. Generator
// seeds are derived from the top-level seed and the dataset position.
// Throws ConfigError.
RunConfig parse_run_config(const Json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

// Seed of the i-th derived stream of `seed` under `salt`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t index);

// Builds fresh predictors for one registration. Subprocess predictors get
// an isolated directory <workdir>/<phase>/<predictor>/<dataset>.
PredictorFactory make_factory(const RunConfig& config, const PredictorConfig& predictor,
                              Phase phase, const std::filesystem::path& workdir);

PhaseConfig make_phase(const RunConfig& config, Phase phase, std::size_t jobs);

struct CommandOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::filesystem::path> workdir;
  std::size_t jobs = 1;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitDisqualified = 2;

// Writes <out>/data/<id>.csv and <id>.schema.csv for every generated
// dataset and prints a per-dataset summary table to `out`.
int cmd_generate(const std::filesystem::path& config_path, const CommandOptions& options,
                 std::ostream& out, std::ostream& err);

// Evaluates each predictor on the datasets of `phase` and writes
// <out>/scores/<phase>/<predictor>/{<dataset>.trace.json,
// <dataset>.score.json, submission.json}.
int cmd_evaluate(const std::filesystem::path& config_path, std::string_view phase,
                 const std::vector<std::string>& predictors, const CommandOptions& options,
                 std::ostream& out, std::ostream& err);

// Each directory is a submission (holds submission.json) or a parent of
// submissions. Without `out_dir` the boards go to `out`.
int cmd_leaderboard(const std::vector<std::filesystem::path>& dirs, bool merge,
                    const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
                    std::ostream& err);

}  // namespace driftbench

#endif  // DRIFTBENCH_CLI_HPP_

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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "driftbench/cli.hpp"

int main(int argc, char** argv) {
  namespace db = driftbench;
  CLI::App app{"Lifelong-evaluation benchmark harness for drifting tabular streams"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> workdir;
  std::size_t jobs = 1;

  auto* generate = app.add_subcommand("generate", "Write the synthetic datasets of a config");
  generate->add_option("--config", config, "Run config (JSON)")->required();
  generate->add_option("--seed", seed, "Override the top-level seed");
  generate->add_option("--out", out, "Override the output directory");

  std::string phase = "feedback";
  std::vector<std::string> predictors;
  auto* evaluate = app.add_subcommand("evaluate", "Run predictors through the lifelong protocol");
  evaluate->add_option("--config", config, "Run config (JSON)")->required();
  evaluate->add_option("--phase", phase, "feedback or final");
  evaluate->add_option("--predictor", predictors, "Registered predictor id (repeatable)")
      ->required();
  evaluate->add_option("--seed", seed, "Override the top-level seed");
  evaluate->add_option("--out", out, "Override the output directory");
  evaluate->add_option("--jobs", jobs, "Datasets evaluated concurrently")
      ->check(CLI::PositiveNumber);
  evaluate->add_option("--workdir", workdir,
                       "Work directory for subprocess predictors (default $DRIFTBENCH_WORKDIR)");

  std::vector<std::string> dirs;
  bool merge = false;
  std::optional<std::string> board_out;
  auto* leaderboard = app.add_subcommand("leaderboard", "Rank evaluated submissions");
  leaderboard->add_option("dirs", dirs, "Submission directories or their parents")->required();
  leaderboard->add_flag("--merge", merge, "Also emit the merged cross-bundle board");
  leaderboard->add_option("--out", board_out, "Write leaderboard.<bundle>.csv files here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : db::kExitError;
  }

  db::CommandOptions options;
  options.seed = seed;
  if (out) options.output_dir = *out;
  if (workdir) options.workdir = *workdir;
  options.jobs = jobs;

  if (generate->parsed()) return db::cmd_generate(config, options, std::cout, std::cerr);
  if (evaluate->parsed()) {
    return db::cmd_evaluate(config, phase, predictors, options, std::cout, std::cerr);
  }
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  std::optional<std::filesystem::path> board_dir;
  if (board_out) board_dir = *board_out;
  return db::cmd_leaderboard(paths, merge, board_dir, std::cout, std::cerr);
}

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

#include <fcntl.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <fmt/format.h>

#include "driftbench/harness.hpp"

namespace driftbench {
namespace {

using Clock = std::chrono::steady_clock;

constexpr auto kPollInterval = std::chrono::milliseconds(5);

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv, double timeout_seconds,
                          const std::filesystem::path& log_path, std::stop_token stop) {
  ProcessResult result;
  if (argv.empty()) return result;
  if (::access(argv[0].c_str(), X_OK) != 0) return result;

  // Everything the child touches is prepared before fork.
  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  const std::string log = log_path.string();

  const auto start = Clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) return result;
  if (pid == 0) {
    ::setpgid(0, 0);
    const int null_fd = ::open("/dev/null", O_RDONLY);
    if (null_fd >= 0) ::dup2(null_fd, STDIN_FILENO);
    const int log_fd = ::open(log.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (log_fd >= 0) {
      ::dup2(log_fd, STDOUT_FILENO);
      ::dup2(log_fd, STDERR_FILENO);
    }
    ::execv(args[0], args.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);

  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(
                  std::chrono::duration<double>(std::max(0.0, timeout_seconds)));
  int status = 0;
  while (true) {
    const pid_t done = ::waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      result.status = ProcessStatus::Exited;
      result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
      break;
    }
    if (Clock::now() >= deadline || stop.stop_requested()) {
      ::kill(-pid, SIGKILL);
      ::kill(pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      result.status = ProcessStatus::Killed;
      break;
    }
    std::this_thread::sleep_for(kPollInterval);
  }
  result.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

std::vector<double> read_predictions(const std::filesystem::path& path, std::size_t expected) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("{}: predictions file missing", path.string()));
  std::vector<double> scores;
  scores.reserve(expected);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cell = trim(line);
    if (cell.empty()) continue;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      throw std::runtime_error(
          fmt::format("{}: line {}: '{}' is not a number", path.string(), line_no, cell));
    }
    if (!std::isfinite(v)) {
      throw std::runtime_error(fmt::format("{}: line {}: non-finite score", path.string(), line_no));
    }
    scores.push_back(v);
  }
  if (scores.size() != expected) {
    throw std::runtime_error(fmt::format("{}: {} predictions for {} test rows", path.string(),
                                         scores.size(), expected));
  }
  return scores;
}

SubprocessPredictor::SubprocessPredictor(std::filesystem::path executable,
                                         std::filesystem::path workdir,
                                         std::vector<std::string> extra_args)
    : executable_(std::filesystem::absolute(std::move(executable))),
      workdir_(std::filesystem::absolute(std::move(workdir))),
      extra_args_(std::move(extra_args)) {
  std::filesystem::create_directories(workdir_ / "state");
}

std::filesystem::path SubprocessPredictor::step_dir(int step) const {
  return workdir_ / fmt::format("step_{}", step);
}

void SubprocessPredictor::stage(int step, const BlockView* train, const BlockView& test) {
  const auto dir = step_dir(step);
  std::filesystem::create_directories(dir);
  write_schema(test.schema, dir / "schema.csv");
  if (train) {
    write_rows(train->schema, train->rows, train->labels, dir / "train.csv");
  } else {
    std::vector<Label> none;
    write_rows(test.schema, {}, none, dir / "train.csv");
  }
  write_rows(test.schema, test.rows, {}, dir / "test.csv");
  std::filesystem::remove(dir / "predictions.txt");
  staged_step_ = step;
}

void SubprocessPredictor::learn(const BlockView& /*block*/, const CallContext& ctx) {
  // The external program learns and predicts in a single invocation.
  if (staged_step_ != ctx.step) {
    throw std::logic_error(fmt::format("step {} was not staged", ctx.step));
  }
}

std::vector<double> SubprocessPredictor::predict(const BlockView& block, const CallContext& ctx) {
  if (staged_step_ != ctx.step) {
    throw std::logic_error(fmt::format("step {} was not staged", ctx.step));
  }
  const auto dir = step_dir(ctx.step);
  std::vector<std::string> argv{executable_.string(),
                                "--train",
                                (dir / "train.csv").string(),
                                "--test",
                                (dir / "test.csv").string(),
                                "--schema",
                                (dir / "schema.csv").string(),
                                "--pred-out",
                                (dir / "predictions.txt").string(),
                                "--remaining-budget",
                                fmt::format("{:.3f}", ctx.remaining_seconds),
                                "--step",
                                std::to_string(ctx.step),
                                "--workdir",
                                (workdir_ / "state").string()};
  argv.insert(argv.end(), extra_args_.begin(), extra_args_.end());

  const auto run = run_process(argv, ctx.remaining_seconds, workdir_ / "predictor.log", ctx.stop);
  switch (run.status) {
    case ProcessStatus::LaunchFailed:
      throw std::runtime_error(fmt::format("cannot launch {}", executable_.string()));
    case ProcessStatus::Killed:
      throw BudgetExceeded(fmt::format("{} killed after {:.2f} s", executable_.filename().string(),
                                       run.elapsed_seconds));
    case ProcessStatus::Exited:
      break;
  }
  if (run.exit_code != 0) {
    throw std::runtime_error(fmt::format("{} exited with code {}",
                                         executable_.filename().string(), run.exit_code));
  }
  return read_predictions(dir / "predictions.txt", block.rows.size());
}

}  // namespace driftbench

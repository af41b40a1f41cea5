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

#include "driftbench/report.hpp"

#include <fstream>

#include <fmt/format.h>

namespace driftbench {

Json to_json(const EvaluationTrace& trace) {
  Json steps = Json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"step", s.step},
                     {"rows_trained", s.rows_trained},
                     {"block_predicted", s.block_predicted},
                     {"auc", s.score.auc},
                     {"elapsed_seconds", s.score.elapsed_seconds},
                     {"degenerate", s.score.degenerate}});
  }
  return {{"dataset", trace.dataset},
          {"predictor", trace.predictor},
          {"budget_seconds", trace.budget_seconds},
          {"outcome", std::string(to_string(trace.outcome))},
          {"message", trace.message},
          {"total_elapsed_seconds", trace.total_elapsed_seconds},
          {"steps", std::move(steps)}};
}

Json to_json(const DatasetScore& score) {
  Json blocks = Json::array();
  for (const auto& b : score.blocks) {
    blocks.push_back({{"block", b.block},
                      {"auc", b.auc},
                      {"elapsed_seconds", b.elapsed_seconds},
                      {"degenerate", b.degenerate}});
  }
  return {{"dataset", score.dataset},
          {"mean_auc", score.mean_auc},
          {"disqualified", score.disqualified},
          {"total_elapsed_seconds", score.total_elapsed_seconds},
          {"blocks", std::move(blocks)}};
}

DatasetScore dataset_score_from_json(const Json& j) {
  DatasetScore s;
  s.dataset = j.at("dataset").get<std::string>();
  s.mean_auc = j.at("mean_auc").get<double>();
  s.disqualified = j.value("disqualified", false);
  s.total_elapsed_seconds = j.value("total_elapsed_seconds", 0.0);
  if (j.contains("blocks")) {
    for (const auto& b : j.at("blocks")) {
      s.blocks.push_back({b.at("block").get<std::size_t>(), b.at("auc").get<double>(),
                          b.value("elapsed_seconds", 0.0), b.value("degenerate", false)});
    }
  }
  return s;
}

Json to_json(const SubmissionInfo& info) {
  return {{"team", info.team},
          {"bundle", info.bundle},
          {"phase", info.phase},
          {"datasets", info.datasets},
          {"duration_seconds", info.duration_seconds}};
}

SubmissionInfo submission_from_json(const Json& j) {
  SubmissionInfo info;
  info.team = j.at("team").get<std::string>();
  info.bundle = j.value("bundle", std::string{});
  info.phase = j.value("phase", std::string{});
  info.datasets = j.at("datasets").get<std::vector<std::string>>();
  info.duration_seconds = j.value("duration_seconds", 0.0);
  return info;
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("{}: cannot open", path.string()));
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("{}: cannot write", path.string()));
  out << j.dump(2) << '\n';
}

void write_submission(const std::filesystem::path& dir, const SubmissionInfo& info,
                      const SuiteResult& result) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    const auto& id = result.scores[i].dataset;
    write_json(dir / (id + ".trace.json"), to_json(result.traces[i]));
    write_json(dir / (id + ".score.json"), to_json(result.scores[i]));
  }
  write_json(dir / "submission.json", to_json(info));
}

SubmissionEntry read_submission(const std::filesystem::path& dir,
                                std::vector<std::string>* datasets) {
  const auto info = [&] {
    try {
      return submission_from_json(read_json(dir / "submission.json"));
    } catch (const Json::exception& e) {
      throw std::runtime_error(fmt::format("{}: {}", (dir / "submission.json").string(), e.what()));
    }
  }();
  SubmissionEntry entry;
  entry.team = info.team;
  entry.bundle = info.bundle;
  entry.duration_seconds = info.duration_seconds;
  for (const auto& id : info.datasets) {
    const auto path = dir / (id + ".score.json");
    DatasetScore score;
    try {
      score = dataset_score_from_json(read_json(path));
    } catch (const Json::exception& e) {
      throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
    }
    if (score.dataset != id) {
      throw std::runtime_error(
          fmt::format("{}: names dataset '{}', expected '{}'", path.string(), score.dataset, id));
    }
    entry.aucs.push_back(score.disqualified ? 0.0 : score.mean_auc);
    entry.disqualified.push_back(score.disqualified);
  }
  if (datasets) *datasets = info.datasets;
  return entry;
}

Json strip_timing(const Json& j) {
  if (j.is_object()) {
    Json out = Json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& key = it.key();
      if (key.find("elapsed") != std::string::npos || key.find("duration") != std::string::npos)
        continue;
      out[key] = strip_timing(it.value());
    }
    return out;
  }
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& v : j) out.push_back(strip_timing(v));
    return out;
  }
  return j;
}

}  // namespace driftbench

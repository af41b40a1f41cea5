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

// Leaderboard arithmetic: per-dataset competition ranks, average rank,
// duration tie-break and merging of per-bundle boards.

#ifndef DRIFTBENCH_RANKING_HPP_
#define DRIFTBENCH_RANKING_HPP_

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace driftbench {

struct SubmissionEntry {
  std::string team;
  std::string bundle;
  std::vector<double> aucs;
  // Empty means no dataset is disqualified.
  std::vector<bool> disqualified;
  double duration_seconds = 0.0;

  bool is_disqualified(std::size_t dataset) const {
    return dataset < disqualified.size() && disqualified[dataset];
  }
};

// Competition ("1224") ranks: rank 1 is the highest AUC, equal AUCs share
// the smallest rank and the next rank skips. Disqualified entries rank after
// every qualified entry, ordered among themselves by AUC.
std::vector<int> rank_within_dataset(std::span<const double> aucs,
                                     const std::vector<bool>& disqualified = {});

double average_rank(std::span<const int> ranks);

struct LeaderboardRow {
  int position = 0;
  std::string team;
  std::string bundle;
  std::vector<int> ranks;
  double average_rank = 0.0;
  double duration_seconds = 0.0;
};

struct Leaderboard {
  std::vector<std::string> datasets;
  std::vector<LeaderboardRow> rows;
};

// Orders by average rank, then duration, then team id; positions are 1..M.
// Throws std::invalid_argument when an entry's AUC count differs from the
// dataset count.
Leaderboard build_leaderboard(const std::vector<SubmissionEntry>& entries,
                              const std::vector<std::string>& datasets);

enum class MergePolicy {
  // Drop every team that appears in more than one bundle.
  ExcludeCrossBundleTeams,
  // Teams must be disjoint across bundles; overlap is an error.
  RequireDisjoint,
};

struct BundleEntries {
  std::string bundle;
  std::vector<SubmissionEntry> entries;
};

Leaderboard merge_bundles(const std::vector<BundleEntries>& bundles,
                          const std::vector<std::string>& datasets,
                          MergePolicy policy = MergePolicy::ExcludeCrossBundleTeams);

// Comma-separated board: a header line, then
// position,bundle,team,avg_rank,<rank per dataset>,duration
// with the average rank to 1 decimal and the duration to 2 decimals.
void write_leaderboard_csv(const Leaderboard& board, std::ostream& out);

}  // namespace driftbench

#endif  // DRIFTBENCH_RANKING_HPP_

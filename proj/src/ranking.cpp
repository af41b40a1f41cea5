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

#include "driftbench/ranking.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace driftbench {

std::vector<int> rank_within_dataset(std::span<const double> aucs,
                                     const std::vector<bool>& disqualified) {
  const std::size_t n = aucs.size();
  auto qualified = [&](std::size_t i) { return i >= disqualified.size() || !disqualified[i]; };
  // a strictly ahead of b.
  auto ahead = [&](std::size_t a, std::size_t b) {
    if (qualified(a) != qualified(b)) return qualified(a);
    return aucs[a] > aucs[b];
  };
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), ahead);

  std::vector<int> ranks(n);
  for (std::size_t k = 0; k < n; ++k) {
    const bool tied_with_previous = k > 0 && !ahead(order[k - 1], order[k]);
    ranks[order[k]] = tied_with_previous ? ranks[order[k - 1]] : static_cast<int>(k + 1);
  }
  return ranks;
}

double average_rank(std::span<const int> ranks) {
  if (ranks.empty()) throw std::invalid_argument("average_rank: no ranks");
  const long sum = std::accumulate(ranks.begin(), ranks.end(), 0L);
  return static_cast<double>(sum) / static_cast<double>(ranks.size());
}

Leaderboard build_leaderboard(const std::vector<SubmissionEntry>& entries,
                              const std::vector<std::string>& datasets) {
  const std::size_t m = entries.size();
  const std::size_t d = datasets.size();
  for (const auto& e : entries) {
    if (e.aucs.size() != d) {
      throw std::invalid_argument(fmt::format("leaderboard: team '{}' has {} AUCs for {} datasets",
                                              e.team, e.aucs.size(), d));
    }
  }

  std::vector<std::vector<int>> ranks(m, std::vector<int>(d));
  std::vector<double> column(m);
  std::vector<bool> column_dq(m);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      column[i] = entries[i].aucs[j];
      column_dq[i] = entries[i].is_disqualified(j);
    }
    const auto r = rank_within_dataset(column, column_dq);
    for (std::size_t i = 0; i < m; ++i) ranks[i][j] = r[i];
  }

  // Every entry has the same dataset count, so rank sums order exactly like
  // average ranks without floating-point ties going astray.
  std::vector<long> rank_sum(m);
  for (std::size_t i = 0; i < m; ++i)
    rank_sum[i] = std::accumulate(ranks[i].begin(), ranks[i].end(), 0L);

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (rank_sum[a] != rank_sum[b]) return rank_sum[a] < rank_sum[b];
    if (entries[a].duration_seconds != entries[b].duration_seconds)
      return entries[a].duration_seconds < entries[b].duration_seconds;
    if (entries[a].team != entries[b].team) return entries[a].team < entries[b].team;
    return a < b;
  });

  Leaderboard board;
  board.datasets = datasets;
  board.rows.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& e = entries[order[k]];
    LeaderboardRow row;
    row.position = static_cast<int>(k + 1);
    row.team = e.team;
    row.bundle = e.bundle;
    row.ranks = ranks[order[k]];
    row.average_rank = d == 0 ? 0.0 : average_rank(row.ranks);
    row.duration_seconds = e.duration_seconds;
    board.rows.push_back(std::move(row));
  }
  return board;
}

Leaderboard merge_bundles(const std::vector<BundleEntries>& bundles,
                          const std::vector<std::string>& datasets, MergePolicy policy) {
  std::map<std::string, std::set<std::string>> bundles_of_team;
  for (const auto& b : bundles)
    for (const auto& e : b.entries) bundles_of_team[e.team].insert(b.bundle);

  std::vector<SubmissionEntry> merged;
  for (const auto& b : bundles) {
    for (const auto& e : b.entries) {
      if (bundles_of_team[e.team].size() > 1) {
        if (policy == MergePolicy::RequireDisjoint) {
          throw std::invalid_argument(
              fmt::format("merge: team '{}' appears in more than one bundle", e.team));
        }
        continue;
      }
      SubmissionEntry copy = e;
      if (copy.bundle.empty()) copy.bundle = b.bundle;
      merged.push_back(std::move(copy));
    }
  }
  return build_leaderboard(merged, datasets);
}

void write_leaderboard_csv(const Leaderboard& board, std::ostream& out) {
  out << "position,bundle,team,avg_rank";
  for (const auto& d : board.datasets) out << ',' << d;
  out << ",duration\n";
  for (const auto& row : board.rows) {
    out << fmt::format("{},{},{},{:.1f}", row.position, row.bundle, row.team, row.average_rank);
    for (const int r : row.ranks) out << ',' << r;
    out << fmt::format(",{:.2f}\n", row.duration_seconds);
  }
}

}  // namespace driftbench

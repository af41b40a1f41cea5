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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "driftbench/data.hpp"

namespace driftbench {
namespace {

constexpr std::int64_t kEpochStart = 1'500'000'000;

// Latent label model: weights for numeric columns and an effect per category
// value for categorical and multi-valued columns.
struct LatentParams {
  std::vector<double> numeric;
  std::vector<std::vector<double>> categorical;
  std::vector<std::vector<double>> multi_valued;
};

LatentParams draw_params(const DriftGenSpec& spec, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  LatentParams p;
  p.numeric.resize(spec.numerical);
  for (auto& w : p.numeric) w = normal(rng);
  p.categorical.assign(spec.categorical, std::vector<double>(spec.cardinality));
  for (auto& effects : p.categorical)
    for (auto& e : effects) e = normal(rng);
  p.multi_valued.assign(spec.multi_valued, std::vector<double>(spec.cardinality));
  for (auto& effects : p.multi_valued)
    for (auto& e : effects) e = normal(rng);
  return p;
}

// end = (start + m * delta) / sqrt(1 + m^2): keeps the parameter scale while
// m -> infinity makes the post-drift concept independent of the initial one.
LatentParams blend(const LatentParams& start, const LatentParams& delta, double magnitude) {
  const double norm = 1.0 / std::sqrt(1.0 + magnitude * magnitude);
  auto mix = [&](const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + magnitude * b[i]) * norm;
    return out;
  };
  LatentParams end;
  end.numeric = mix(start.numeric, delta.numeric);
  for (std::size_t c = 0; c < start.categorical.size(); ++c)
    end.categorical.push_back(mix(start.categorical[c], delta.categorical[c]));
  for (std::size_t c = 0; c < start.multi_valued.size(); ++c)
    end.multi_valued.push_back(mix(start.multi_valued[c], delta.multi_valued[c]));
  return end;
}

// Samples category value ids with frequency proportional to rank^-exponent.
// Ranks are mapped to ids through a random permutation so that the id says
// nothing about frequency.
class PowerLawSampler {
 public:
  PowerLawSampler(std::size_t cardinality, double exponent, std::mt19937_64& rng)
      : id_of_rank_(cardinality) {
    std::vector<double> weights(cardinality);
    for (std::size_t r = 0; r < cardinality; ++r)
      weights[r] = std::pow(static_cast<double>(r + 1), -exponent);
    ranks_ = std::discrete_distribution<std::size_t>(weights.begin(), weights.end());
    std::iota(id_of_rank_.begin(), id_of_rank_.end(), std::size_t{0});
    std::shuffle(id_of_rank_.begin(), id_of_rank_.end(), rng);
  }

  std::size_t operator()(std::mt19937_64& rng) { return id_of_rank_[ranks_(rng)]; }

 private:
  std::discrete_distribution<std::size_t> ranks_;
  std::vector<std::size_t> id_of_rank_;
};

std::string value_name(std::size_t id) { return fmt::format("v{}", id); }

double drift_position(const DriftGenSpec& spec, std::size_t block) {
  switch (spec.drift) {
    case DriftProfile::None: return 0.0;
    case DriftProfile::Gradual:
      return static_cast<double>(block) / static_cast<double>(spec.blocks - 1);
    case DriftProfile::Abrupt: return block >= spec.blocks / 2 ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace

std::string_view to_string(DriftProfile profile) {
  switch (profile) {
    case DriftProfile::None: return "none";
    case DriftProfile::Gradual: return "gradual";
    case DriftProfile::Abrupt: return "abrupt";
  }
  return "?";
}

std::optional<DriftProfile> drift_profile_from_string(std::string_view name) {
  if (name == "none") return DriftProfile::None;
  if (name == "gradual") return DriftProfile::Gradual;
  if (name == "abrupt") return DriftProfile::Abrupt;
  return std::nullopt;
}

void DriftGenSpec::validate() const {
  if (blocks < 2) throw std::invalid_argument("generator: blocks must be >= 2");
  if (blocks > rows) throw std::invalid_argument("generator: more blocks than rows");
  if (feature_count() == 0) throw std::invalid_argument("generator: no features requested");
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude))
    throw std::invalid_argument("generator: drift magnitude must be finite and >= 0");
  if (cardinality == 0) throw std::invalid_argument("generator: cardinality must be >= 1");
  if (!(exponent > 0.0) || !std::isfinite(exponent))
    throw std::invalid_argument("generator: power-law exponent must be > 0");
  if (!(signal >= 0.0) || !std::isfinite(signal))
    throw std::invalid_argument("generator: signal must be finite and >= 0");
}

ChronoDataset generate_drift_stream(const DriftGenSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);

  std::vector<Column> columns;
  for (std::size_t i = 0; i < spec.categorical; ++i)
    columns.push_back({fmt::format("cat_{}", i), FeatureKind::Categorical});
  for (std::size_t i = 0; i < spec.numerical; ++i)
    columns.push_back({fmt::format("num_{}", i), FeatureKind::Numerical});
  for (std::size_t i = 0; i < spec.multi_valued; ++i)
    columns.push_back({fmt::format("mvc_{}", i), FeatureKind::MultiValuedCategorical});
  for (std::size_t i = 0; i < spec.time; ++i)
    columns.push_back({fmt::format("time_{}", i), FeatureKind::Time});

  ChronoDataset out;
  out.schema = FeatureSchema(std::move(columns), "label");
  out.provenance = fmt::format("synthetic:{}:seed={}", to_string(spec.drift), spec.seed);

  const auto informative = std::max<std::size_t>(
      1, spec.numerical + spec.categorical + spec.multi_valued);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(informative));
  const LatentParams start = draw_params(spec, stddev, rng);
  const LatentParams delta = draw_params(spec, stddev, rng);
  const LatentParams end = blend(start, delta, spec.magnitude);

  std::vector<PowerLawSampler> cat_samplers;
  for (std::size_t i = 0; i < spec.categorical; ++i)
    cat_samplers.emplace_back(spec.cardinality, spec.exponent, rng);
  std::vector<PowerLawSampler> mvc_samplers;
  for (std::size_t i = 0; i < spec.multi_valued; ++i)
    mvc_samplers.emplace_back(spec.cardinality, spec.exponent, rng);

  std::normal_distribution<double> standard_normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> tick(0, 60);
  std::uniform_int_distribution<std::size_t> token_count(0, 3);

  const BlockPlan plan = split_blocks(spec.rows, spec.blocks);
  out.rows.reserve(spec.rows);
  out.labels.reserve(spec.rows);
  std::int64_t clock = kEpochStart;

  for (std::size_t b = 0; b < plan.block_count(); ++b) {
    const double alpha = drift_position(spec, b);
    for (std::size_t r = plan[b].begin; r < plan[b].end; ++r) {
      Row row;
      row.reserve(spec.feature_count());
      double score_start = 0.0;
      double score_end = 0.0;

      for (std::size_t c = 0; c < spec.categorical; ++c) {
        const std::size_t id = cat_samplers[c](rng);
        score_start += start.categorical[c][id];
        score_end += end.categorical[c][id];
        row.push_back(value_name(id));
      }
      for (std::size_t c = 0; c < spec.numerical; ++c) {
        const double x = std::round(standard_normal(rng) * 1e4) / 1e4;
        score_start += start.numeric[c] * x;
        score_end += end.numeric[c] * x;
        row.push_back(fmt::format("{:.4f}", x));
      }
      for (std::size_t c = 0; c < spec.multi_valued; ++c) {
        const std::size_t wanted = std::min(token_count(rng), spec.cardinality);
        std::vector<std::size_t> ids;
        while (ids.size() < wanted) {
          const std::size_t id = mvc_samplers[c](rng);
          if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
        }
        std::string cell;
        double effect_start = 0.0;
        double effect_end = 0.0;
        for (std::size_t t = 0; t < ids.size(); ++t) {
          if (t > 0) cell += kMvcSeparator;
          cell += value_name(ids[t]);
          effect_start += start.multi_valued[c][ids[t]];
          effect_end += end.multi_valued[c][ids[t]];
        }
        if (!ids.empty()) {
          score_start += effect_start / static_cast<double>(ids.size());
          score_end += effect_end / static_cast<double>(ids.size());
        }
        row.push_back(std::move(cell));
      }
      clock += tick(rng);
      for (std::size_t c = 0; c < spec.time; ++c) {
        row.push_back(std::to_string(clock + static_cast<std::int64_t>(c) * 3600));
      }

      const double latent = (1.0 - alpha) * score_start + alpha * score_end;
      const double p = 1.0 / (1.0 + std::exp(-spec.signal * latent));
      out.labels.push_back(unit(rng) < p ? 1 : 0);
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace driftbench

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

#include "driftbench/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace driftbench {
namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kGeneratorSalt = 1;
constexpr std::uint64_t kModelSalt = 2;

void check_keys(const Json& obj, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{}: expected an object", where));
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      throw ConfigError(fmt::format("{}: unknown key '{}'", where, it.key()));
    }
  }
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback, std::string_view where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(fmt::format("{}: key '{}' has the wrong type", where, key));
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

DriftGenSpec parse_generator(const Json& g, std::size_t blocks, std::string_view where) {
  check_keys(g, where,
             {"rows", "categorical", "numerical", "multi_valued", "time", "blocks", "drift",
              "magnitude", "cardinality", "exponent", "signal"});
  DriftGenSpec spec;
  spec.rows = get_or(g, "rows", spec.rows, where);
  spec.categorical = get_or(g, "categorical", spec.categorical, where);
  spec.numerical = get_or(g, "numerical", spec.numerical, where);
  spec.multi_valued = get_or(g, "multi_valued", spec.multi_valued, where);
  spec.time = get_or(g, "time", spec.time, where);
  spec.blocks = get_or(g, "blocks", blocks, where);
  const auto drift = get_or<std::string>(g, "drift", "none", where);
  const auto profile = drift_profile_from_string(drift);
  if (!profile) throw ConfigError(fmt::format("{}: unknown drift '{}'", where, drift));
  spec.drift = *profile;
  spec.magnitude = get_or(g, "magnitude", spec.magnitude, where);
  spec.cardinality = get_or(g, "cardinality", spec.cardinality, where);
  spec.exponent = get_or(g, "exponent", spec.exponent, where);
  spec.signal = get_or(g, "signal", spec.signal, where);
  return spec;
}

BaselineOptions parse_baseline(const Json& o, std::string_view where) {
  check_keys(o, where,
             {"initial_trees", "trees_per_block", "depth", "learning_rate", "subsample_cap",
              "policy", "window_blocks", "recency_decay", "lr_decay", "min_leaf_rows",
              "categorical_encoder", "multi_valued_encoder", "smoothing", "co_encode"});
  BaselineOptions b;
  auto& m = b.model;
  m.initial_trees = get_or(o, "initial_trees", m.initial_trees, where);
  m.trees_per_block = get_or(o, "trees_per_block", m.trees_per_block, where);
  m.depth = get_or(o, "depth", m.depth, where);
  m.learning_rate = get_or(o, "learning_rate", m.learning_rate, where);
  m.subsample_cap = get_or(o, "subsample_cap", m.subsample_cap, where);
  const auto policy = get_or<std::string>(o, "policy", std::string(to_string(m.policy)), where);
  const auto parsed = drift_policy_from_string(policy);
  if (!parsed) throw ConfigError(fmt::format("{}: unknown policy '{}'", where, policy));
  m.policy = *parsed;
  m.window_blocks = get_or(o, "window_blocks", m.window_blocks, where);
  m.recency_decay = get_or(o, "recency_decay", m.recency_decay, where);
  m.lr_decay = get_or(o, "lr_decay", m.lr_decay, where);
  m.min_leaf_rows = get_or(o, "min_leaf_rows", m.min_leaf_rows, where);
  auto encoder = [&](const char* key, EncoderKind fallback) {
    const auto name = get_or<std::string>(o, key, std::string(to_string(fallback)), where);
    const auto kind = encoder_kind_from_string(name);
    if (!kind) throw ConfigError(fmt::format("{}: unknown encoder '{}'", where, name));
    return *kind;
  };
  b.encoding.categorical = encoder("categorical_encoder", b.encoding.categorical);
  b.encoding.multi_valued = encoder("multi_valued_encoder", b.encoding.multi_valued);
  b.encoding.smoothing = get_or(o, "smoothing", b.encoding.smoothing, where);
  b.encoding.co_encode = get_or(o, "co_encode", b.encoding.co_encode, where);
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("{}: {}", where, e.what()));
  }
  return b;
}

std::vector<DatasetConfig> datasets_of(const RunConfig& config, Phase phase) {
  std::vector<DatasetConfig> out;
  for (const auto& d : config.datasets) {
    if (d.phase == phase) out.push_back(d);
  }
  return out;
}

std::size_t dataset_index(const RunConfig& config, std::string_view id) {
  for (std::size_t i = 0; i < config.datasets.size(); ++i) {
    if (config.datasets[i].id == id) return i;
  }
  return config.datasets.size();
}

RunConfig load_with_overrides(const fs::path& config_path, const CommandOptions& options) {
  auto config = load_run_config(config_path);
  if (options.seed) {
    // Re-derive generator seeds from the overriding seed.
    config.seed = *options.seed;
    for (std::size_t i = 0; i < config.datasets.size(); ++i) {
      if (config.datasets[i].generate) {
        config.datasets[i].generate->seed = derive_seed(config.seed, kGeneratorSalt, i);
      }
    }
  }
  if (options.output_dir) config.output_dir = *options.output_dir;
  return config;
}

std::string bundle_label(const std::string& bundle) {
  return bundle.empty() ? "default" : bundle;
}

// Resolves a leaderboard argument into submission directories.
std::vector<fs::path> submission_dirs(const fs::path& dir) {
  if (fs::exists(dir / "submission.json")) return {dir};
  if (!fs::is_directory(dir)) {
    throw std::runtime_error(fmt::format("{}: not a directory", dir.string()));
  }
  std::vector<fs::path> found;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / "submission.json")) found.push_back(e.path());
  }
  if (found.empty()) {
    throw std::runtime_error(fmt::format("{}: no submission.json found", dir.string()));
  }
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
  // splitmix64 finalizer over a mixed input.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt * 0x100000001b3ULL + index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const PredictorConfig* RunConfig::find_predictor(std::string_view id) const {
  for (const auto& p : predictors) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

RunConfig parse_run_config(const Json& doc, const fs::path& base_dir) {
  check_keys(doc, "config", {"seed", "output_dir", "blocks", "datasets", "predictors"});
  RunConfig config;
  config.seed = get_or(doc, "seed", config.seed, "config");
  config.output_dir = resolve(
      base_dir, get_or<std::string>(doc, "output_dir", config.output_dir.string(), "config"));
  config.blocks = get_or(doc, "blocks", config.blocks, "config");
  if (config.blocks < 2) throw ConfigError("config: blocks must be >= 2");

  if (!doc.contains("datasets") || !doc.at("datasets").is_array()) {
    throw ConfigError("config: 'datasets' must be an array");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < doc.at("datasets").size(); ++i) {
    const auto& d = doc.at("datasets").at(i);
    const auto where = fmt::format("datasets[{}]", i);
    check_keys(d, where, {"id", "phase", "budget_seconds", "generate", "data", "schema"});
    DatasetConfig ds;
    ds.id = get_or<std::string>(d, "id", "", where);
    if (ds.id.empty()) throw ConfigError(fmt::format("{}: missing 'id'", where));
    if (!ids.insert(ds.id).second) {
      throw ConfigError(fmt::format("{}: duplicate dataset id '{}'", where, ds.id));
    }
    const auto phase = get_or<std::string>(d, "phase", "feedback", where);
    const auto parsed = phase_from_string(phase);
    if (!parsed) throw ConfigError(fmt::format("{}: unknown phase '{}'", where, phase));
    ds.phase = *parsed;
    ds.budget_seconds = get_or(d, "budget_seconds", 0.0, where);
    if (!(ds.budget_seconds > 0.0)) {
      throw ConfigError(fmt::format("{}: budget_seconds must be positive", where));
    }
    const bool has_files = d.contains("data") || d.contains("schema");
    if (d.contains("generate") == has_files) {
      throw ConfigError(fmt::format("{}: give either 'generate' or 'data' + 'schema'", where));
    }
    if (d.contains("generate")) {
      auto spec = parse_generator(d.at("generate"), config.blocks, where + ".generate");
      spec.seed = derive_seed(config.seed, kGeneratorSalt, i);
      try {
        spec.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: {}", where, e.what()));
      }
      ds.generate = spec;
    } else {
      if (!d.contains("data") || !d.contains("schema")) {
        throw ConfigError(fmt::format("{}: 'data' and 'schema' go together", where));
      }
      ds.data = resolve(base_dir, get_or<std::string>(d, "data", "", where));
      ds.schema = resolve(base_dir, get_or<std::string>(d, "schema", "", where));
      for (const auto& p : {ds.data, ds.schema}) {
        if (!fs::exists(p)) throw ConfigError(fmt::format("{}: {} does not exist", where, p.string()));
      }
    }
    config.datasets.push_back(std::move(ds));
  }

  if (doc.contains("predictors")) {
    if (!doc.at("predictors").is_array()) throw ConfigError("config: 'predictors' must be an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < doc.at("predictors").size(); ++i) {
      const auto& p = doc.at("predictors").at(i);
      const auto where = fmt::format("predictors[{}]", i);
      check_keys(p, where, {"id", "bundle", "builtin", "executable", "args", "options", "value"});
      PredictorConfig pc;
      pc.id = get_or<std::string>(p, "id", "", where);
      if (pc.id.empty()) throw ConfigError(fmt::format("{}: missing 'id'", where));
      if (!names.insert(pc.id).second) {
        throw ConfigError(fmt::format("{}: duplicate predictor id '{}'", where, pc.id));
      }
      pc.bundle = get_or<std::string>(p, "bundle", "", where);
      pc.builtin = get_or<std::string>(p, "builtin", "", where);
      const bool has_exe = p.contains("executable");
      if (pc.builtin.empty() == !has_exe) {
        throw ConfigError(fmt::format("{}: give exactly one of 'builtin' or 'executable'", where));
      }
      if (has_exe) {
        pc.executable = resolve(base_dir, get_or<std::string>(p, "executable", "", where));
        pc.args = get_or<std::vector<std::string>>(p, "args", {}, where);
      } else if (pc.builtin == "baseline") {
        if (p.contains("options")) pc.baseline = parse_baseline(p.at("options"), where + ".options");
      } else if (pc.builtin == "constant") {
        pc.constant = get_or(p, "value", pc.constant, where);
      } else {
        throw ConfigError(fmt::format("{}: unknown builtin '{}'", where, pc.builtin));
      }
      config.predictors.push_back(std::move(pc));
    }
  }
  return config;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("{}: cannot open config", path.string()));
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
  try {
    return parse_run_config(doc, fs::absolute(path).parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

PredictorFactory make_factory(const RunConfig& config, const PredictorConfig& predictor,
                              Phase phase, const fs::path& workdir) {
  return [&config, predictor, phase, workdir](std::string_view dataset) -> std::unique_ptr<Predictor> {
    if (predictor.builtin == "constant") return std::make_unique<ConstantPredictor>(predictor.constant);
    if (predictor.builtin == "baseline") {
      auto options = predictor.baseline;
      options.model.seed = derive_seed(config.seed, kModelSalt, dataset_index(config, dataset));
      return std::make_unique<BaselinePredictor>(options);
    }
    const auto dir = workdir / std::string(to_string(phase)) / predictor.id / std::string(dataset);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return std::make_unique<SubprocessPredictor>(predictor.executable, dir, predictor.args);
  };
}

PhaseConfig make_phase(const RunConfig& config, Phase phase, std::size_t jobs) {
  PhaseConfig pc;
  pc.phase = phase;
  pc.block_count = config.blocks;
  pc.jobs = jobs;
  for (const auto& d : datasets_of(config, phase)) {
    DatasetEntry entry;
    entry.id = d.id;
    entry.budget_seconds = d.budget_seconds;
    if (d.generate) {
      entry.load = [spec = *d.generate, id = d.id] {
        auto ds = generate_drift_stream(spec);
        ds.provenance = id;
        return ds;
      };
    } else {
      entry.data = d.data;
      entry.schema = d.schema;
    }
    pc.datasets.push_back(std::move(entry));
  }
  return pc;
}

int cmd_generate(const fs::path& config_path, const CommandOptions& options, std::ostream& out,
                 std::ostream& err) {
  RunConfig config;
  try {
    config = load_with_overrides(config_path, options);
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitError;
  }
  const auto dir = config.output_dir / "data";
  try {
    fs::create_directories(dir);
    // Column layout follows the dataset-summary table of the challenge.
    fmt::print(out, "{:<12} {:>10} {:>5} {:>5} {:>5} {:>5} {:>8} {:>10} {:>7}\n", "Dataset",
               "Budget(s)", "Cat", "Num", "MVC", "Time", "Features", "Instances", "Drift");
    for (const auto& d : config.datasets) {
      if (!d.generate) continue;
      const auto ds = generate_drift_stream(*d.generate);
      write_dataset(ds, dir / (d.id + ".csv"), dir / (d.id + ".schema.csv"));
      const auto& s = ds.schema;
      fmt::print(out, "{:<12} {:>10} {:>5} {:>5} {:>5} {:>5} {:>8} {:>10} {:>7}\n", d.id,
                 d.budget_seconds, s.count(FeatureKind::Categorical),
                 s.count(FeatureKind::Numerical), s.count(FeatureKind::MultiValuedCategorical),
                 s.count(FeatureKind::Time), s.size(), ds.size(), to_string(d.generate->drift));
    }
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitError;
  }
  return kExitOk;
}

int cmd_evaluate(const fs::path& config_path, std::string_view phase_name,
                 const std::vector<std::string>& predictors, const CommandOptions& options,
                 std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::optional<Phase> phase;
  try {
    config = load_with_overrides(config_path, options);
    phase = phase_from_string(phase_name);
    if (!phase) throw ConfigError(fmt::format("unknown phase '{}'", phase_name));
    if (predictors.empty()) throw ConfigError("no predictor given");
    for (const auto& id : predictors) {
      if (!config.find_predictor(id)) {
        throw ConfigError(fmt::format("unknown predictor id '{}'", id));
      }
    }
    if (datasets_of(config, *phase).empty()) {
      throw ConfigError(fmt::format("no datasets in phase '{}'", phase_name));
    }
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitError;
  }

  fs::path workdir = config.output_dir / "work";
  if (options.workdir) {
    workdir = *options.workdir;
  } else if (const char* env = std::getenv("DRIFTBENCH_WORKDIR"); env && *env) {
    workdir = env;
  }

  bool any_disqualified = false;
  try {
    const auto phase_config = make_phase(config, *phase, std::max<std::size_t>(1, options.jobs));
    // Output order is the sorted predictor ids, independent of argument order.
    std::vector<std::string> ids = predictors;
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (const auto& id : ids) {
      const auto& predictor = *config.find_predictor(id);
      const auto result = run_suite(phase_config, make_factory(config, predictor, *phase, workdir));
      SubmissionInfo info{predictor.id, predictor.bundle, std::string(phase_name), {},
                          result.total_duration_seconds};
      for (const auto& d : phase_config.datasets) info.datasets.push_back(d.id);
      const auto dir = config.output_dir / "scores" / std::string(phase_name) / predictor.id;
      write_submission(dir, info, result);
      for (std::size_t i = 0; i < result.scores.size(); ++i) {
        const auto& s = result.scores[i];
        const auto& t = result.traces[i];
        any_disqualified = any_disqualified || s.disqualified;
        fmt::print(out, "{} {} mean_auc={:.4f} {}{}\n", predictor.id, s.dataset, s.mean_auc,
                   to_string(t.outcome), t.message.empty() ? "" : " (" + t.message + ")");
      }
    }
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitError;
  }
  return any_disqualified ? kExitDisqualified : kExitOk;
}

int cmd_leaderboard(const std::vector<fs::path>& dirs, bool merge,
                    const std::optional<fs::path>& out_dir, std::ostream& out,
                    std::ostream& err) {
  if (dirs.empty()) {
    fmt::print(err, "error: no score directory given\n");
    return kExitError;
  }
  try {
    std::vector<std::string> datasets;
    std::map<std::string, std::vector<SubmissionEntry>> by_bundle;
    for (const auto& arg : dirs) {
      for (const auto& dir : submission_dirs(arg)) {
        std::vector<std::string> names;
        auto entry = read_submission(dir, &names);
        if (datasets.empty()) {
          datasets = names;
        } else if (names != datasets) {
          throw std::runtime_error(fmt::format(
              "{}: dataset list differs from the other submissions", dir.string()));
        }
        by_bundle[entry.bundle].push_back(std::move(entry));
      }
    }

    std::vector<std::pair<std::string, Leaderboard>> boards;
    for (const auto& [bundle, entries] : by_bundle) {
      boards.emplace_back(bundle_label(bundle), build_leaderboard(entries, datasets));
    }
    if (merge) {
      std::vector<BundleEntries> bundles;
      for (const auto& [bundle, entries] : by_bundle) bundles.push_back({bundle, entries});
      boards.emplace_back("merged", merge_bundles(bundles, datasets));
    }

    if (out_dir) {
      fs::create_directories(*out_dir);
      for (const auto& [name, board] : boards) {
        std::ofstream file(*out_dir / fmt::format("leaderboard.{}.csv", name), std::ios::trunc);
        write_leaderboard_csv(board, file);
        if (!file) throw std::runtime_error("cannot write leaderboard");
      }
    } else {
      for (std::size_t i = 0; i < boards.size(); ++i) {
        if (i > 0) out << '\n';
        write_leaderboard_csv(boards[i].second, out);
      }
    }
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kExitError;
  }
  return kExitOk;
}

}  // namespace driftbench

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

// Subprocess-protocol wrapper around the boosted baseline. The process is
// stateless between steps except for its work directory: each revealed
// train file is kept under <workdir>/history and the model is rebuilt by
// replaying that history, so results match the in-process baseline.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <fmt/format.h>
#include <fmt/os.h>

#include "CLI11.hpp"

#include "driftbench/cli.hpp"
#include "driftbench/predictors.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  namespace db = driftbench;
  CLI::App app{"Reference baseline predictor for the subprocess protocol"};
  std::string train, test, schema, pred_out, workdir, options_path;
  double remaining = 0.0;
  int step = 0;
  std::uint64_t seed = 0;
  app.add_option("--train", train)->required();
  app.add_option("--test", test)->required();
  app.add_option("--schema", schema)->required();
  app.add_option("--pred-out", pred_out)->required();
  app.add_option("--remaining-budget", remaining)->required();
  app.add_option("--step", step)->required();
  app.add_option("--workdir", workdir)->required();
  app.add_option("--options", options_path, "JSON object of baseline options");
  app.add_option("--seed", seed, "Model seed");
  CLI11_PARSE(app, argc, argv);

  try {
    db::BaselineOptions options;
    if (!options_path.empty()) {
      // Reuse the run-config grammar for predictor options.
      db::Json doc = {{"datasets", db::Json::array()},
                      {"predictors", {{{"id", "reference"},
                                       {"builtin", "baseline"},
                                       {"options", db::read_json(options_path)}}}}};
      options = db::parse_run_config(doc, fs::current_path()).predictors.front().baseline;
    }
    options.model.seed = seed;

    const auto history = fs::path(workdir) / "history";
    fs::create_directories(history);
    fs::copy_file(train, history / fmt::format("step_{:06d}.csv", step),
                  fs::copy_options::overwrite_existing);

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(history)) files.push_back(e.path());
    std::sort(files.begin(), files.end());

    db::BaselinePredictor predictor(options);
    const db::CallContext ctx{step, remaining, {}};
    std::size_t first_row = 0;
    for (std::size_t b = 0; b < files.size(); ++b) {
      const auto block = db::load_dataset(files[b], schema);
      predictor.learn({block.schema, block.rows, block.labels, b, first_row}, ctx);
      first_row += block.size();
    }
    const auto rows = db::load_dataset(test, schema, db::LabelColumn::Absent);
    const auto scores =
        predictor.predict({rows.schema, rows.rows, {}, files.size(), first_row}, ctx);

    auto out = fmt::output_file(pred_out);
    for (double s : scores) out.print("{:.17g}\n", s);
  } catch (const std::exception& e) {
    std::cerr << "reference predictor: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

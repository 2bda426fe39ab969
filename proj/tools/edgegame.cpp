/*
 Copyright 2026 The edgegame Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// edgegame: command-line front end.
//
//   edgegame simulate <scenario> --out <dir>
//   edgegame ess <scenario>
//   edgegame compare <scenario> --deltas 0.5,1,1.5,2 [--out <dir>]
//   edgegame sweep <scenario> --param R_c --values 5,6,7 [--out <dir>]
//
// Exit codes: 0 success, 2 invalid scenario, 3 numerical blow-up, 1 other.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "edgegame/experiments.hpp"

namespace {

struct Overrides {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::string> scheme;
};

edgegame::Scenario load(const std::string& path, const Overrides& o) {
  edgegame::Scenario sc = edgegame::load_scenario(path);
  if (o.dt) sc.dt = *o.dt;
  if (o.horizon) sc.config.horizon = *o.horizon;
  if (o.scheme) {
    auto s = edgegame::parse_scheme(*o.scheme);
    if (!s) throw edgegame::InvalidScenario("scheme", "unknown scheme '" + *o.scheme + "'");
    sc.scheme = *s;
  }
  sc.validate();
  return sc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge/cloud market game simulator"};
  app.require_subcommand(1);

  Overrides over;
  std::string scenario_path;
  std::string out_dir;
  std::vector<double> deltas;
  std::string param;
  std::vector<double> values;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--dt", over.dt, "Override the step size");
    cmd->add_option("--horizon", over.horizon, "Override the horizon T");
    cmd->add_option("--scheme", over.scheme, "Override the scheme (olsec, ssec, fixed-controls)");
  };

  auto* simulate = app.add_subcommand("simulate", "Run a scenario and write trajectory.csv and summary.json");
  add_common(simulate);
  simulate->add_option("--out", out_dir, "Output directory")->required();

  auto* ess = app.add_subcommand("ess", "Print the closed-form equilibrium and its stability data");
  add_common(ess);

  auto* compare = app.add_subcommand("compare", "Compare olsec and ssec across learning rates");
  add_common(compare);
  compare->add_option("--deltas", deltas, "Learning rates")->delimiter(',')->required();
  compare->add_option("--out", out_dir, "Write compare.csv and compare.json here");

  auto* sweep = app.add_subcommand("sweep", "Solve once per parameter value");
  add_common(sweep);
  sweep->add_option("--param", param, "R_c, p_c, tau_x or delta")->required();
  sweep->add_option("--values", values, "Parameter values")->delimiter(',')->required();
  sweep->add_option("--out", out_dir, "Write sweep.csv here");

  CLI11_PARSE(app, argc, argv);

  try {
    const edgegame::Scenario sc = load(scenario_path, over);
    if (simulate->parsed()) {
      std::cout << edgegame::cmd_simulate(sc, out_dir).dump(2) << '\n';
    } else if (ess->parsed()) {
      std::cout << edgegame::cmd_ess(sc).dump(2) << '\n';
    } else if (compare->parsed()) {
      const auto rows = edgegame::compare_schemes(sc, deltas);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        edgegame::write_text(std::filesystem::path(out_dir) / "compare.csv", edgegame::compare_csv(rows));
        edgegame::write_text(std::filesystem::path(out_dir) / "compare.json",
                             edgegame::compare_json(rows).dump(2) + "\n");
      }
      std::cout << edgegame::compare_csv(rows);
    } else if (sweep->parsed()) {
      const auto rows = edgegame::sweep_parameter(sc, param, values);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        edgegame::write_text(std::filesystem::path(out_dir) / "sweep.csv", edgegame::sweep_csv(rows));
      }
      std::cout << edgegame::sweep_csv(rows);
    }
  } catch (const edgegame::InvalidScenario& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return 2;
  } catch (const edgegame::BlowUp& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

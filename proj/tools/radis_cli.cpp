// Copyright 2026 The radis Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "radis/experiment.hpp"

namespace {

int cmd_run(const std::string& config, const radis::ExperimentOptions& options) {
  return radis::run_experiment_file(config, options);
}

int cmd_emulate(const std::string& nodes_csv, const std::string& out_path,
                const std::string& emulator, std::size_t k, double lengthscale,
                double noise, std::size_t grid_points,
                const std::vector<double>& lower, const std::vector<double>& upper) {
  std::ifstream in(nodes_csv);
  if (!in) {
    std::cerr << nodes_csv << ": cannot open node CSV\n";
    return 2;
  }
  try {
    const auto nodes = radis::NodeSet::read_csv(in);
    radis::Box box = [&] {
      if (!lower.empty() || !upper.empty()) {
        if (lower.size() != nodes.dim() || upper.size() != nodes.dim()) {
          throw radis::config_error("emulate: bounds must match the node dimension");
        }
        return radis::Box(lower, upper);
      }
      std::vector<double> lo, hi;
      nodes.bounds(lo, hi);
      return radis::Box(std::move(lo), std::move(hi));
    }();
    nlohmann::json params{{"emulator", emulator}, {"k", k},
                          {"lengthscale", lengthscale}, {"noise", noise}};
    const radis::Grid grid = radis::Grid::uniform(box, grid_points);
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << out_path << ": cannot open output\n";
      return 2;
    }
    radis::emulate_nodes_to_csv(nodes, params, grid, out);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "emulate: " << e.what() << '\n';
    return 2;
  }
}

int cmd_oracle(const std::string& target, std::size_t grid_points) {
  try {
    nlohmann::json spec;
    if (!target.empty() && target.front() == '{') {
      spec = nlohmann::json::parse(target);
    } else {
      spec = nlohmann::json{{"kind", target}};
    }
    const auto ctx = radis::resolve_target(spec, ".");
    if (spec.at("kind") == "banana") {
      radis::BananaParams params;
      const auto truth = radis::grid_quadrature(radis::make_banana_target(params),
                                                grid_points);
      std::cout << "Z = " << truth.z << "\nmean =";
      for (double m : truth.mean) std::cout << ' ' << m;
      std::cout << "\ncovariance diag =";
      for (std::size_t d = 0; d < truth.mean.size(); ++d) {
        std::cout << ' ' << truth.covariance[d * truth.mean.size() + d];
      }
      std::cout << '\n';
      return 0;
    }
    if (std::isfinite(ctx.true_z)) {
      std::cout << "Z = " << ctx.true_z << "\nmean =";
      for (double m : ctx.true_mean) std::cout << ' ' << m;
      std::cout << '\n';
      return 0;
    }
    std::cerr << "oracle: no ground truth available for this target\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "oracle: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive importance sampling with regression emulators"};
  app.require_subcommand(1);

  radis::ExperimentOptions options;
  std::string config_path;
  std::uint64_t seed_start = 0;
  std::size_t seed_count = 0;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Experiment config JSON")->required();
  run->add_option("--seeds", seed_count, "Override the number of seeds");
  run->add_option("--seed-start", seed_start, "Override the first seed");
  run->add_option("--out", out_dir, "Override the output directory");
  run->add_option("--jobs", options.jobs, "Worker threads (default: cores)");
  run->add_option("--data", options.data_dir, "Directory holding data files");
  run->add_flag("--quiet", options.quiet, "Suppress the summary table");

  std::string nodes_csv, emulate_out = "emulator_dump.csv", emulator = "nn";
  std::size_t k = 1, grid_points = 100, oracle_points = 2000;
  double lengthscale = 1.0, noise = 1e-6;
  std::vector<double> lower, upper;
  auto* emulate = app.add_subcommand("emulate", "Evaluate an emulator built from saved nodes on a grid");
  emulate->add_option("nodes", nodes_csv, "Node CSV (x_1..x_d,log_pi)")->required();
  emulate->add_option("--out", emulate_out, "Output CSV path");
  emulate->add_option("--emulator", emulator, "nn or gp");
  emulate->add_option("--k", k, "NN neighbor count");
  emulate->add_option("--lengthscale", lengthscale, "GP kernel lengthscale");
  emulate->add_option("--noise", noise, "GP noise level");
  emulate->add_option("--grid", grid_points, "Grid points per dimension");
  emulate->add_option("--lower", lower, "Grid lower bounds");
  emulate->add_option("--upper", upper, "Grid upper bounds");

  std::string oracle_target = "banana";
  auto* oracle = app.add_subcommand("oracle", "Print grid ground truth for a target");
  oracle->add_option("target", oracle_target, "Target name or JSON spec");
  oracle->add_option("--grid", oracle_points, "Grid points per dimension");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    if (seed_count > 0) {
      radis::SeedRange seeds;
      seeds.start = seed_start > 0 ? seed_start : 1;
      seeds.count = seed_count;
      options.seeds = seeds;
    }
    if (!out_dir.empty()) options.output_dir = out_dir;
    return cmd_run(config_path, options);
  }
  if (emulate->parsed()) {
    return cmd_emulate(nodes_csv, emulate_out, emulator, k, lengthscale, noise,
                       grid_points, lower, upper);
  }
  return cmd_oracle(oracle_target, oracle_points);
}

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

#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "radis/experiment.hpp"

using namespace radis;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

json minimal_config(const std::string& out_dir) {
  return json{{"name", "minimal"},
              {"target", {{"kind", "banana"}, {"oracle_points", 200}}},
              {"seeds", {{"start", 1}, {"count", 1}}},
              {"output_dir", out_dir},
              {"algorithms",
               json::array({{{"kind", "is"}, {"proposal", "uniform"}, {"budget", 100}}})}};
}

std::vector<fs::path> record_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

json load_normalized(const fs::path& path) {
  std::ifstream in(path);
  json j = json::parse(in);
  j["wall_time_ms"] = 0.0;  // the one non-deterministic field
  return j;
}

}  // namespace

TEST_CASE("experiment config round-trips losslessly", "[experiment]") {
  const json raw = minimal_config("out");
  const auto cfg = ExperimentConfig::from_json(raw);
  const auto echo = ExperimentConfig::from_json(cfg.to_json());
  CHECK(cfg.to_json() == echo.to_json());
  CHECK(cfg.name == "minimal");
  CHECK(cfg.seeds.count == 1);
}

TEST_CASE("grid expansion is a cartesian product over array axes", "[experiment]") {
  const json algorithm{{"kind", "pmc"},
                       {"proposals", json::array({10, 100})},
                       {"scale", json::array({1, 2, 3})},
                       {"budget", 1000}};
  const auto cells = expand_grid(algorithm);
  CHECK(cells.size() == 6);
  for (const auto& cell : cells) {
    CHECK(cell.at("proposals").is_number());
    CHECK(cell.at("scale").is_number());
    CHECK(cell.at("budget") == 1000);
  }
}

TEST_CASE("minimal experiment produces records and csv rows", "[experiment]") {
  const fs::path out_dir = fs::temp_directory_path() / "radis_test_minimal";
  fs::remove_all(out_dir);
  const auto cfg = ExperimentConfig::from_json(minimal_config(out_dir.string()));
  ExperimentOptions options;
  options.quiet = true;
  options.jobs = 2;
  REQUIRE(run_experiment(cfg, options) == 0);

  const fs::path base = out_dir / "minimal";
  const auto records = record_files(base);
  REQUIRE(records.size() == 1);
  const auto record = RunRecord::from_json(load_normalized(records[0]));
  CHECK(record.status == "ok");
  CHECK(record.target_evaluations == 100);
  CHECK(record.z_hat > 0.0);

  std::ifstream summary(base / "summary.csv");
  std::string line;
  std::getline(summary, line);  // header
  std::size_t rows = 0;
  while (std::getline(summary, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 1);  // |algorithms| x |cells|
  fs::remove_all(out_dir);
}

TEST_CASE("experiments are byte-reproducible modulo wall time", "[experiment]") {
  const fs::path out_a = fs::temp_directory_path() / "radis_test_repro_a";
  const fs::path out_b = fs::temp_directory_path() / "radis_test_repro_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  json raw = minimal_config(out_a.string());
  raw["algorithms"].push_back({{"kind", "nn_ais"}, {"iterations", 5},
                               {"samples", 10}, {"inner_batch", 200},
                               {"initial_nodes", 10}});
  raw["seeds"]["count"] = 2;
  ExperimentOptions options;
  options.quiet = true;
  REQUIRE(run_experiment(ExperimentConfig::from_json(raw), options) == 0);
  raw["output_dir"] = out_b.string();
  REQUIRE(run_experiment(ExperimentConfig::from_json(raw), options) == 0);

  const auto files_a = record_files(out_a / "minimal");
  const auto files_b = record_files(out_b / "minimal");
  REQUIRE(files_a.size() == files_b.size());
  REQUIRE(files_a.size() == 4);
  for (std::size_t i = 0; i < files_a.size(); ++i) {
    CHECK(files_a[i].filename() == files_b[i].filename());
    CHECK(load_normalized(files_a[i]) == load_normalized(files_b[i]));
  }
  fs::remove_all(out_a);
  fs::remove_all(out_b);
}

TEST_CASE("invalid configs are rejected with location info", "[experiment]") {
  SECTION("unparseable JSON reports a line") {
    const fs::path bad = fs::temp_directory_path() / "radis_bad.json";
    std::ofstream(bad.string()) << "{\n  \"name\": \"x\",\n  broken\n}\n";
    ExperimentOptions options;
    options.quiet = true;
    CHECK(run_experiment_file(bad.string(), options) == 2);
    fs::remove(bad);
  }
  SECTION("missing algorithms is a config error") {
    json raw = minimal_config("out");
    raw.erase("algorithms");
    CHECK_THROWS_AS(ExperimentConfig::from_json(raw), json::exception);
  }
  SECTION("unknown algorithm kind fails the cell, not the experiment") {
    const fs::path out_dir = fs::temp_directory_path() / "radis_test_badalg";
    fs::remove_all(out_dir);
    json raw = minimal_config(out_dir.string());
    raw["algorithms"].push_back({{"kind", "warp_drive"}});
    ExperimentOptions options;
    options.quiet = true;
    REQUIRE(run_experiment(ExperimentConfig::from_json(raw), options) == 0);
    const auto records = record_files(out_dir / "minimal");
    std::size_t failed = 0;
    for (const auto& file : records) {
      std::ifstream in(file);
      const json j = json::parse(in);
      if (j.at("status").get<std::string>() != "ok") ++failed;
    }
    CHECK(failed == 1);
    fs::remove_all(out_dir);
  }
}

TEST_CASE("emulator surface dump", "[experiment]") {
  SECTION("a single node dumps a constant surface") {
    NodeSet nodes(1);
    nodes.add_nodes(std::vector<double>{0.5}, std::vector<double>{std::log(2.0)}, 0.0);
    const Grid grid = Grid::uniform(Box::cube(1, 0.0, 1.0), 8);
    std::ostringstream out;
    emulate_nodes_to_csv(nodes, {{"emulator", "nn"}}, grid, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x_1,value");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      CHECK(line.substr(line.find(',') + 1) == "2");
      ++rows;
    }
    CHECK(rows == 8);
  }
  SECTION("the dumped surface L2 matches the in-library diagnostic") {
    // nodes from a short banana run, dumped and re-integrated
    const auto target = make_banana_target();
    auto cfg = RadisConfig::single(20, 10, 400);
    cfg.init.count = 10;
    const auto run = run_radis(target, cfg, Rng(9));
    const Grid grid = Grid::uniform(Box::cube(2, -10.0, 10.0), 60);
    std::ostringstream dump;
    emulate_nodes_to_csv(*run.nodes, {{"emulator", "nn"}}, grid, dump);
    // read the dump back and compute sum (v - pi)^2 dV directly
    std::istringstream in(dump.str());
    std::string line;
    std::getline(in, line);
    double acc = 0.0;
    while (std::getline(in, line)) {
      std::stringstream row(line);
      std::string cell;
      Point x(2);
      std::getline(row, cell, ',');
      x[0] = std::stod(cell);
      std::getline(row, cell, ',');
      x[1] = std::stod(cell);
      std::getline(row, cell, ',');
      const double v = std::stod(cell);
      const double diff = v - std::exp(target.log_pi(x));
      acc += diff * diff;
    }
    const double l2_from_dump = std::sqrt(acc * grid.cell_volume());
    const auto em = build_nn(run.nodes, 1, grid.box());
    const double l2_direct = l2_distance_grid(
        [&](std::span<const double> p) { return em->value(p); },
        [&](std::span<const double> p) { return std::exp(target.log_pi(p)); },
        grid);
    CHECK(l2_from_dump == Approx(l2_direct).epsilon(1e-10));
  }
  SECTION("an empty grid is rejected") {
    NodeSet nodes(1);
    nodes.add_nodes(std::vector<double>{0.5}, std::vector<double>{0.0}, 0.0);
    CHECK_THROWS_AS(Grid(Box::cube(1, 0.0, 1.0), {0}), std::invalid_argument);
  }
  SECTION("malformed node CSV reports the row") {
    std::stringstream bad("x_1,log_pi\n0.5\n");
    CHECK_THROWS_WITH(NodeSet::read_csv(bad),
                      Catch::Matchers::ContainsSubstring("row 2"));
  }
}

TEST_CASE("oracle target resolution", "[experiment]") {
  const auto ctx = resolve_target({{"kind", "banana"}, {"oracle_points", 400}}, ".");
  CHECK(ctx.true_z == Approx(7.9976).epsilon(1e-3));
  CHECK(ctx.true_mean[0] == Approx(-0.4841).margin(1e-3));
  CHECK_THROWS_AS(resolve_target({{"kind", "nonsense"}}, "."), config_error);
}

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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace radis {

/// One sampler run, fully reproducible from (config echo, seed). The
/// wall time is informational; every other field is deterministic.
struct RunRecord {
  std::string experiment;
  std::string algorithm;
  nlohmann::json params;  // resolved parameter cell
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string status = "ok";  // or "failed: <reason>"
  double z_hat = 0.0;
  double log_z_hat = 0.0;
  std::vector<double> mean;
  double ess = 0.0;
  std::vector<double> c_hat_trace;
  std::uint64_t target_evaluations = 0;
  std::uint64_t forward_evaluations = 0;
  double param_error = 0.0;  // sequential inversion only
  double wall_time_ms = 0.0;

  nlohmann::json to_json() const {
    return nlohmann::json{{"experiment", experiment},
                          {"algorithm", algorithm},
                          {"params", params},
                          {"config_hash", config_hash},
                          {"seed", seed},
                          {"status", status},
                          {"z_hat", z_hat},
                          {"log_z_hat", log_z_hat},
                          {"mean", mean},
                          {"ess", ess},
                          {"c_hat_trace", c_hat_trace},
                          {"target_evaluations", target_evaluations},
                          {"forward_evaluations", forward_evaluations},
                          {"param_error", param_error},
                          {"wall_time_ms", wall_time_ms}};
  }

  static RunRecord from_json(const nlohmann::json& j) {
    RunRecord r;
    r.experiment = j.at("experiment").get<std::string>();
    r.algorithm = j.at("algorithm").get<std::string>();
    r.params = j.at("params");
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.status = j.at("status").get<std::string>();
    r.z_hat = j.at("z_hat").get<double>();
    r.log_z_hat = j.at("log_z_hat").get<double>();
    r.mean = j.at("mean").get<std::vector<double>>();
    r.ess = j.at("ess").get<double>();
    r.c_hat_trace = j.at("c_hat_trace").get<std::vector<double>>();
    r.target_evaluations = j.at("target_evaluations").get<std::uint64_t>();
    r.forward_evaluations = j.at("forward_evaluations").get<std::uint64_t>();
    r.param_error = j.at("param_error").get<double>();
    r.wall_time_ms = j.at("wall_time_ms").get<double>();
    return r;
  }
};

}  // namespace radis

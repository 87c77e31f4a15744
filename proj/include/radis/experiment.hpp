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

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "radis/baselines.hpp"
#include "radis/diagnostics.hpp"
#include "radis/driver.hpp"
#include "radis/inversion.hpp"
#include "radis/run_record.hpp"
#include "radis/targets.hpp"

namespace radis {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config plumbing

struct SeedRange {
  std::uint64_t start = 1;
  std::size_t count = 1;
};

/// FNV-1a over the canonical (key-sorted) JSON dump.
inline std::string config_hash(const json& j) {
  const std::string dump = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Cartesian expansion: every top-level key whose value is an array of
/// scalars becomes a grid axis.
inline std::vector<json> expand_grid(const json& algorithm) {
  std::vector<std::string> axes;
  for (const auto& [key, value] : algorithm.items()) {
    if (value.is_array() && !value.empty() && value.front().is_number()) {
      axes.push_back(key);
    }
  }
  std::vector<json> cells{algorithm};
  for (const auto& axis : axes) {
    std::vector<json> next;
    for (const auto& cell : cells) {
      for (const auto& v : algorithm.at(axis)) {
        json expanded = cell;
        expanded[axis] = v;
        next.push_back(std::move(expanded));
      }
    }
    cells = std::move(next);
  }
  return cells;
}

struct ExperimentConfig {
  std::string name;
  json target;
  SeedRange seeds;
  std::string output_dir = "out";
  std::vector<json> algorithms;

  static ExperimentConfig from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.name = j.at("name").get<std::string>();
    cfg.target = j.at("target");
    if (j.contains("seeds")) {
      cfg.seeds.start = j.at("seeds").value("start", std::uint64_t{1});
      cfg.seeds.count = j.at("seeds").value("count", std::size_t{1});
    }
    if (cfg.seeds.count == 0) throw config_error("seeds.count must be positive");
    cfg.output_dir = j.value("output_dir", std::string{"out"});
    if (!j.contains("algorithms") || !j.at("algorithms").is_array() ||
        j.at("algorithms").empty()) {
      throw config_error("algorithms: need a non-empty array");
    }
    for (const auto& a : j.at("algorithms")) cfg.algorithms.push_back(a);
    return cfg;
  }

  json to_json() const {
    json j{{"name", name},
           {"target", target},
           {"seeds", {{"start", seeds.start}, {"count", seeds.count}}},
           {"output_dir", output_dir},
           {"algorithms", algorithms}};
    return j;
  }
};

// ---------------------------------------------------------------------------
// Target resolution

struct TargetContext {
  std::function<TargetDensity()> make;  // fresh ledger per run
  std::size_t dim = 0;
  std::optional<Box> domain_box;
  // ground truth when known
  double true_z = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> true_mean;
  std::vector<double> true_covariance;  // row-major
  // sequential-inversion payload
  bool is_inversion = false;
  std::shared_ptr<const SyntheticModel> model;
  std::size_t problem_count = 0;
  double noise_stddev = 1.0;
  std::uint64_t observation_seed = 1;
};

inline TargetContext resolve_target(const json& spec, const std::string& data_dir) {
  TargetContext ctx;
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "banana") {
    BananaParams params;
    params.b = spec.value("b", params.b);
    params.eta0 = spec.value("eta0", params.eta0);
    params.eta1 = spec.value("eta1", params.eta1);
    params.box_halfwidth = spec.value("box_halfwidth", params.box_halfwidth);
    ctx.make = [params] { return make_banana_target(params); };
    ctx.dim = params.eta.size();
    ctx.domain_box = Box::cube(ctx.dim, -params.box_halfwidth, params.box_halfwidth);
    const std::size_t oracle_points = spec.value("oracle_points", std::size_t{2000});
    const auto truth = grid_quadrature(make_banana_target(params), oracle_points);
    ctx.true_z = truth.z;
    ctx.true_mean = truth.mean;
    ctx.true_covariance = truth.covariance;
  } else if (kind == "gaussian_mixture") {
    GaussianMixtureParams params;
    params.dim = spec.value("dim", params.dim);
    ctx.make = [params] { return make_gaussian_mixture_target(params); };
    ctx.dim = params.dim;
    ctx.true_z = 1.0;
    const auto modes = gaussian_mixture_modes(params.dim);
    ctx.true_mean.assign(params.dim, 0.0);
    for (const auto& mu : modes) {
      for (std::size_t d = 0; d < params.dim; ++d) {
        ctx.true_mean[d] += mu[d] / 3.0;
      }
    }
  } else if (kind == "synthetic_inversion") {
    const std::string file = spec.value("constants", std::string{"data/synthetic_model_constants.csv"});
    const auto path = std::filesystem::path(data_dir) / file;
    auto model = std::make_shared<const SyntheticModel>(SyntheticModel::from_csv(path.string()));
    ctx.is_inversion = true;
    ctx.model = model;
    ctx.dim = model->input_dim();
    ctx.domain_box = model->prior_box();
    ctx.problem_count = spec.value("problems", std::size_t{16});
    ctx.noise_stddev = spec.value("noise", 1.0);
    ctx.observation_seed = spec.value("observation_seed", std::uint64_t{1});
    ctx.make = [] { return TargetDensity([](std::span<const double>) { return 0.0; }, 1, Domain::unbounded(1)); };
  } else {
    throw config_error("unknown target kind: " + kind);
  }
  return ctx;
}

// ---------------------------------------------------------------------------
// Per-cell runners

namespace detail {

inline Box cell_init_box(const json& params, const TargetContext& ctx) {
  if (params.contains("init_box")) {
    const auto& b = params.at("init_box");
    if (b.is_array()) {
      return Box::cube(ctx.dim, b.at(0).get<double>(), b.at(1).get<double>());
    }
    return Box(b.at("lower").get<std::vector<double>>(),
               b.at("upper").get<std::vector<double>>());
  }
  if (params.contains("init_halfwidth")) {
    const double h = params.at("init_halfwidth").get<double>();
    return Box::cube(ctx.dim, -h, h);
  }
  if (ctx.domain_box) return *ctx.domain_box;
  throw config_error("algorithm needs init_box or init_halfwidth on this target");
}

inline DensityPtr cell_q_par(const json& params, const TargetContext& ctx) {
  if (!params.contains("q_par") || params.at("q_par").is_null()) return nullptr;
  const auto& q = params.at("q_par");
  if (q.is_string()) {
    const std::string s = q.get<std::string>();
    if (s == "none") return nullptr;
    if (s == "uniform") {
      if (!ctx.domain_box) {
        throw config_error("q_par=uniform needs a bounded target");
      }
      return std::make_shared<UniformBoxDensity>(*ctx.domain_box);
    }
    throw config_error("unknown q_par: " + s);
  }
  const std::string kind = q.at("kind").get<std::string>();
  if (kind == "gaussian") {
    auto mean = q.at("mean").get<std::vector<double>>();
    const double sd = q.at("stddev").get<double>();
    return std::make_shared<GaussianDensity>(
        GaussianDensity::isotropic(std::move(mean), sd * sd));
  }
  if (kind == "student_t") {
    auto loc = q.at("location").get<std::vector<double>>();
    auto scale = q.at("scale").get<std::vector<double>>();
    return std::make_shared<StudentTDensity>(std::move(loc), std::move(scale),
                                             q.value("dof", 5.0));
  }
  throw config_error("unknown q_par kind: " + kind);
}

inline AlphaSchedule cell_alpha(const json& params) {
  AlphaSchedule alpha;
  if (!params.contains("alpha")) return alpha;
  const auto& a = params.at("alpha");
  const std::string kind = a.value("kind", std::string{"fixed"});
  if (kind == "zero") {
    alpha.kind = AlphaSchedule::Kind::Zero;
  } else if (kind == "fixed") {
    alpha.kind = AlphaSchedule::Kind::Fixed;
    alpha.value = a.value("value", 0.5);
  } else if (kind == "decay") {
    alpha.kind = AlphaSchedule::Kind::Decay;
    alpha.value = a.value("value", 0.05);
  } else {
    throw config_error("unknown alpha kind: " + kind);
  }
  return alpha;
}

inline EmulatorSpec cell_emulator(const json& params) {
  const std::string kind = params.value("emulator", std::string{"nn"});
  if (kind == "nn") {
    NnEmulatorSpec spec;
    spec.k = params.value("k", std::size_t{1});
    return spec;
  }
  if (kind == "gp") {
    GpEmulatorSpec spec;
    spec.noise = params.value("noise", spec.noise);
    spec.tune_every = params.value("tune_every", spec.tune_every);
    spec.max_nodes = params.value("max_nodes", spec.max_nodes);
    spec.lengthscale = params.value("lengthscale", spec.lengthscale);
    return spec;
  }
  throw config_error("unknown emulator kind: " + kind);
}

inline DensityPtr cell_is_proposal(const json& params, const TargetContext& ctx) {
  const auto& p = params.at("proposal");
  const std::string s = p.is_string() ? p.get<std::string>() : p.at("kind").get<std::string>();
  if (s == "uniform") {
    if (!ctx.domain_box) throw config_error("uniform proposal needs a bounded target");
    return std::make_shared<UniformBoxDensity>(*ctx.domain_box);
  }
  if (s == "gaussian_star" || s == "gaussian_star_plus_uniform") {
    if (ctx.true_mean.empty() || ctx.true_covariance.empty()) {
      throw config_error("moment-matched proposal needs target ground truth");
    }
    const auto n = static_cast<Eigen::Index>(ctx.dim);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        cov(i, j) = ctx.true_covariance[static_cast<std::size_t>(i) * ctx.dim +
                                        static_cast<std::size_t>(j)];
      }
    }
    auto star = std::make_shared<GaussianDensity>(ctx.true_mean, cov);
    if (s == "gaussian_star") return star;
    auto uniform = std::make_shared<UniformBoxDensity>(*ctx.domain_box);
    return std::make_shared<MixtureDensity>(MixtureDensity::equally_weighted(
        {std::move(star), std::move(uniform)}));
  }
  if (s == "gaussian") {
    auto mean = p.at("mean").get<std::vector<double>>();
    const double sd = p.at("stddev").get<double>();
    return std::make_shared<GaussianDensity>(
        GaussianDensity::isotropic(std::move(mean), sd * sd));
  }
  throw config_error("unknown IS proposal: " + s);
}

inline void fill_common(RunRecord& rec, const WeightedParticleSet& particles) {
  rec.log_z_hat = particles.log_evidence();
  rec.z_hat = std::exp(rec.log_z_hat);
  rec.mean = particles.mean();
  rec.ess = particles.ess();
}

}  // namespace detail

/// Executes one (algorithm, parameter cell, seed) run and fills the
/// record. Exceptions escape to the caller, which marks the cell failed.
inline RunRecord run_cell(const TargetContext& ctx, const std::string& kind,
                          const json& params, std::uint64_t seed,
                          const std::string& experiment) {
  RunRecord rec;
  rec.experiment = experiment;
  rec.algorithm = kind;
  rec.params = params;
  rec.config_hash = config_hash(params);
  rec.seed = seed;
  Rng rng(seed);

  if (kind == "is") {
    TargetDensity target = ctx.make();
    const auto proposal = detail::cell_is_proposal(params, ctx);
    auto run = standard_is(target, *proposal,
                           params.at("budget").get<std::uint64_t>(), rng);
    detail::fill_common(rec, run.particles);
    rec.target_evaluations = run.target_evaluations;
    return rec;
  }

  if (kind == "nn_ais" || kind == "gp_ais" || kind == "deep_ais") {
    TargetDensity target = ctx.make();
    RadisConfig cfg;
    cfg.iterations = params.at("iterations").get<std::size_t>();
    cfg.samples_per_iteration = params.at("samples").get<std::size_t>();
    if (kind == "deep_ais") {
      for (const auto& layer : params.at("layers")) {
        cfg.layers.push_back(
            {detail::cell_emulator(layer), layer.at("batch").get<std::size_t>()});
      }
    } else {
      json em = params;
      em["emulator"] = kind == "gp_ais" ? "gp" : "nn";
      cfg.layers.push_back({detail::cell_emulator(em),
                            params.at("inner_batch").get<std::size_t>()});
    }
    cfg.init.count = params.value("initial_nodes", std::size_t{10});
    cfg.init.include_vertices = params.value("include_vertices", false);
    if (params.contains("init_box") || params.contains("init_halfwidth")) {
      cfg.init.box = detail::cell_init_box(params, ctx);
    }
    cfg.q_par = detail::cell_q_par(params, ctx);
    cfg.alpha = detail::cell_alpha(params);
    if (cfg.q_par != nullptr && !params.contains("alpha")) {
      cfg.alpha = {AlphaSchedule::Kind::Fixed, 0.5};
    }
    cfg.regularized_resampling = params.value("regularized", false);
    if (kind == "gp_ais" && !ctx.domain_box) {
      cfg.aux.kind = AuxProposalSpec::Kind::StudentTMatched;
    }
    cfg.seed = seed;
    auto run = run_radis(target, cfg, rng);
    detail::fill_common(rec, run.particles);
    rec.c_hat_trace = run.c_hat_trace;
    rec.target_evaluations = run.target_evaluations;
    return rec;
  }

  if (kind == "nn_ais_lais") {
    TargetDensity target = ctx.make();
    const Box init_box = detail::cell_init_box(params, ctx);
    const double scale = params.at("scale").get<double>();
    const std::size_t chain_len = params.at("chain").get<std::size_t>();
    const std::uint64_t budget = params.at("budget").get<std::uint64_t>();
    const std::size_t n = params.at("samples").get<std::size_t>();
    Point start(ctx.dim);
    const bool center = params.value("start", std::string{"center"}) == "center";
    for (std::size_t d = 0; d < ctx.dim; ++d) {
      start[d] = center ? 0.5 * (init_box.lower()[d] + init_box.upper()[d])
                        : rng.uniform(init_box.lower()[d], init_box.upper()[d]);
    }
    if (chain_len == 0 || chain_len >= budget || (budget - chain_len) % n != 0) {
      throw config_error("nn_ais_lais: budget must equal chain + samples * iterations");
    }
    auto chain = metropolis_chain(target, std::move(start), scale, chain_len, rng);
    RadisConfig cfg;
    cfg.iterations = (budget - chain_len) / n;
    cfg.samples_per_iteration = n;
    cfg.layers.push_back({NnEmulatorSpec{params.value("k", std::size_t{1})},
                          params.at("inner_batch").get<std::size_t>()});
    cfg.q_par = adaptive_parametric_mixture(chain.states_flat, ctx.dim, scale);
    cfg.alpha = {AlphaSchedule::Kind::Fixed, params.value("alpha_value", 0.5)};
    cfg.init.count = 0;
    cfg.init.points_flat = chain.states_flat;
    cfg.init.log_values = chain.log_pi;
    cfg.seed = seed;
    auto run = run_radis(target, cfg, rng);
    detail::fill_common(rec, run.particles);
    rec.c_hat_trace = run.c_hat_trace;
    rec.target_evaluations = target.evaluations();  // chain + adaptive stage
    return rec;
  }

  if (kind == "pmc" || kind == "dm_pmc") {
    TargetDensity target = ctx.make();
    PmcConfig cfg;
    cfg.proposal_count = params.at("proposals").get<std::size_t>();
    cfg.scale = params.at("scale").get<double>();
    cfg.budget = params.at("budget").get<std::uint64_t>();
    cfg.init_box = detail::cell_init_box(params, ctx);
    cfg.deterministic_mixture = kind == "dm_pmc";
    auto run = pmc(target, cfg, rng);
    detail::fill_common(rec, run.particles);
    rec.target_evaluations = run.target_evaluations;
    return rec;
  }

  if (kind == "oc_lais") {
    TargetDensity target = ctx.make();
    OcLaisConfig cfg;
    cfg.chain_length = params.at("chain").get<std::size_t>();
    cfg.scale = params.at("scale").get<double>();
    cfg.budget = params.at("budget").get<std::uint64_t>();
    cfg.init_box = detail::cell_init_box(params, ctx);
    cfg.start_at_center = params.value("start", std::string{"center"}) == "center";
    auto run = oc_lais(target, cfg, rng);
    detail::fill_common(rec, run.particles);
    rec.target_evaluations = run.target_evaluations;
    return rec;
  }

  if (kind == "amis") {
    TargetDensity target = ctx.make();
    AmisConfig cfg;
    cfg.samples_per_iteration = params.at("samples").get<std::size_t>();
    cfg.scale = params.at("scale").get<double>();
    cfg.budget = params.at("budget").get<std::uint64_t>();
    cfg.init_box = detail::cell_init_box(params, ctx);
    cfg.adapt_covariance = params.value("adapt_covariance", true);
    auto run = amis(target, cfg, rng);
    detail::fill_common(rec, run.particles);
    rec.target_evaluations = run.target_evaluations;
    return rec;
  }

  if (kind == "sequential_nn_ais") {
    if (!ctx.is_inversion) {
      throw config_error("sequential_nn_ais needs a synthetic_inversion target");
    }
    auto caching = std::make_shared<CachingForwardModel>(ctx.model);
    std::vector<Point> truth;
    auto problems = make_synthetic_problem_sequence(
        caching, ctx.problem_count, ctx.noise_stddev, ctx.observation_seed, &truth);
    RadisConfig cfg;
    cfg.iterations = params.at("iterations").get<std::size_t>();
    cfg.samples_per_iteration = params.at("samples").get<std::size_t>();
    cfg.layers.push_back({NnEmulatorSpec{params.value("k", std::size_t{1})},
                          params.at("inner_batch").get<std::size_t>()});
    cfg.init.count = params.value("initial_nodes", std::size_t{50});
    cfg.init.include_vertices = params.value("include_vertices", false);
    const bool share = params.value("share_nodes", true);
    auto results = sequential_inversion(problems, cfg, share, rng);
    const Box& box = ctx.model->prior_box();
    double err = 0.0;
    std::uint64_t fwd = 0, tgt = 0;
    for (std::size_t r = 0; r < results.size(); ++r) {
      for (std::size_t d = 0; d < ctx.dim; ++d) {
        err += std::abs(results[r].map[d] - truth[r][d]) /
               (box.upper()[d] - box.lower()[d]);
      }
      fwd += results[r].forward_evaluations;
      tgt += results[r].target_evaluations;
    }
    rec.param_error = err / static_cast<double>(results.size() * ctx.dim);
    rec.forward_evaluations = fwd;
    rec.target_evaluations = tgt;
    rec.z_hat = results.back().evidence;
    rec.log_z_hat = std::log(rec.z_hat);
    rec.mean = {};
    rec.ess = 0.0;
    return rec;
  }

  throw config_error("unknown algorithm kind: " + kind);
}

// ---------------------------------------------------------------------------
// Aggregation and the runner

struct CellSummary {
  std::string algorithm;
  std::string config_hash;
  json params;
  std::size_t seed_count = 0;
  std::size_t failed = 0;
  std::vector<RunRecord> records;  // successful ones
};

struct ExperimentOptions {
  std::optional<SeedRange> seeds;
  std::optional<std::string> output_dir;
  std::size_t jobs = 0;  // 0: hardware concurrency
  std::string data_dir = ".";
  bool quiet = false;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

inline double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1) /
                   static_cast<double>(v.size()));
}

inline std::string compact_params(const json& params) {
  std::string out;
  for (const auto& [key, value] : params.items()) {
    if (value.is_number() || value.is_string() || value.is_boolean()) {
      if (!out.empty()) out += ';';
      out += key + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return out;
}

}  // namespace detail

/// Runs every (algorithm x parameter cell x seed), writes one RunRecord
/// JSON per run plus the aggregated summary and long-format metric
/// CSVs. Cells that throw are marked failed and the run continues.
inline int run_experiment(const ExperimentConfig& config,
                          const ExperimentOptions& options) {
  const SeedRange seeds = options.seeds.value_or(config.seeds);
  const std::string out_dir = options.output_dir.value_or(config.output_dir);
  const TargetContext ctx = resolve_target(config.target, options.data_dir);

  struct Task {
    std::size_t cell;
    std::uint64_t seed;
  };
  std::vector<CellSummary> cells;
  std::vector<std::string> cell_kind;
  for (const auto& algorithm : config.algorithms) {
    for (const auto& cell_params : expand_grid(algorithm)) {
      json params = cell_params;
      const std::string kind = params.at("kind").get<std::string>();
      params.erase("kind");
      CellSummary summary;
      summary.algorithm = kind;
      summary.params = params;
      summary.config_hash = config_hash(params);
      cells.push_back(std::move(summary));
      cell_kind.push_back(kind);
    }
  }
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t s = 0; s < seeds.count; ++s) {
      tasks.push_back({c, seeds.start + s});
    }
  }
  std::vector<RunRecord> results(tasks.size());
  std::atomic<std::size_t> next{0};
  const std::size_t jobs = options.jobs > 0
                               ? options.jobs
                               : std::max(1u, std::thread::hardware_concurrency());
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      const auto t0 = std::chrono::steady_clock::now();
      RunRecord rec;
      try {
        rec = run_cell(ctx, cells[task.cell].algorithm, cells[task.cell].params,
                       task.seed, config.name);
      } catch (const std::exception& e) {
        rec.experiment = config.name;
        rec.algorithm = cells[task.cell].algorithm;
        rec.params = cells[task.cell].params;
        rec.config_hash = cells[task.cell].config_hash;
        rec.seed = task.seed;
        rec.status = std::string{"failed: "} + e.what();
      }
      rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      results[i] = std::move(rec);
    }
  };
  {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // collect
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& cell = cells[tasks[i].cell];
    ++cell.seed_count;
    if (results[i].status == "ok") {
      cell.records.push_back(results[i]);
    } else {
      ++cell.failed;
    }
  }

  // write artifacts
  namespace fs = std::filesystem;
  const fs::path base = fs::path(out_dir) / config.name;
  fs::create_directories(base);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto& rec = results[i];
    std::ostringstream name;
    name << rec.algorithm << '_' << rec.config_hash << "_seed" << rec.seed
         << ".json";
    std::ofstream out(base / name.str());
    out << rec.to_json().dump(2) << '\n';
  }

  std::ofstream summary_csv(base / "summary.csv");
  summary_csv << "algorithm,config_hash,params,seed_count,failed,z_mean,z_mae,"
                 "z_rel_rmse,mu_rel_rmse,ess_mean,evals_mean,param_error_mean\n";
  std::ofstream metrics_csv(base / "metrics.csv");
  write_metric_csv_header(metrics_csv);
  const bool has_truth = std::isfinite(ctx.true_z);

  std::ostringstream table;
  table << "algorithm                        cell              z_mae    "
           "z_rel_rmse  mu_rel_rmse  failed\n";
  for (const auto& cell : cells) {
    std::vector<double> zs, ess, evals, param_errors, abs_errors;
    std::vector<std::vector<double>> means;
    for (const auto& r : cell.records) {
      zs.push_back(r.z_hat);
      ess.push_back(r.ess);
      evals.push_back(static_cast<double>(r.target_evaluations));
      means.push_back(r.mean);
      param_errors.push_back(r.param_error);
      if (has_truth) abs_errors.push_back(std::abs(r.z_hat - ctx.true_z));
    }
    const double z_mae = has_truth && !zs.empty() ? mae(zs, ctx.true_z) : 0.0;
    const double z_rrmse =
        has_truth && !zs.empty() ? relative_rmse(zs, ctx.true_z) : 0.0;
    double mu_rrmse = 0.0;
    if (has_truth && !means.empty() && !ctx.true_mean.empty() &&
        !means.front().empty()) {
      mu_rrmse = relative_rmse_vector(means, ctx.true_mean);
    }
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%zu,%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                  cell.algorithm.c_str(), cell.config_hash.c_str(),
                  detail::compact_params(cell.params).c_str(), cell.seed_count,
                  cell.failed, detail::mean_of(zs), z_mae, z_rrmse, mu_rrmse,
                  detail::mean_of(ess), detail::mean_of(evals),
                  detail::mean_of(param_errors));
    summary_csv << buf;
    if (has_truth && !zs.empty()) {
      write_metric_csv_row(metrics_csv,
                           {"z_mae", cell.algorithm, cell.config_hash,
                            cell.records.size(), z_mae, detail::stderr_of(abs_errors)});
      write_metric_csv_row(metrics_csv, {"z_rel_rmse", cell.algorithm,
                                         cell.config_hash, cell.records.size(),
                                         z_rrmse, 0.0});
      if (mu_rrmse > 0.0) {
        write_metric_csv_row(metrics_csv, {"mu_rel_rmse", cell.algorithm,
                                           cell.config_hash, cell.records.size(),
                                           mu_rrmse, 0.0});
      }
    }
    if (!param_errors.empty() && cell.algorithm == "sequential_nn_ais") {
      write_metric_csv_row(metrics_csv,
                           {"param_error", cell.algorithm, cell.config_hash,
                            cell.records.size(), detail::mean_of(param_errors),
                            detail::stderr_of(param_errors)});
    }
    std::snprintf(buf, sizeof(buf), "%-32s %-16s %9.4f %11.4f %12.4f %6zu\n",
                  cell.algorithm.c_str(), cell.config_hash.c_str(), z_mae,
                  z_rrmse, mu_rrmse, cell.failed);
    table << buf;
  }
  if (!options.quiet) std::cout << table.str();
  return 0;
}

/// Parses and runs a config file; returns a process exit code. Parse
/// and validation problems are reported with a line anchor.
inline int run_experiment_file(const std::string& path,
                               const ExperimentOptions& options) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << path << ": cannot open config\n";
    return 2;
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') ++line;
    }
    std::cerr << path << ':' << line << ": " << e.what() << '\n';
    return 2;
  }
  try {
    const auto config = ExperimentConfig::from_json(parsed);
    return run_experiment(config, options);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return 2;
  }
}

// ---------------------------------------------------------------------------
// Emulator surface dump (the `emulate` subcommand)

/// Builds an NN or GP emulator from a node CSV and writes its values on
/// a tensor grid as CSV (x_1..x_d,value).
inline void emulate_nodes_to_csv(const NodeSet& nodes, const json& emulator_params,
                                 const Grid& grid, std::ostream& out) {
  if (grid.size() == 0) throw config_error("emulate: empty grid");
  EmulatorPtr em;
  const std::string kind = emulator_params.value("emulator", std::string{"nn"});
  auto shared = std::make_shared<const NodeSet>(nodes);
  if (kind == "nn") {
    const auto k = emulator_params.value("k", std::size_t{1});
    em = build_nn(shared, std::min<std::size_t>(std::max<std::size_t>(k, 1), nodes.size()),
                  grid.box());
  } else if (kind == "gp") {
    GpKernel kernel{emulator_params.value("lengthscale", 1.0),
                    emulator_params.value("noise", 1e-6)};
    em = fit_gp(shared, kernel);
  } else {
    throw config_error("emulate: unknown emulator kind " + kind);
  }
  for (std::size_t d = 1; d <= grid.dim(); ++d) out << "x_" << d << ',';
  out << "value\n";
  char buf[32];
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    for (double v : x) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << ',';
    }
    std::snprintf(buf, sizeof(buf), "%.17g", em->value(x));
    out << buf << '\n';
  }
}

}  // namespace radis

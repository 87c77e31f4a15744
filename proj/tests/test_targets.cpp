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
#include <cmath>
#include <fstream>
#include <numbers>

#include "radis/inversion.hpp"
#include "radis/targets.hpp"

using namespace radis;
using Catch::Approx;

TEST_CASE("banana symmetry in the second coordinate", "[targets]") {
  for (double x1 : {-3.0, 0.0, 2.5}) {
    for (double x2 : {0.5, 1.7, 4.0}) {
      CHECK(banana_logpdf(std::vector<double>{x1, x2}) ==
            banana_logpdf(std::vector<double>{x1, -x2}));
    }
  }
}

TEST_CASE("banana grid ground truth", "[targets][slow]") {
  const auto truth = grid_quadrature(make_banana_target(), 2000);
  CHECK(std::abs(truth.z - 7.9976) / 7.9976 < 1e-3);
  CHECK(std::abs(truth.mean[0] + 0.4841) < 1e-3);
  CHECK(std::abs(truth.mean[1]) < 1e-3);
}

TEST_CASE("gaussian mixture closed-form values", "[targets]") {
  const GaussianMixtureParams params;
  const auto modes = gaussian_mixture_modes(params.dim);
  // oracle: direct sum of three Gaussian densities
  const auto direct = [&](std::span<const double> x) {
    double acc = 0.0;
    for (const auto& mu : modes) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < params.dim; ++d) {
        const double e = x[d] - mu[d];
        d2 += e * e;
      }
      acc += std::exp(-d2 / 32.0) /
             (3.0 * std::pow(2.0 * std::numbers::pi * 16.0, 5.0));
    }
    return std::log(acc);
  };
  SECTION("log-density at the third mode") {
    CHECK(gaussian_mixture_logpdf(modes[2]) == Approx(direct(modes[2])).margin(1e-12));
  }
  SECTION("symmetry through a component mean") {
    // reflect an offset through mu_1: equal by the closed form
    Point a(params.dim, 0.0), b(params.dim, 0.0);
    a[1] = 2.0;
    b[1] = -2.0;
    for (std::size_t d = 0; d < params.dim; ++d) {
      a[d] += modes[0][d];
      b[d] += modes[0][d];
    }
    CHECK(gaussian_mixture_logpdf(a) == Approx(direct(a)).margin(1e-12));
    CHECK(gaussian_mixture_logpdf(a) == Approx(gaussian_mixture_logpdf(b)).margin(1e-12));
  }
}

TEST_CASE("gaussian mixture integrates to one", "[targets][slow]") {
  // IS sanity check with a wide student-t proposal
  const auto target = make_gaussian_mixture_target();
  const StudentTDensity proposal(std::vector<double>(10, 0.0),
                                 std::vector<double>(10, 8.0), 5.0);
  Rng rng(3);
  const std::size_t n = 100'000;
  std::vector<double> w(n);
  Point x(10);
  for (std::size_t i = 0; i < n; ++i) {
    proposal.sample(rng, x);
    w[i] = std::exp(target.log_pi(x) - proposal.log_density(x));
  }
  const double z_hat = evidence_estimate(w);
  double var = 0.0;
  for (double v : w) var += (v - z_hat) * (v - z_hat);
  var /= static_cast<double>(n - 1);
  const double se = std::sqrt(var / static_cast<double>(n));
  CHECK(std::abs(z_hat - 1.0) < 4.0 * se);
}

TEST_CASE("grid quadrature basics", "[targets]") {
  SECTION("uniform density: Z is the box volume, mean the center") {
    TargetDensity uniform([](std::span<const double>) { return 0.0; }, 2,
                          Domain::bounded(Box({0.0, 1.0}, {2.0, 2.0})));
    const auto truth = grid_quadrature(uniform, 50);
    CHECK(truth.z == Approx(2.0));
    CHECK(truth.mean[0] == Approx(1.0));
    CHECK(truth.mean[1] == Approx(1.5));
  }
  SECTION("truncated standard Gaussian") {
    TargetDensity gauss(
        [](std::span<const double> x) {
          return -0.5 * x[0] * x[0] - 0.5 * std::log(2.0 * std::numbers::pi);
        },
        1, Domain::bounded(Box::cube(1, -8.0, 8.0)));
    const auto truth = grid_quadrature(gauss, 4000);
    CHECK(std::abs(truth.z - 1.0) < 1e-6);
    CHECK(std::abs(truth.mean[0]) < 1e-6);
  }
  SECTION("unbounded domains are rejected") {
    const auto mixture = make_gaussian_mixture_target();
    CHECK_THROWS_AS(grid_quadrature(mixture, 10), config_error);
  }
}

TEST_CASE("synthetic forward model", "[targets]") {
  const auto model = SyntheticModel::from_csv(
      std::string(RADIS_DATA_DIR) + "/synthetic_model_constants.csv");
  REQUIRE(model.input_dim() == 6);
  REQUIRE(model.output_dim() == 64);
  const Box& box = model.prior_box();
  Point center(6);
  for (std::size_t d = 0; d < 6; ++d) {
    center[d] = 0.5 * (box.lower()[d] + box.upper()[d]);
  }

  SECTION("matches the committed golden output at the box center") {
    std::ifstream golden_file(std::string(RADIS_DATA_DIR) +
                              "/synthetic_model_golden.csv");
    REQUIRE(golden_file.good());
    std::string line;
    std::getline(golden_file, line);  // header
    std::vector<double> golden;
    while (std::getline(golden_file, line)) {
      if (!line.empty()) golden.push_back(std::stod(line));
    }
    REQUIRE(golden.size() == 64);
    std::vector<double> y(64);
    model.evaluate(center, y);
    for (std::size_t j = 0; j < 64; ++j) CHECK(y[j] == golden[j]);
  }
  SECTION("continuity under small perturbations") {
    std::vector<double> y0(64), y1(64);
    model.evaluate(center, y0);
    for (double delta : {1e-3, 1e-5, 1e-7}) {
      Point x = center;
      for (auto& v : x) v += delta;
      model.evaluate(x, y1);
      double diff = 0.0;
      for (std::size_t j = 0; j < 64; ++j) diff += std::abs(y1[j] - y0[j]);
      CHECK(diff < 2000.0 * delta);
    }
  }
  SECTION("deterministic") {
    std::vector<double> y0(64), y1(64);
    model.evaluate(center, y0);
    model.evaluate(center, y1);
    CHECK(y0 == y1);
  }
  SECTION("out-of-box input is rejected") {
    Point outside = center;
    outside[0] = box.upper()[0] + 1.0;
    std::vector<double> y(64);
    CHECK_THROWS_AS(model.evaluate(outside, y), std::invalid_argument);
  }
  SECTION("the generator reproduces the committed constants") {
    const auto regenerated = SyntheticModel::generate();
    std::vector<double> y(64);
    regenerated.evaluate(center, y);
    std::vector<double> y_committed(64);
    model.evaluate(center, y_committed);
    CHECK(y == y_committed);
  }
}

TEST_CASE("inversion problem likelihood", "[targets]") {
  auto model = std::make_shared<const SyntheticModel>(SyntheticModel::generate());
  auto caching = std::make_shared<CachingForwardModel>(model);
  const Box& box = model->prior_box();
  Point x(6);
  for (std::size_t d = 0; d < 6; ++d) {
    x[d] = box.lower()[d] + 0.3 * (box.upper()[d] - box.lower()[d]);
  }
  std::vector<double> y(64);
  model->evaluate(x, y);
  InversionProblem problem{caching, y, 1.0};
  auto target = problem.make_target();
  SECTION("zero residual gives exactly the prior log-density") {
    CHECK(target.log_pi(x) == 0.0);
  }
  SECTION("outside the prior box the density vanishes without a model run") {
    const auto before = caching->model_evaluations();
    Point outside = x;
    outside[2] = box.upper()[2] + 1.0;
    CHECK(target.log_pi(outside) == neg_inf);
    CHECK(caching->model_evaluations() == before);
  }
  SECTION("repeat evaluations hit the cache") {
    const auto before = caching->model_evaluations();
    target.log_pi(x);
    target.log_pi(x);
    CHECK(caching->model_evaluations() <= before + 1);
    CHECK(caching->cache_hits() >= 1);
  }
}

TEST_CASE("map particle maximizes the target over the run", "[targets]") {
  const auto target = make_banana_target();
  auto cfg = RadisConfig::single(10, 10, 200);
  cfg.init.count = 5;
  const auto out = run_radis(target, cfg, Rng(4));
  const std::size_t map = out.map_index();
  for (std::size_t i = 0; i < out.particles.size(); ++i) {
    CHECK(out.log_pi_values[map] >= out.log_pi_values[i]);
  }
}

TEST_CASE("sequential inversion harness", "[targets]") {
  auto model = std::make_shared<const SyntheticModel>(SyntheticModel::generate());

  RadisConfig cfg;
  cfg.iterations = 5;
  cfg.samples_per_iteration = 10;
  cfg.layers.push_back({NnEmulatorSpec{}, 200});
  cfg.init.count = 20;

  SECTION("empty problem list is rejected") {
    const std::vector<InversionProblem> none;
    CHECK_THROWS_AS(sequential_inversion(none, cfg, true, Rng(1)), config_error);
  }
  SECTION("a single problem equals a direct adaptive run") {
    auto caching = std::make_shared<CachingForwardModel>(model);
    auto problems = make_synthetic_problem_sequence(caching, 1, 1.0, 99);
    const auto results = sequential_inversion(problems, cfg, true, Rng(42));
    auto caching2 = std::make_shared<CachingForwardModel>(model);
    auto problems2 = make_synthetic_problem_sequence(caching2, 1, 1.0, 99);
    TargetDensity target = problems2[0].make_target();
    const auto direct = run_radis(target, cfg, Rng(42).split(0));
    REQUIRE(results.size() == 1);
    CHECK(results[0].evidence == direct.evidence);
    for (std::size_t d = 0; d < 6; ++d) {
      CHECK(results[0].map[d] == direct.map_point()[d]);
    }
  }
  SECTION("node sharing strictly reduces the forward budget") {
    auto caching_a = std::make_shared<CachingForwardModel>(model);
    auto problems_a = make_synthetic_problem_sequence(caching_a, 4, 1.0, 7);
    const auto shared = sequential_inversion(problems_a, cfg, true, Rng(5));
    auto caching_b = std::make_shared<CachingForwardModel>(model);
    auto problems_b = make_synthetic_problem_sequence(caching_b, 4, 1.0, 7);
    const auto unshared = sequential_inversion(problems_b, cfg, false, Rng(5));
    std::uint64_t fwd_shared = 0, fwd_unshared = 0;
    for (std::size_t r = 0; r < 4; ++r) {
      fwd_shared += shared[r].forward_evaluations;
      fwd_unshared += unshared[r].forward_evaluations;
      // the target ledger is the same either way
      CHECK(shared[r].target_evaluations == unshared[r].target_evaluations);
    }
    CHECK(fwd_shared < fwd_unshared);
  }
}

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

#include "radis/emulator_gp.hpp"
#include "radis/rng.hpp"

using namespace radis;
using Catch::Approx;

namespace {

std::shared_ptr<NodeSet> nodes_1d(const std::vector<double>& xs,
                                  const std::vector<double>& log_values) {
  auto nodes = std::make_shared<NodeSet>(1);
  nodes->add_nodes(xs, log_values, 0.0);
  return nodes;
}

// dense solve via Gauss-Jordan, independent of the Cholesky path
std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    const double diag = a[col][col];
    for (std::size_t c = col; c < n; ++c) a[col][c] /= diag;
    b[col] /= diag;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double factor = a[r][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  return b;
}

}  // namespace

TEST_CASE("gp fit on trivial node sets", "[emulator_gp]") {
  SECTION("single node: beta equals phi") {
    auto nodes = nodes_1d({0.5}, {1.7});
    const auto em = fit_gp(nodes, GpKernel{1.0, 0.0});
    REQUIRE(em->beta().size() == 1);
    CHECK(em->beta()[0] == Approx(1.7));
    CHECK(em->log_value(std::vector<double>{0.5}) == Approx(1.7));
  }
  SECTION("two far-apart nodes decouple") {
    auto nodes = nodes_1d({0.0, 100.0}, {2.0, -1.0});
    const auto em = fit_gp(nodes, GpKernel{1.0, 0.0});
    CHECK(em->beta()[0] == Approx(2.0).margin(1e-9));
    CHECK(em->beta()[1] == Approx(-1.0).margin(1e-9));
  }
  SECTION("empty node set is rejected") {
    CHECK_THROWS_AS(fit_gp(std::make_shared<NodeSet>(1), GpKernel{}),
                    std::invalid_argument);
  }
  SECTION("non-finite node values are rejected") {
    auto nodes = std::make_shared<NodeSet>(1);
    nodes->add_nodes(std::vector<double>{0.0}, std::vector<double>{neg_inf}, 0.0);
    CHECK_THROWS_AS(fit_gp(nodes, GpKernel{}), std::invalid_argument);
  }
}

TEST_CASE("gp solve matches a dense-inversion oracle", "[emulator_gp]") {
  Rng rng(13);
  std::vector<double> xs, phi;
  for (int i = 0; i < 5; ++i) {
    xs.push_back(rng.uniform(-2.0, 2.0));
    phi.push_back(rng.uniform(-3.0, 1.0));
  }
  auto nodes = nodes_1d(xs, phi);
  const GpKernel kernel{0.8, 0.0};
  const auto em = fit_gp(nodes, kernel);
  // oracle: direct dense solve of K beta = phi
  std::vector<std::vector<double>> gram(5, std::vector<double>(5));
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      gram[i][j] = kernel(std::vector<double>{xs[i]}, std::vector<double>{xs[j]});
    }
  }
  const auto beta = solve_dense(gram, phi);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(em->beta()[i] == Approx(beta[i]).margin(1e-6));
  }
  // interpolation: predictions equal phi at every node
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(em->log_value(std::vector<double>{xs[i]}) == Approx(phi[i]).margin(1e-6));
  }
}

TEST_CASE("gp reverts to one far from the data", "[emulator_gp]") {
  auto nodes = nodes_1d({0.0, 0.4}, {2.0, 1.0});
  const auto em = fit_gp(nodes, GpKernel{0.5, 0.0});
  CHECK(em->log_value(std::vector<double>{50.0}) == Approx(0.0).margin(1e-12));
  CHECK(em->value(std::vector<double>{50.0}) == Approx(1.0).margin(1e-12));
}

TEST_CASE("two-node closed form at the midpoint", "[emulator_gp]") {
  const double x1 = -0.3, x2 = 0.9, phi1 = 1.2, phi2 = -0.4;
  const GpKernel kernel{0.7, 0.0};
  auto nodes = nodes_1d({x1, x2}, {phi1, phi2});
  const auto em = fit_gp(nodes, kernel);
  // 2x2 inverse by hand: K = [[1, k12],[k12, 1]],
  // phihat(m) = km (phi1 + phi2) / (1 + k12) at the midpoint
  const double k12 = kernel(std::vector<double>{x1}, std::vector<double>{x2});
  const double mid = 0.5 * (x1 + x2);
  const double km = kernel(std::vector<double>{mid}, std::vector<double>{x1});
  const double expected = km * (phi1 + phi2) / (1.0 + k12);
  CHECK(em->log_value(std::vector<double>{mid}) == Approx(expected).margin(1e-12));
}

TEST_CASE("interpolation exactness in relative terms", "[emulator_gp]") {
  Rng rng(21);
  std::vector<double> xs, phi;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(rng.uniform(0.0, 4.0));
    phi.push_back(std::sin(1.7 * xs.back()) - 1.0);
  }
  auto nodes = nodes_1d(xs, phi);
  const auto em = fit_gp(nodes, GpKernel{0.6, 0.0});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double pi_i = std::exp(phi[i]);
    const double err = std::abs(em->value(std::vector<double>{xs[i]}) - pi_i) / pi_i;
    CHECK(err < 1e-6);
  }
}

TEST_CASE("refit equals a fresh fit on the union", "[emulator_gp]") {
  Rng rng(33);
  std::vector<double> xs, phi;
  for (int i = 0; i < 12; ++i) {
    xs.push_back(rng.uniform(-1.0, 1.0));
    phi.push_back(rng.uniform(-2.0, 0.0));
  }
  auto base = nodes_1d({xs.begin(), xs.begin() + 8}, {phi.begin(), phi.begin() + 8});
  NodeSet grown = add_nodes(*base, std::vector<double>(xs.begin() + 8, xs.end()),
                            std::vector<double>(phi.begin() + 8, phi.end()), 1e-12);
  auto fresh = nodes_1d(xs, phi);
  const GpKernel kernel{0.9, 1e-6};
  const auto a = fit_gp(std::make_shared<NodeSet>(grown), kernel);
  const auto b = fit_gp(fresh, kernel);
  REQUIRE(a->beta().size() == b->beta().size());
  for (std::size_t i = 0; i < a->beta().size(); ++i) {
    CHECK(a->beta()[i] == Approx(b->beta()[i]).margin(1e-8));
  }
}

TEST_CASE("lengthscale tuning", "[emulator_gp]") {
  SECTION("one candidate returns it") {
    auto nodes = nodes_1d({0.0, 1.0}, {1.0, 0.0});
    CHECK(tune_lengthscale(nodes, 1e-6, std::vector<double>{0.8}) == 0.8);
  }
  SECTION("duplicate candidates are deterministic") {
    auto nodes = nodes_1d({0.0, 0.7, 1.9}, {1.0, 0.2, -0.5});
    const std::vector<double> grid{0.5, 0.5, 1.2, 1.2};
    const double a = tune_lengthscale(nodes, 1e-6, grid);
    const double b = tune_lengthscale(nodes, 1e-6, grid);
    CHECK(a == b);
  }
  SECTION("empty grid and too-small node sets are rejected") {
    auto nodes = nodes_1d({0.0, 1.0}, {1.0, 0.0});
    CHECK_THROWS_AS(tune_lengthscale(nodes, 1e-6, std::vector<double>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        tune_lengthscale(nodes_1d({0.0}, {1.0}), 1e-6, std::vector<double>{1.0}),
        std::invalid_argument);
  }
}

TEST_CASE("tuning recovers a known lengthscale", "[emulator_gp][slow]") {
  // simulate phi from a GP with lengthscale 1, recover it from a dense
  // grid; statistical, so assert the median over seeds
  const std::vector<double> grid{0.18, 0.24, 0.32, 0.42, 0.56, 0.75,
                                 1.0,  1.33, 1.78, 2.37, 3.16, 4.22, 5.62};
  std::vector<double> recovered;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(900 + seed);
    const std::size_t count = 40;
    std::vector<double> xs(count);
    for (auto& x : xs) x = rng.uniform(-6.0, 6.0);
    // sample phi ~ N(0, K) via dense Cholesky of K + tiny jitter
    Eigen::MatrixXd gram(count, count);
    const GpKernel truth{1.0, 0.0};
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t j = 0; j < count; ++j) {
        gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            truth(std::vector<double>{xs[i]}, std::vector<double>{xs[j]});
      }
    }
    gram += 1e-10 * Eigen::MatrixXd::Identity(count, count);
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(gram).matrixL();
    Eigen::VectorXd z(count);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(count); ++i) {
      z(i) = rng.normal();
    }
    const Eigen::VectorXd phi = chol * z;
    auto nodes = nodes_1d(xs, {phi.data(), phi.data() + count});
    recovered.push_back(tune_lengthscale(nodes, 1e-8, grid));
  }
  std::sort(recovered.begin(), recovered.end());
  const double median = recovered[recovered.size() / 2];
  // within one grid step of the truth
  CHECK(median >= 0.75);
  CHECK(median <= 1.33);
}

TEST_CASE("sup-norm error shrinks with nested doublings", "[emulator_gp]") {
  const auto f = [](double x) { return std::exp(-0.5 * (x - 0.4) * (x - 0.4) * 8.0); };
  auto nodes = std::make_shared<NodeSet>(1);
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t steps : {4u, 8u, 16u, 32u, 64u}) {
    std::vector<double> pts, vals;
    for (std::size_t i = 0; i <= steps; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(steps);
      pts.push_back(x);
      vals.push_back(std::log(f(x)));
    }
    auto grown = std::make_shared<NodeSet>(*nodes);
    grown->add_nodes(pts, vals, 1e-12);
    nodes = grown;
    const auto em = fit_gp(nodes, GpKernel{0.25, 0.0});
    double err = 0.0;
    for (int g = 0; g <= 500; ++g) {
      const double x = g / 500.0;
      err = std::max(err, std::abs(em->value(std::vector<double>{x}) - f(x)));
    }
    CHECK(err <= previous + 1e-12);
    previous = err;
  }
}

TEST_CASE("jitter escalation handles near-duplicate nodes", "[emulator_gp]") {
  auto nodes = nodes_1d({0.5, 0.5 + 1e-13, 1.0}, {1.0, 1.0, 0.0});
  const auto em = fit_gp(nodes, GpKernel{1.0, 0.0});
  CHECK(em->jitter() > 0.0);
  CHECK(std::isfinite(em->log_value(std::vector<double>{0.7})));
}

TEST_CASE("farthest-point thinning keeps the requested count", "[emulator_gp]") {
  Rng rng(3);
  auto nodes = std::make_shared<NodeSet>(2);
  std::vector<double> pts, vals;
  for (int i = 0; i < 100; ++i) {
    pts.push_back(rng.uniform(-1.0, 1.0));
    pts.push_back(rng.uniform(-1.0, 1.0));
    vals.push_back(rng.uniform(-1.0, 1.0));
  }
  nodes->add_nodes(pts, vals, 0.0);
  const auto subset = farthest_point_subset(*nodes, 10);
  REQUIRE(subset.size() == 10);
  // the seed is the argmax-value node
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < nodes->size(); ++i) {
    if (nodes->log_value(i) > nodes->log_value(argmax)) argmax = i;
  }
  CHECK(subset.front() == argmax);
}

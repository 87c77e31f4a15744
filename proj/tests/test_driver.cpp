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

#include "radis/baselines.hpp"
#include "radis/diagnostics.hpp"
#include "radis/driver.hpp"
#include "radis/targets.hpp"

using namespace radis;
using Catch::Approx;

namespace {

// emulator wrapper around an arbitrary log-density
class FnEmulator final : public Emulator {
 public:
  FnEmulator(std::function<double(std::span<const double>)> fn, std::size_t dim)
      : fn_(std::move(fn)), dim_(dim) {}
  std::size_t dim() const override { return dim_; }
  double log_value(std::span<const double> x) const override { return fn_(x); }

 private:
  std::function<double(std::span<const double>)> fn_;
  std::size_t dim_;
};

}  // namespace

TEST_CASE("driver configuration validation", "[driver]") {
  const auto target = make_banana_target();
  SECTION("zero iterations") {
    auto cfg = RadisConfig::single(0, 10, 200);
    CHECK_THROWS_AS(run_radis(target, cfg, Rng(1)), config_error);
  }
  SECTION("non-decreasing deep batches") {
    auto cfg = RadisConfig::single(2, 10, 200);
    cfg.layers.push_back({NnEmulatorSpec{}, 200});  // L2 == L1
    CHECK_THROWS_AS(run_radis(target, cfg, Rng(1)), config_error);
  }
  SECTION("NN on an unbounded domain requires q_par") {
    const auto mixture = make_gaussian_mixture_target({2, 4.0});
    auto cfg = RadisConfig::single(2, 5, 100);
    cfg.init.box = Box::cube(2, -15.0, 15.0);
    CHECK_THROWS_AS(run_radis(mixture, cfg, Rng(1)), config_error);
  }
}

TEST_CASE("single-iteration run reduces to uniform IS", "[driver]") {
  // one initial node makes the NN emulator constant over the box, so
  // the outer weights must equal the plain uniform-IS weights
  const auto target = make_banana_target();
  auto cfg = RadisConfig::single(1, 40, 800);
  cfg.init.count = 1;
  const auto out = run_radis(target, cfg, Rng(99));
  const double log_volume = std::log(400.0);
  std::vector<double> manual(out.particles.size());
  for (std::size_t i = 0; i < out.particles.size(); ++i) {
    manual[i] = std::exp(out.log_pi_values[i] + log_volume);
    CHECK(out.particles.weight(i) == Approx(manual[i]).epsilon(1e-10));
  }
  CHECK(out.evidence == Approx(evidence_estimate(manual)).epsilon(1e-10));
}

TEST_CASE("outer weights reduce to standard IS at T=1", "[driver]") {
  // bitwise: with a single snapshot the denominator is exactly the
  // snapshot density
  auto nodes = std::make_shared<NodeSet>(1);
  nodes->add_nodes(std::vector<double>{0.2, 0.7},
                   std::vector<double>{std::log(2.0), std::log(5.0)}, 0.0);
  const auto em = build_nn(nodes, 1, Box::cube(1, 0.0, 1.0));
  EmulatorTrace trace{{em, std::log(3.1), 0.0, nullptr}};

  WeightedParticleSet particles(1);
  std::vector<double> log_pi;
  Rng rng(5);
  for (int i = 0; i < 30; ++i) {
    const Point x{rng.uniform01()};
    particles.add(x, 0.0);
    log_pi.push_back(std::log(rng.uniform01_pos()) - 1.0);
  }
  const auto outer = outer_log_weights(particles, log_pi, trace);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const double direct =
        log_pi[i] - (em->log_value(particles.point(i)) - std::log(3.1));
    CHECK(outer[i] == direct);  // bitwise
  }
}

TEST_CASE("outer weights with exact emulators are constant", "[driver]") {
  // pihat_tau = pi and chat_tau = Z for every tau: every weight is Z
  const double z_true = 4.0;
  const auto log_pi_fn = [](std::span<const double> x) {
    return -0.5 * x[0] * x[0];
  };
  auto em = std::make_shared<FnEmulator>(log_pi_fn, 1);
  EmulatorTrace trace;
  for (int tau = 0; tau < 3; ++tau) {
    trace.push_back({em, std::log(z_true), 0.0, nullptr});
  }
  WeightedParticleSet particles(1);
  std::vector<double> log_pi;
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    const Point x{rng.uniform(-2.0, 2.0)};
    particles.add(x, 0.0);
    log_pi.push_back(log_pi_fn(x));
  }
  const auto outer = outer_log_weights(particles, log_pi, trace);
  WeightedParticleSet weighted(1);
  for (std::size_t i = 0; i < outer.size(); ++i) {
    CHECK(std::exp(outer[i]) == Approx(z_true).epsilon(1e-12));
    weighted.add(particles.point(i), outer[i]);
  }
  CHECK(weighted.ess() == Approx(20.0).epsilon(1e-9));
}

TEST_CASE("two-iteration outer weights match hand arithmetic", "[driver]") {
  // two piecewise-constant snapshots over [0,1]; check at two points
  auto nodes1 = std::make_shared<NodeSet>(1);
  nodes1->add_nodes(std::vector<double>{0.25, 0.75},
                    std::vector<double>{std::log(2.0), std::log(4.0)}, 0.0);
  auto nodes2 = std::make_shared<NodeSet>(1);
  nodes2->add_nodes(std::vector<double>{0.25, 0.75},
                    std::vector<double>{std::log(1.0), std::log(8.0)}, 0.0);
  const Box box = Box::cube(1, 0.0, 1.0);
  EmulatorTrace trace{{build_nn(nodes1, 1, box), std::log(3.0), 0.0, nullptr},
                      {build_nn(nodes2, 1, box), std::log(4.5), 0.0, nullptr}};
  WeightedParticleSet particles(1);
  particles.add(std::vector<double>{0.1}, 0.0);
  particles.add(std::vector<double>{0.9}, 0.0);
  const std::vector<double> log_pi{std::log(1.5), std::log(6.0)};
  const auto outer = outer_log_weights(particles, log_pi, trace);
  // by hand: left cell densities are 2/3 and 1/4.5; right cell 4/3 and 8/4.5
  const double denom_left = 0.5 * (2.0 / 3.0 + 1.0 / 4.5);
  const double denom_right = 0.5 * (4.0 / 3.0 + 8.0 / 4.5);
  CHECK(std::exp(outer[0]) == Approx(1.5 / denom_left).epsilon(1e-12));
  CHECK(std::exp(outer[1]) == Approx(6.0 / denom_right).epsilon(1e-12));
}

TEST_CASE("banana budget is exactly |S0| + N*T", "[driver]") {
  const auto target = make_banana_target();
  auto cfg = RadisConfig::single(100, 10, 200);
  cfg.init.count = 10;
  const auto out = run_radis(target, cfg, Rng(3));
  CHECK(out.target_evaluations == 1010);
  CHECK(out.particles.size() == 1000);
  CHECK(out.evidence > 0.0);
  CHECK(out.c_hat_trace.size() == 100);
}

TEST_CASE("budget exactness across configurations", "[driver]") {
  const auto target = make_banana_target();
  Rng seeds(1);
  for (int round = 0; round < 6; ++round) {
    RadisConfig cfg;
    const std::size_t t = 1 + seeds.uniform_index(5);
    const std::size_t n = 2 + seeds.uniform_index(8);
    cfg.iterations = t;
    cfg.samples_per_iteration = n;
    const bool deep = round % 3 == 2;
    if (deep) {
      cfg.layers.push_back({NnEmulatorSpec{}, 40 * n});
      cfg.layers.push_back({GpEmulatorSpec{1e-6, 1.0, 0, {}, 400}, 10 * n});
    } else if (round % 3 == 1) {
      cfg.layers.push_back({GpEmulatorSpec{1e-6, 1.5, 2, {}, 400}, 20 * n});
    } else {
      cfg.layers.push_back({NnEmulatorSpec{round % 2 ? 2u : 1u}, 20 * n});
    }
    cfg.init.count = 5;
    cfg.regularized_resampling = round % 2 == 1;
    if (round % 2 == 0) {
      cfg.q_par = std::make_shared<UniformBoxDensity>(Box::cube(2, -10.0, 10.0));
      cfg.alpha = {AlphaSchedule::Kind::Fixed, 0.5};
    }
    const auto out = run_radis(target, cfg, Rng(100 + round));
    CHECK(out.target_evaluations == 5 + n * t);
  }
}

TEST_CASE("deep run with one layer equals run_radis bitwise", "[driver]") {
  const auto target = make_banana_target();
  auto cfg = RadisConfig::single(5, 8, 160);
  cfg.init.count = 6;
  const auto a = run_radis(target, cfg, Rng(21));
  const auto b = run_deep_radis(target, cfg, Rng(21));
  REQUIRE(a.particles.size() == b.particles.size());
  CHECK(a.evidence == b.evidence);
  CHECK(a.log_evidence == b.log_evidence);
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    CHECK(a.particles.log_weight(i) == b.particles.log_weight(i));
    CHECK(a.particles.point(i)[0] == b.particles.point(i)[0]);
  }
}

TEST_CASE("deep NN+GP chain on the banana keeps the budget", "[driver]") {
  const auto target = make_banana_target();
  RadisConfig cfg;
  cfg.iterations = 10;
  cfg.samples_per_iteration = 10;
  cfg.layers.push_back({NnEmulatorSpec{}, 500});
  cfg.layers.push_back({GpEmulatorSpec{1e-6, 1.5, 5, {}, 300}, 100});
  cfg.init.count = 10;
  const auto out = run_deep_radis(target, cfg, Rng(77));
  CHECK(out.target_evaluations == 10 + 10 * 10);
  CHECK(out.final_emulators.size() == 2);
  CHECK(out.evidence == Approx(7.9976).epsilon(0.8));
}

TEST_CASE("mixture proposal branches", "[driver]") {
  auto nodes = std::make_shared<NodeSet>(1);
  nodes->add_nodes(std::vector<double>{0.5}, std::vector<double>{std::log(2.0)}, 0.0);
  const Box box = Box::cube(1, 0.0, 1.0);
  const auto em = build_nn(nodes, 1, box);
  auto q_par = std::make_shared<UniformBoxDensity>(box);
  auto aux = std::make_shared<UniformBoxDensity>(box);

  SECTION("alpha outside [0,1] is rejected") {
    CHECK_THROWS_AS(mixture_proposal(em, 2.0, q_par, 1.5, aux, 100), config_error);
    CHECK_THROWS_AS(mixture_proposal(em, 2.0, q_par, -0.1, aux, 100), config_error);
  }
  SECTION("alpha = 1 is exactly the parametric density") {
    const auto prop = mixture_proposal(em, 2.0, q_par, 1.0, aux, 100);
    const Point x{0.3};
    CHECK(prop.log_density(x) == q_par->log_density(x));
  }
  SECTION("alpha = 0 is exactly the normalized emulator") {
    const auto prop = mixture_proposal(em, 2.0, nullptr, 0.0, aux, 100);
    const Point x{0.3};
    CHECK(prop.log_density(x) == em->log_value(x) - std::log(2.0));
  }
  SECTION("uniform mixed with an identical uniform stays uniform") {
    // the emulator is constant 2 on [0,1], so pihat/chat is the uniform
    const auto prop = mixture_proposal(em, 2.0, q_par, 0.5, aux, 100);
    for (double x : {0.1, 0.5, 0.9}) {
      CHECK(prop.log_density(std::vector<double>{x}) == Approx(0.0).margin(1e-12));
    }
  }
  SECTION("sampling works on both branches") {
    const auto prop = mixture_proposal(em, 2.0, q_par, 0.5, aux, 64);
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
      const Point x = prop.sample(rng);
      CHECK(x[0] >= 0.0);
      CHECK(x[0] <= 1.0);
    }
  }
}

TEST_CASE("adaptive parametric mixture", "[driver]") {
  SECTION("a single component matches the closed-form Gaussian") {
    const std::vector<double> mean{1.0, -1.0};
    const auto q = adaptive_parametric_mixture(mean, 2, 2.0);
    const GaussianDensity direct = GaussianDensity::isotropic(mean, 4.0);
    const Point x{0.3, 0.4};
    CHECK(q->log_density(x) == Approx(direct.log_density(x)).margin(1e-12));
  }
  SECTION("two symmetric components give a symmetric density") {
    const std::vector<double> means{-1.0, 1.0};
    const auto q = adaptive_parametric_mixture(means, 1, 0.7);
    CHECK(q->log_density(std::vector<double>{0.4}) ==
          Approx(q->log_density(std::vector<double>{-0.4})).margin(1e-12));
  }
  SECTION("empty component list is rejected") {
    CHECK_THROWS_AS(adaptive_parametric_mixture(std::vector<double>{}, 1, 1.0),
                    config_error);
    CHECK_THROWS_AS(adaptive_parametric_mixture(std::vector<double>{}, 1,
                                                std::vector<Eigen::MatrixXd>{}),
                    config_error);
  }
}

TEST_CASE("metropolis-derived mixture covers the three modes",
          "[driver][slow]") {
  const auto target = make_gaussian_mixture_target();
  const auto modes = gaussian_mixture_modes(10);
  std::vector<double> coverage;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    Rng rng(40 + seed);
    auto chain = metropolis_chain(target, Point(10, 0.0), 4.0, 500, rng);
    double worst = 0.0;
    for (const auto& mode : modes) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t s = 0; s < 500; ++s) {
        double d2 = 0.0;
        for (std::size_t d = 0; d < 10; ++d) {
          const double e = chain.states_flat[s * 10 + d] - mode[d];
          d2 += e * e;
        }
        best = std::min(best, d2);
      }
      worst = std::max(worst, std::sqrt(best));
    }
    coverage.push_back(worst);
  }
  std::sort(coverage.begin(), coverage.end());
  CHECK(coverage[coverage.size() / 2] < 8.0);  // within 2 component sigmas
}

TEST_CASE("chi-squared divergence to the proposal shrinks over iterations",
          "[driver][slow]") {
  const auto target = make_banana_target();
  const Grid grid = Grid::uniform(Box::cube(2, -10.0, 10.0), 80);
  const auto truth = grid_quadrature(make_banana_target(), 400);

  std::vector<std::vector<double>> chi2(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cfg = RadisConfig::single(100, 10, 400);
    cfg.init.count = 10;
    cfg.q_par = std::make_shared<UniformBoxDensity>(Box::cube(2, -10.0, 10.0));
    cfg.alpha = {AlphaSchedule::Kind::Fixed, 0.5};
    const auto out = run_radis(target, cfg, Rng(3000 + seed));
    const std::size_t taus[3] = {9, 49, 99};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto& snap = out.trace[taus[k]];
      // normalize the snapshot density on the grid for a fair divergence
      double snap_mass = 0.0;
      Point x(2);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        grid.point(i, x);
        snap_mass += std::exp(snap.log_density(x));
      }
      snap_mass *= grid.cell_volume();
      const double value = chi2_divergence_grid(
          [&](std::span<const double> p) {
            return std::exp(target.log_pi(p)) / truth.z;
          },
          [&](std::span<const double> p) {
            return std::exp(snap.log_density(p)) / snap_mass;
          },
          grid);
      chi2[k].push_back(value);
    }
  }
  std::vector<double> medians;
  for (auto& column : chi2) {
    std::sort(column.begin(), column.end());
    medians.push_back(column[column.size() / 2]);
  }
  CHECK(medians[1] <= medians[0]);
  CHECK(medians[2] <= medians[1]);
}

TEST_CASE("regularized resampling keeps nodes distinct", "[driver]") {
  const auto target = make_banana_target();
  auto cfg = RadisConfig::single(20, 10, 200);
  cfg.init.count = 5;
  cfg.regularized_resampling = true;
  const auto out = run_radis(target, cfg, Rng(11));
  CHECK(out.target_evaluations == 5 + 200);
  // with kernel perturbation every drawn point is fresh: the node set
  // holds the full history
  CHECK(out.nodes->size() == 205);
}

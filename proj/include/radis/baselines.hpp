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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "radis/density.hpp"
#include "radis/domain.hpp"
#include "radis/errors.hpp"
#include "radis/particles.hpp"
#include "radis/rng.hpp"
#include "radis/target.hpp"
#include "radis/weights.hpp"

namespace radis {

/// Output shared by the reference samplers: the weighted cloud plus the
/// aligned target values and the evaluation count consumed.
struct BaselineRun {
  WeightedParticleSet particles;
  std::vector<double> log_pi_values;
  std::uint64_t target_evaluations = 0;

  BaselineRun() : particles(0) {}
};

/// Plain importance sampling with a fixed proposal: E draws, w = pi/q.
inline BaselineRun standard_is(const TargetDensity& target, const Density& proposal,
                               std::uint64_t budget, Rng rng) {
  if (budget == 0) throw config_error("standard_is: budget must be positive");
  const std::size_t dim = target.dim();
  const std::uint64_t start = target.evaluations();
  BaselineRun run;
  run.particles = WeightedParticleSet(dim);
  run.particles.reserve(budget);
  Point x(dim);
  for (std::uint64_t i = 0; i < budget; ++i) {
    proposal.sample(rng, x);
    const double lq = proposal.log_density(x);
    if (lq == neg_inf) {
      throw support_violation_error("standard_is: proposal density zero at its own draw");
    }
    const double lp = target.log_pi(x);
    run.particles.add(x, lp - lq, 0, static_cast<std::uint32_t>(i));
    run.log_pi_values.push_back(lp);
  }
  run.target_evaluations = target.evaluations() - start;
  return run;
}

// ---------------------------------------------------------------------------
// Population Monte Carlo

struct PmcConfig {
  std::size_t proposal_count = 100;  // N_PMC
  double scale = 1.0;                // xi; proposal covariance xi^2 I
  std::uint64_t budget = 1000;       // E; must be a multiple of N_PMC
  Box init_box;                      // means initialized uniformly here
  bool deterministic_mixture = false;  // DM-PMC weighting
};

/// PMC: one draw per proposal per iteration, multinomial resampling of
/// the locations over the whole weighted population. Standard weights
/// divide by the sample's own proposal; the DM variant divides by the
/// current iteration's full mixture.
inline BaselineRun pmc(const TargetDensity& target, const PmcConfig& cfg, Rng rng) {
  if (cfg.proposal_count == 0 || cfg.budget % cfg.proposal_count != 0) {
    throw config_error("pmc: budget must be a positive multiple of the proposal count");
  }
  const std::size_t dim = target.dim();
  const std::size_t n = cfg.proposal_count;
  const std::size_t iterations = cfg.budget / n;
  const double log_gauss_norm =
      -0.5 * static_cast<double>(dim) *
      std::log(2.0 * std::numbers::pi * cfg.scale * cfg.scale);
  const std::uint64_t start = target.evaluations();

  std::vector<double> means(n * dim);
  for (std::size_t i = 0; i < n * dim; ++i) {
    const std::size_t d = i % dim;
    means[i] = rng.uniform(cfg.init_box.lower()[d], cfg.init_box.upper()[d]);
  }

  BaselineRun run;
  run.particles = WeightedParticleSet(dim);
  run.particles.reserve(cfg.budget);
  std::vector<double> samples(n * dim), log_w(n);
  for (std::size_t t = 0; t < iterations; ++t) {
    const IsotropicGaussianMixture mixture(means, dim, cfg.scale);
    for (std::size_t i = 0; i < n; ++i) {
      std::span<double> x{samples.data() + i * dim, dim};
      for (std::size_t d = 0; d < dim; ++d) {
        x[d] = means[i * dim + d] + cfg.scale * rng.normal();
      }
      double lq;
      if (cfg.deterministic_mixture) {
        lq = mixture.log_density(x);
      } else {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
          const double e = x[d] - means[i * dim + d];
          acc += e * e;
        }
        lq = log_gauss_norm - acc / (2.0 * cfg.scale * cfg.scale);
      }
      const double lp = target.log_pi(x);
      log_w[i] = lp - lq;
      run.particles.add(x, log_w[i], static_cast<std::uint32_t>(t),
                        static_cast<std::uint32_t>(i));
      run.log_pi_values.push_back(lp);
    }
    // global multinomial resampling of the locations
    std::vector<double> wbar;
    try {
      wbar = normalize_log_weights(log_w);
    } catch (const degenerate_weights_error&) {
      throw degenerate_weights_error("pmc: degenerate weights at iteration " +
                                     std::to_string(t + 1));
    }
    std::vector<double> new_means(n * dim);
    double cum = 0.0;
    std::vector<double> cdf(n);
    for (std::size_t i = 0; i < n; ++i) {
      cum += wbar[i];
      cdf[i] = cum;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      const std::size_t pick = static_cast<std::size_t>(
          std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      const std::size_t j = std::min(pick, n - 1);
      std::copy(samples.data() + j * dim, samples.data() + (j + 1) * dim,
                new_means.data() + i * dim);
    }
    means.swap(new_means);
  }
  run.target_evaluations = target.evaluations() - start;
  return run;
}

inline BaselineRun dm_pmc(const TargetDensity& target, PmcConfig cfg, Rng rng) {
  cfg.deterministic_mixture = true;
  return pmc(target, cfg, rng);
}

// ---------------------------------------------------------------------------
// One-chain layered adaptive importance sampling

struct MetropolisChain {
  std::vector<double> states_flat;  // chain states in order, with repeats
  std::vector<double> log_pi;       // aligned target values
  std::size_t accepted = 0;
};

/// Gaussian random-walk Metropolis on pi; `length` states cost exactly
/// `length` target evaluations (initial state + one per proposal).
inline MetropolisChain metropolis_chain(const TargetDensity& target, Point start,
                                        double scale, std::size_t length, Rng& rng) {
  if (length == 0) throw config_error("metropolis_chain: length must be positive");
  const std::size_t dim = target.dim();
  MetropolisChain chain;
  chain.states_flat.reserve(length * dim);
  chain.log_pi.reserve(length);
  Point x = std::move(start);
  double lp = target.log_pi(x);
  chain.states_flat.insert(chain.states_flat.end(), x.begin(), x.end());
  chain.log_pi.push_back(lp);
  Point prop(dim);
  for (std::size_t i = 1; i < length; ++i) {
    for (std::size_t d = 0; d < dim; ++d) prop[d] = x[d] + scale * rng.normal();
    const double lpp = target.log_pi(prop);
    if (std::log(rng.uniform01_pos()) < lpp - lp) {
      x = prop;
      lp = lpp;
      ++chain.accepted;
    }
    chain.states_flat.insert(chain.states_flat.end(), x.begin(), x.end());
    chain.log_pi.push_back(lp);
  }
  return chain;
}

struct OcLaisConfig {
  std::size_t chain_length = 100;  // N_LAIS; also the mixture size
  double scale = 1.0;              // xi for both the walk and the mixture
  std::uint64_t budget = 1000;     // E; chain + E - N_LAIS mixture draws
  Box init_box;
  bool start_at_center = true;  // false: uniform draw in the box
};

struct OcLaisRun : BaselineRun {
  MetropolisChain chain;
};

/// One-chain LAIS: a Metropolis chain supplies the means of an
/// equally-weighted Gaussian mixture, then the remaining budget is
/// spent on mixture draws with mixture-denominator weights.
inline OcLaisRun oc_lais(const TargetDensity& target, const OcLaisConfig& cfg,
                         Rng rng) {
  if (cfg.chain_length == 0 || cfg.chain_length >= cfg.budget) {
    throw config_error("oc_lais: need 0 < chain length < budget");
  }
  const std::size_t dim = target.dim();
  const std::uint64_t start_evals = target.evaluations();
  Point start(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    start[d] = cfg.start_at_center
                   ? 0.5 * (cfg.init_box.lower()[d] + cfg.init_box.upper()[d])
                   : rng.uniform(cfg.init_box.lower()[d], cfg.init_box.upper()[d]);
  }
  OcLaisRun run;
  run.chain = metropolis_chain(target, std::move(start), cfg.scale,
                               cfg.chain_length, rng);
  if (run.chain.accepted == 0) {
    std::fprintf(stderr, "oc_lais: warning: zero acceptance over the whole chain\n");
  }
  const IsotropicGaussianMixture mixture(run.chain.states_flat, dim, cfg.scale);
  const std::uint64_t draws = cfg.budget - cfg.chain_length;
  run.particles = WeightedParticleSet(dim);
  run.particles.reserve(draws);
  Point x(dim);
  for (std::uint64_t i = 0; i < draws; ++i) {
    mixture.sample(rng, x);
    const double lp = target.log_pi(x);
    run.particles.add(x, lp - mixture.log_density(x), 0,
                      static_cast<std::uint32_t>(i));
    run.log_pi_values.push_back(lp);
  }
  run.target_evaluations = target.evaluations() - start_evals;
  return run;
}

// ---------------------------------------------------------------------------
// Adaptive multiple importance sampling

struct AmisConfig {
  std::size_t samples_per_iteration = 100;  // M
  double scale = 1.0;                       // xi; initial covariance xi^2 I
  std::uint64_t budget = 1000;              // E = M * T
  Box init_box;
  bool adapt_covariance = true;  // false: mean-only adaptation
};

/// AMIS: a single Gaussian proposal; each iteration draws M samples,
/// re-weights the whole history against the temporal mixture of all
/// past proposals, and moves the proposal to the current weighted
/// moments. A singular weighted covariance falls back to xi^2 I.
inline BaselineRun amis(const TargetDensity& target, const AmisConfig& cfg, Rng rng) {
  if (cfg.samples_per_iteration == 0 ||
      cfg.budget % cfg.samples_per_iteration != 0) {
    throw config_error("amis: budget must be a positive multiple of M");
  }
  const std::size_t dim = target.dim();
  const std::size_t m = cfg.samples_per_iteration;
  const std::size_t iterations = cfg.budget / m;
  const auto n = static_cast<Eigen::Index>(dim);
  const std::uint64_t start_evals = target.evaluations();

  std::vector<double> mean(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    mean[d] = rng.uniform(cfg.init_box.lower()[d], cfg.init_box.upper()[d]);
  }
  const Eigen::MatrixXd fallback =
      cfg.scale * cfg.scale * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd cov = fallback;

  std::vector<std::shared_ptr<const GaussianDensity>> proposals;
  std::vector<double> coords;          // all samples, flat
  std::vector<double> log_pi;          // aligned target values
  std::vector<double> log_mix_sum;     // log sum_tau q_tau(x_i), incremental
  std::vector<double> log_w;

  for (std::size_t t = 0; t < iterations; ++t) {
    auto proposal = std::make_shared<const GaussianDensity>(mean, cov);
    proposals.push_back(proposal);
    // new draws
    Point x(dim);
    for (std::size_t i = 0; i < m; ++i) {
      proposal->sample(rng, x);
      coords.insert(coords.end(), x.begin(), x.end());
      log_pi.push_back(target.log_pi(x));
      double acc = neg_inf;
      for (const auto& q : proposals) acc = log_add_exp(acc, q->log_density(x));
      log_mix_sum.push_back(acc);
    }
    // fold the new proposal into the old samples' accumulators
    const std::size_t total = log_pi.size();
    for (std::size_t i = 0; i + m < total; ++i) {
      std::span<const double> xi{coords.data() + i * dim, dim};
      log_mix_sum[i] = log_add_exp(log_mix_sum[i], proposal->log_density(xi));
    }
    // temporal-mixture weights over the whole history
    const double log_t = std::log(static_cast<double>(t + 1));
    log_w.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      log_w[i] = log_pi[i] - (log_mix_sum[i] - log_t);
    }
    if (t + 1 == iterations) break;
    // proposal update from the current weighted estimates
    std::vector<double> wbar;
    try {
      wbar = normalize_log_weights(log_w);
    } catch (const degenerate_weights_error&) {
      throw degenerate_weights_error("amis: degenerate weights at iteration " +
                                     std::to_string(t + 1));
    }
    std::vector<double> new_mean(dim, 0.0);
    for (std::size_t i = 0; i < total; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        new_mean[d] += wbar[i] * coords[i * dim + d];
      }
    }
    mean = new_mean;
    if (cfg.adapt_covariance) {
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
      Eigen::VectorXd diff(n);
      for (std::size_t i = 0; i < total; ++i) {
        for (Eigen::Index d = 0; d < n; ++d) {
          diff(d) = coords[i * dim + static_cast<std::size_t>(d)] - mean[d];
        }
        c.noalias() += wbar[i] * diff * diff.transpose();
      }
      Eigen::LLT<Eigen::MatrixXd> llt(c);
      cov = llt.info() == Eigen::Success ? c : fallback;
    }
  }

  BaselineRun run;
  run.particles = WeightedParticleSet(dim);
  run.particles.reserve(log_pi.size());
  for (std::size_t i = 0; i < log_pi.size(); ++i) {
    run.particles.add({coords.data() + i * dim, dim}, log_w[i],
                      static_cast<std::uint32_t>(i / m),
                      static_cast<std::uint32_t>(i % m));
  }
  run.log_pi_values = std::move(log_pi);
  run.target_evaluations = target.evaluations() - start_evals;
  return run;
}

}  // namespace radis

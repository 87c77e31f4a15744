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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "radis/density.hpp"
#include "radis/domain.hpp"
#include "radis/emulator_gp.hpp"
#include "radis/emulator_nn.hpp"
#include "radis/errors.hpp"
#include "radis/inner_is.hpp"
#include "radis/particles.hpp"
#include "radis/rng.hpp"
#include "radis/target.hpp"
#include "radis/weights.hpp"

namespace radis {

// ---------------------------------------------------------------------------
// Configuration

struct NnEmulatorSpec {
  std::size_t k = 1;  // neighbors; 1 interpolates, >1 regresses
};

struct GpEmulatorSpec {
  double noise = 1e-6;          // zeta; 0 interpolates
  double lengthscale = 1.0;     // used until the first tuning pass
  std::size_t tune_every = 5;   // grid-tune the lengthscale every so many iterations; 0 disables
  std::vector<double> lengthscale_grid;  // empty: log-spaced default
  std::size_t max_nodes = 2000;          // farthest-point cap on the O(J^3) fit
};

using EmulatorSpec = std::variant<NnEmulatorSpec, GpEmulatorSpec>;

/// Mixing weight alpha_t for the parametric component of Eq.-style
/// robust proposals; non-increasing in t.
struct AlphaSchedule {
  enum class Kind { Zero, Fixed, Decay };
  Kind kind = Kind::Zero;
  double value = 0.5;  // Fixed: the constant; Decay: the floor alpha_inf

  double operator()(std::size_t t, std::size_t total) const {
    switch (kind) {
      case Kind::Zero:
        return 0.0;
      case Kind::Fixed:
        return value;
      case Kind::Decay:
        return std::max(value, 0.5 * (1.0 - static_cast<double>(t) /
                                                static_cast<double>(total)));
    }
    return 0.0;
  }
};

/// Initial support points: either `count` fresh draws in a box
/// (optionally seeding box vertices first), or an explicit list of
/// pre-evaluated nodes whose target values are already paid for.
struct InitialNodes {
  std::size_t count = 10;
  bool include_vertices = false;
  std::optional<Box> box;  // defaults to the target box / support box
  std::vector<double> points_flat;  // pre-evaluated nodes (optional)
  std::vector<double> log_values;
};

struct AuxProposalSpec {
  enum class Kind { UniformSupport, StudentTMatched, Fixed };
  Kind kind = Kind::UniformSupport;
  double dof = 5.0;   // StudentTMatched
  DensityPtr fixed;   // Fixed
};

struct RadisLayer {
  EmulatorSpec emulator{NnEmulatorSpec{}};
  std::size_t batch = 0;  // L_d auxiliary samples entering this layer
};

struct RadisConfig {
  std::size_t iterations = 0;             // T
  std::size_t samples_per_iteration = 0;  // N
  std::vector<RadisLayer> layers;         // layers[0].batch is L
  AuxProposalSpec aux;
  DensityPtr q_par;  // optional parametric mixture component
  AlphaSchedule alpha;
  InitialNodes init;
  bool regularized_resampling = false;
  std::optional<Box> support;  // initial emulator support
  double dedup_tol = -1.0;     // negative: 1e-9 * support diagonal
  std::uint64_t seed = 0;

  /// Single-layer convenience constructor body; callers fill fields.
  static RadisConfig single(std::size_t t, std::size_t n, std::size_t l,
                            EmulatorSpec emulator = NnEmulatorSpec{}) {
    RadisConfig cfg;
    cfg.iterations = t;
    cfg.samples_per_iteration = n;
    cfg.layers.push_back({std::move(emulator), l});
    return cfg;
  }
};

// ---------------------------------------------------------------------------
// Proposal trace for the final deterministic-mixture weighting

/// The proposal as it existed at one iteration: the (last-layer)
/// emulator snapshot, its mass estimate, and the parametric mixture
/// component if one was active.
struct ProposalSnapshot {
  EmulatorPtr emulator;
  double log_c_hat = 0.0;
  double alpha = 0.0;
  DensityPtr q_par;

  /// log phi_tau(x) = log(alpha q_par(x) + (1-alpha) pihat(x)/chat).
  double log_density(std::span<const double> x) const {
    if (alpha <= 0.0) return emulator->log_value(x) - log_c_hat;
    const double par = std::log(alpha) + q_par->log_density(x);
    if (alpha >= 1.0) return par;
    return log_add_exp(par, std::log1p(-alpha) +
                                (emulator->log_value(x) - log_c_hat));
  }
};

using EmulatorTrace = std::vector<ProposalSnapshot>;

/// Temporal deterministic-mixture weights: w = pi(x) divided by the
/// average of all T historical proposal densities at x. Log-domain
/// throughout; no target evaluations happen here.
inline std::vector<double> outer_log_weights(
    const WeightedParticleSet& particles, std::span<const double> log_pi_values,
    const EmulatorTrace& trace) {
  if (trace.empty()) throw std::invalid_argument("outer_log_weights: empty trace");
  if (log_pi_values.size() != particles.size()) {
    throw std::invalid_argument("outer_log_weights: size mismatch");
  }
  const double log_T = std::log(static_cast<double>(trace.size()));
  std::vector<double> out(particles.size());
  std::vector<double> terms(trace.size());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const auto x = particles.point(i);
    for (std::size_t tau = 0; tau < trace.size(); ++tau) {
      terms[tau] = trace[tau].log_density(x);
    }
    const double denom = log_sum_exp(terms) - log_T;
    if (denom == neg_inf) {
      throw support_violation_error(
          "outer_log_weights: zero mixture density at a particle");
    }
    out[i] = log_pi_values[i] - denom;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standalone robust-mixture proposal (sampler + log-density)

/// phi(x) = alpha q_par(x) + (1-alpha) pihat(x)/chat. Sampling draws the
/// parametric branch with probability alpha and otherwise runs one
/// inner SIR pass against the auxiliary proposal.
class MixtureProposal {
 public:
  MixtureProposal(EmulatorPtr emulator, double c_hat, DensityPtr q_par,
                  double alpha, DensityPtr aux, std::size_t pool_size)
      : snapshot_{std::move(emulator), std::log(c_hat), alpha, std::move(q_par)},
        aux_(std::move(aux)),
        pool_size_(pool_size) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
      throw config_error("MixtureProposal: alpha outside [0,1]");
    }
    if (!(c_hat > 0.0)) throw config_error("MixtureProposal: c_hat must be positive");
    if (alpha > 0.0 && snapshot_.q_par == nullptr) {
      throw config_error("MixtureProposal: alpha > 0 needs q_par");
    }
  }

  double log_density(std::span<const double> x) const {
    return snapshot_.log_density(x);
  }

  Point sample(Rng& rng) const {
    if (snapshot_.alpha > 0.0 && rng.uniform01() < snapshot_.alpha) {
      return snapshot_.q_par->draw(rng);
    }
    const std::size_t dim = aux_->dim();
    std::vector<double> pool(pool_size_ * dim);
    for (std::size_t i = 0; i < pool_size_; ++i) {
      aux_->sample(rng, {pool.data() + i * dim, dim});
    }
    const auto lg = inner_log_weights(
        [&](std::span<const double> z) { return snapshot_.emulator->log_value(z); },
        *aux_, pool, pool_size_);
    const auto idx = multinomial_resample_indices(lg, 1, rng);
    return Point(pool.data() + idx[0] * dim, pool.data() + (idx[0] + 1) * dim);
  }

  const ProposalSnapshot& snapshot() const { return snapshot_; }

 private:
  ProposalSnapshot snapshot_;
  DensityPtr aux_;
  std::size_t pool_size_;
};

inline MixtureProposal mixture_proposal(EmulatorPtr emulator, double c_hat,
                                        DensityPtr q_par, double alpha,
                                        DensityPtr aux, std::size_t pool_size) {
  return MixtureProposal(std::move(emulator), c_hat, std::move(q_par), alpha,
                         std::move(aux), pool_size);
}

/// Equally-weighted Gaussian mixture from externally supplied location
/// parameters (e.g. a LAIS chain); the parametric component of the
/// robust proposal. The isotropic overload below is the hot path.
inline DensityPtr adaptive_parametric_mixture(
    std::span<const double> means_flat, std::size_t dim,
    const std::vector<Eigen::MatrixXd>& covariances) {
  if (dim == 0 || means_flat.empty() || covariances.empty() ||
      means_flat.size() != covariances.size() * dim) {
    throw config_error("adaptive_parametric_mixture: empty or mismatched components");
  }
  std::vector<DensityPtr> comps;
  for (std::size_t c = 0; c < covariances.size(); ++c) {
    std::vector<double> mean(means_flat.begin() + c * dim,
                             means_flat.begin() + (c + 1) * dim);
    comps.push_back(
        std::make_shared<GaussianDensity>(std::move(mean), covariances[c]));
  }
  return std::make_shared<MixtureDensity>(
      MixtureDensity::equally_weighted(std::move(comps)));
}

inline DensityPtr adaptive_parametric_mixture(std::span<const double> means_flat,
                                              std::size_t dim, double stddev) {
  return std::make_shared<IsotropicGaussianMixture>(
      std::vector<double>(means_flat.begin(), means_flat.end()), dim, stddev);
}

// ---------------------------------------------------------------------------
// Output

struct RadisOutput {
  WeightedParticleSet particles;        // all {x_tn, w_tn}
  std::vector<double> log_pi_values;    // pi at each particle, aligned
  std::vector<double> c_hat_trace;      // chat_t per iteration (linear)
  EmulatorTrace trace;                  // proposal snapshots tau = 1..T
  std::vector<EmulatorPtr> final_emulators;  // pihat_{T+1}, one per layer
  std::shared_ptr<const NodeSet> nodes;      // S_T
  Box support;                               // D_T
  double log_evidence = 0.0;
  double evidence = 0.0;
  std::uint64_t target_evaluations = 0;  // ledger delta for this run

  RadisOutput() : particles(0) {}

  std::size_t map_index() const {
    return particles.argmax(log_pi_values);
  }
  std::span<const double> map_point() const {
    return particles.point(map_index());
  }
};

// ---------------------------------------------------------------------------
// The sampler

namespace detail {

inline Box pad_degenerate(Box box) {
  std::vector<double> lo = box.lower(), hi = box.upper();
  bool changed = false;
  for (std::size_t d = 0; d < lo.size(); ++d) {
    if (hi[d] - lo[d] <= 0.0) {
      const double pad = std::max(1e-6, 1e-6 * std::abs(lo[d]));
      lo[d] -= pad;
      hi[d] += pad;
      changed = true;
    }
  }
  return changed ? Box(std::move(lo), std::move(hi)) : box;
}

inline std::vector<double> default_lengthscale_grid(const Box& support) {
  // log-spaced between 1e-2 and 1x the support diagonal
  const double diag = support.diagonal();
  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i) {
    grid.push_back(diag * std::pow(10.0, -2.0 + 2.0 * i / 8.0));
  }
  return grid;
}

struct LayerState {
  EmulatorSpec spec;
  std::size_t batch = 0;
  double gp_lengthscale = 1.0;
  EmulatorPtr emulator;  // rebuilt every iteration
};

inline EmulatorPtr build_layer_emulator(LayerState& layer,
                                        const std::shared_ptr<const NodeSet>& nodes,
                                        const Box& support, std::size_t iteration) {
  if (std::holds_alternative<NnEmulatorSpec>(layer.spec)) {
    const auto& spec = std::get<NnEmulatorSpec>(layer.spec);
    const std::size_t k = std::min(spec.k, nodes->size());
    return build_nn(nodes, std::max<std::size_t>(k, 1), support);
  }
  const auto& spec = std::get<GpEmulatorSpec>(layer.spec);
  std::shared_ptr<const NodeSet> working = nodes;
  if (nodes->size() > spec.max_nodes) {
    const auto keep = farthest_point_subset(*nodes, spec.max_nodes);
    auto thinned = std::make_shared<NodeSet>(nodes->dim());
    for (std::size_t i : keep) {
      thinned->add_nodes(nodes->node(i), {&nodes->log_values()[i], 1}, 0.0);
    }
    working = thinned;
  }
  if (spec.tune_every > 0 && working->size() >= 2 &&
      (iteration == 1 || iteration % spec.tune_every == 0)) {
    auto grid = spec.lengthscale_grid.empty() ? default_lengthscale_grid(support)
                                              : spec.lengthscale_grid;
    layer.gp_lengthscale = tune_lengthscale(working, spec.noise, grid);
  }
  return fit_gp(working, GpKernel{layer.gp_lengthscale, spec.noise});
}

}  // namespace detail

/// One full adaptive run: per iteration, build the emulator chain from
/// the current nodes, draw the inner pool, estimate the emulator mass,
/// resample N points (through every layer in deep mode), evaluate the
/// true target only at those N points, and grow the node set. The
/// deterministic-mixture weighting runs once at the end over the stored
/// snapshots. Exactly |fresh initial nodes| + N*T target evaluations.
inline RadisOutput run_radis(const TargetDensity& target, const RadisConfig& cfg,
                             Rng rng) {
  // -- validation
  if (cfg.iterations == 0) throw config_error("run_radis: iterations must be >= 1");
  if (cfg.samples_per_iteration == 0) {
    throw config_error("run_radis: samples per iteration must be >= 1");
  }
  if (cfg.layers.empty()) throw config_error("run_radis: no layers");
  const std::size_t n_out = cfg.samples_per_iteration;
  for (std::size_t d = 0; d < cfg.layers.size(); ++d) {
    const std::size_t next =
        d + 1 < cfg.layers.size() ? cfg.layers[d + 1].batch : n_out;
    if (cfg.layers[d].batch <= next) {
      throw config_error("run_radis: layer batches must decrease strictly down to N");
    }
  }
  if (cfg.layers[0].batch < 10 * n_out) {
    std::fprintf(stderr,
                 "radis: warning: L/N = %zu/%zu is below the recommended "
                 "ratio of 10\n",
                 cfg.layers[0].batch, n_out);
  }
  const bool has_nn_layer = [&] {
    for (const auto& l : cfg.layers) {
      if (std::holds_alternative<NnEmulatorSpec>(l.emulator)) return true;
    }
    return false;
  }();
  if (!target.domain().is_bounded() && has_nn_layer && cfg.q_par == nullptr) {
    throw config_error(
        "run_radis: NN emulator on an unbounded domain requires q_par");
  }
  if (cfg.alpha.kind != AlphaSchedule::Kind::Zero && cfg.q_par == nullptr) {
    throw config_error("run_radis: alpha schedule set but no q_par given");
  }
  if (cfg.aux.kind == AuxProposalSpec::Kind::Fixed && cfg.aux.fixed == nullptr) {
    throw config_error("run_radis: fixed auxiliary proposal not provided");
  }
  const std::size_t dim = target.dim();
  const std::uint64_t ledger_start = target.evaluations();

  // -- initial nodes
  auto nodes = std::make_shared<NodeSet>(dim);
  const bool needs_placement = cfg.init.count > 0 || cfg.init.include_vertices;
  Box placement = Box::cube(dim, 0.0, 1.0);
  if (needs_placement) {
    if (cfg.init.box.has_value()) {
      placement = *cfg.init.box;
    } else if (cfg.support.has_value()) {
      placement = *cfg.support;
    } else if (target.domain().is_bounded()) {
      placement = target.domain().box();
    } else {
      throw config_error(
          "run_radis: initial-node box required on an unbounded domain");
    }
  }
  std::uint64_t fresh_evals = 0;
  {
    std::vector<double> pts;
    std::vector<double> vals;
    if (!cfg.init.points_flat.empty()) {
      // pre-evaluated nodes: already paid for elsewhere
      std::vector<double> pre_pts, pre_vals;
      for (std::size_t i = 0; i < cfg.init.log_values.size(); ++i) {
        if (cfg.init.log_values[i] != neg_inf) {
          pre_pts.insert(pre_pts.end(), cfg.init.points_flat.begin() + i * dim,
                         cfg.init.points_flat.begin() + (i + 1) * dim);
          pre_vals.push_back(cfg.init.log_values[i]);
        }
      }
      nodes->add_nodes(pre_pts, pre_vals, 0.0);
    }
    std::size_t fresh = cfg.init.count;
    if (cfg.init.include_vertices) {
      const std::size_t vertices = std::min<std::size_t>(
          fresh, dim <= 20 ? (std::size_t{1} << dim) : fresh);
      Point v(dim);
      for (std::size_t mask = 0; mask < vertices; ++mask) {
        for (std::size_t d = 0; d < dim; ++d) {
          v[d] = (mask >> d) & 1 ? placement.upper()[d] : placement.lower()[d];
        }
        pts.insert(pts.end(), v.begin(), v.end());
        vals.push_back(target.log_pi(v));
        ++fresh_evals;
      }
      fresh -= vertices;
    }
    Point x(dim);
    for (std::size_t i = 0; i < fresh; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        x[d] = rng.uniform(placement.lower()[d], placement.upper()[d]);
      }
      pts.insert(pts.end(), x.begin(), x.end());
      vals.push_back(target.log_pi(x));
      ++fresh_evals;
    }
    // zero-density points carry no regression information; drop them as
    // nodes (their evaluations are still on the ledger)
    std::vector<double> keep_pts, keep_vals;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (vals[i] != neg_inf) {
        keep_pts.insert(keep_pts.end(), pts.begin() + i * dim,
                        pts.begin() + (i + 1) * dim);
        keep_vals.push_back(vals[i]);
      }
    }
    nodes->add_nodes(keep_pts, keep_vals, 0.0);
  }
  if (nodes->empty()) {
    throw degenerate_weights_error(
        "run_radis: every initial node has zero target density");
  }

  // -- support box: explicit, else the bounded domain, else the node
  // bounding box (which then grows with the node set)
  Box support = Box::cube(dim, 0.0, 1.0);
  if (cfg.support.has_value()) {
    support = *cfg.support;
  } else if (target.domain().is_bounded()) {
    support = target.domain().box();
  } else {
    std::vector<double> lo, hi;
    nodes->bounds(lo, hi);
    support = detail::pad_degenerate(Box(std::move(lo), std::move(hi)));
  }
  const bool adapt_support =
      !cfg.support.has_value() && !target.domain().is_bounded();
  const double dedup_tol =
      cfg.dedup_tol >= 0.0 ? cfg.dedup_tol : 1e-9 * support.diagonal();

  std::vector<detail::LayerState> layers;
  for (const auto& l : cfg.layers) {
    detail::LayerState state;
    state.spec = l.emulator;
    state.batch = l.batch;
    if (std::holds_alternative<GpEmulatorSpec>(l.emulator)) {
      state.gp_lengthscale = std::get<GpEmulatorSpec>(l.emulator).lengthscale;
    }
    layers.push_back(std::move(state));
  }

  RadisOutput out;
  out.particles = WeightedParticleSet(dim);
  out.particles.reserve(n_out * cfg.iterations);
  out.log_pi_values.reserve(n_out * cfg.iterations);

  // -- main loop
  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    const double alpha = cfg.q_par ? cfg.alpha(t, cfg.iterations) : 0.0;

    // emulator chain on S_{t-1}
    for (auto& layer : layers) {
      layer.emulator = detail::build_layer_emulator(layer, nodes, support, t);
    }

    // auxiliary proposal for the first layer
    DensityPtr aux;
    switch (cfg.aux.kind) {
      case AuxProposalSpec::Kind::UniformSupport:
        aux = std::make_shared<UniformBoxDensity>(detail::pad_degenerate(support));
        break;
      case AuxProposalSpec::Kind::StudentTMatched: {
        std::vector<double> lo, hi;
        nodes->bounds(lo, hi);
        std::vector<double> loc(dim), scale(dim);
        for (std::size_t d = 0; d < dim; ++d) {
          loc[d] = 0.5 * (lo[d] + hi[d]);
          scale[d] = std::max(0.5 * (hi[d] - lo[d]), 1e-6);
        }
        aux = std::make_shared<StudentTDensity>(loc, scale, cfg.aux.dof);
        break;
      }
      case AuxProposalSpec::Kind::Fixed:
        aux = cfg.aux.fixed;
        break;
    }

    // layer 1: pool from q_aux, weights against the first emulator
    const std::size_t pool1 = layers[0].batch;
    std::vector<double> pool(pool1 * dim);
    for (std::size_t i = 0; i < pool1; ++i) {
      aux->sample(rng, {pool.data() + i * dim, dim});
    }
    std::vector<double> log_gamma;
    double log_c_hat;
    try {
      log_gamma = inner_log_weights(
          [&](std::span<const double> z) {
            return layers[0].emulator->log_value(z);
          },
          *aux, pool, pool1);
      log_c_hat = log_estimate_normalizer(log_gamma);
      if (log_c_hat == neg_inf) {
        throw degenerate_weights_error("inner weights all zero");
      }
    } catch (const degenerate_weights_error&) {
      throw degenerate_weights_error("run_radis: degenerate inner weights at iteration " +
                                     std::to_string(t));
    }

    // deeper layers: resample, re-weight against the next emulator
    std::size_t pool_count = pool1;
    for (std::size_t d = 1; d < layers.size(); ++d) {
      const std::size_t next = layers[d].batch;
      std::vector<std::size_t> idx;
      try {
        idx = multinomial_resample_indices(log_gamma, next, rng);
      } catch (const degenerate_weights_error&) {
        throw degenerate_weights_error(
            "run_radis: degenerate inner weights at iteration " + std::to_string(t));
      }
      std::vector<double> next_pool(next * dim);
      std::vector<double> next_gamma(next);
      for (std::size_t i = 0; i < next; ++i) {
        const double* src = pool.data() + idx[i] * dim;
        std::copy(src, src + dim, next_pool.data() + i * dim);
        // incoming cloud follows ~ previous emulator / previous chat
        std::span<const double> z{next_pool.data() + i * dim, dim};
        next_gamma[i] = layers[d].emulator->log_value(z) -
                        (layers[d - 1].emulator->log_value(z) - log_c_hat);
      }
      pool.swap(next_pool);
      log_gamma.swap(next_gamma);
      pool_count = next;
      log_c_hat = log_estimate_normalizer(log_gamma);
      if (log_c_hat == neg_inf) {
        throw degenerate_weights_error(
            "run_radis: degenerate inner weights at iteration " + std::to_string(t));
      }
    }

    // snapshot for the final weighting: the last-layer proposal
    out.trace.push_back(ProposalSnapshot{layers.back().emulator, log_c_hat,
                                         alpha, cfg.q_par});
    out.c_hat_trace.push_back(std::exp(log_c_hat));

    // draw the N outputs: parametric branch with probability alpha,
    // otherwise resample from the final pool
    std::vector<double> new_points(n_out * dim);
    {
      std::size_t n_emulator = 0;
      std::vector<bool> from_par(n_out, false);
      for (std::size_t i = 0; i < n_out; ++i) {
        if (alpha > 0.0 && rng.uniform01() < alpha) {
          from_par[i] = true;
        } else {
          ++n_emulator;
        }
      }
      std::vector<Point> resampled;
      if (n_emulator > 0) {
        try {
          if (cfg.regularized_resampling) {
            const auto h = silverman_bandwidth(pool, dim, log_gamma, pool_count);
            resampled = regularized_resample(pool, dim, log_gamma, n_emulator, h,
                                             target.domain(), rng);
          } else {
            resampled =
                multinomial_resample(pool, dim, log_gamma, n_emulator, rng);
          }
        } catch (const degenerate_weights_error&) {
          throw degenerate_weights_error(
              "run_radis: degenerate inner weights at iteration " +
              std::to_string(t));
        }
      }
      std::size_t next_resampled = 0;
      Point x(dim);
      for (std::size_t i = 0; i < n_out; ++i) {
        if (from_par[i]) {
          cfg.q_par->sample(rng, x);
        } else {
          x = resampled[next_resampled++];
        }
        std::copy(x.begin(), x.end(), new_points.data() + i * dim);
      }
    }

    // evaluate the true target at exactly N points and record particles
    std::vector<double> new_log_pi(n_out);
    for (std::size_t i = 0; i < n_out; ++i) {
      std::span<const double> x{new_points.data() + i * dim, dim};
      new_log_pi[i] = target.log_pi(x);
      out.particles.add(x, 0.0, static_cast<std::uint32_t>(t),
                        static_cast<std::uint32_t>(i));
      out.log_pi_values.push_back(new_log_pi[i]);
    }

    // grow the node set (copy-on-grow keeps earlier snapshots intact)
    {
      std::vector<double> keep_pts, keep_vals;
      for (std::size_t i = 0; i < n_out; ++i) {
        if (new_log_pi[i] != neg_inf) {
          keep_pts.insert(keep_pts.end(), new_points.begin() + i * dim,
                          new_points.begin() + (i + 1) * dim);
          keep_vals.push_back(new_log_pi[i]);
        }
      }
      auto grown = std::make_shared<NodeSet>(*nodes);
      grown->add_nodes(keep_pts, keep_vals, dedup_tol);
      nodes = grown;
    }
    if (adapt_support) {
      support = detail::pad_degenerate(expand_support(support, *nodes));
    }
  }

  // -- outer weighting, once at the end
  const auto log_w = outer_log_weights(out.particles, out.log_pi_values, out.trace);
  {
    WeightedParticleSet weighted(dim);
    weighted.reserve(out.particles.size());
    for (std::size_t i = 0; i < out.particles.size(); ++i) {
      weighted.add(out.particles.point(i), log_w[i], out.particles.iteration_tag(i),
                   out.particles.sample_tag(i));
    }
    out.particles = std::move(weighted);
  }
  out.log_evidence = out.particles.log_evidence();
  out.evidence = std::exp(out.log_evidence);
  out.nodes = nodes;
  out.support = support;
  for (auto& layer : layers) {
    out.final_emulators.push_back(detail::build_layer_emulator(
        layer, nodes, support, cfg.iterations + 1));
  }
  out.target_evaluations = target.evaluations() - ledger_start;
  if (out.target_evaluations != fresh_evals + n_out * cfg.iterations) {
    throw std::logic_error("run_radis: evaluation ledger mismatch");
  }
  return out;
}

/// Deep-architecture entry point; with one layer this is exactly
/// run_radis on the same code path, so equal seeds give equal outputs.
inline RadisOutput run_deep_radis(const TargetDensity& target,
                                  const RadisConfig& cfg, Rng rng) {
  return run_radis(target, cfg, rng);
}

}  // namespace radis

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

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "radis/density.hpp"
#include "radis/domain.hpp"
#include "radis/errors.hpp"
#include "radis/rng.hpp"
#include "radis/weights.hpp"

namespace radis {

/// Walker alias table: O(n) build, O(1) categorical draws. This is the
/// resampling workhorse; the inner layer draws N of L=1e5 with it.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> probabilities)
      : prob_(probabilities.size()), alias_(probabilities.size()) {
    const std::size_t n = probabilities.size();
    if (n == 0) throw std::invalid_argument("AliasTable: empty probabilities");
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = probabilities[i] * static_cast<double>(n);
    }
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t g = large.back();
      prob_[s] = scaled[s];
      alias_[s] = g;
      scaled[g] = (scaled[g] + scaled[s]) - 1.0;
      if (scaled[g] < 1.0) {
        large.pop_back();
        small.push_back(g);
      }
    }
    for (std::size_t i : large) prob_[i] = 1.0;
    for (std::size_t i : small) prob_[i] = 1.0;
  }

  std::size_t draw(Rng& rng) const {
    const std::size_t i = rng.uniform_index(prob_.size());
    return rng.uniform01() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

/// Inner IS weights gamma_l = pihat(z_l) / q_aux(z_l) in the log domain.
/// Never touches the true target. A sample where the auxiliary density
/// vanishes violates the support condition and is an error.
inline std::vector<double> inner_log_weights(
    const std::function<double(std::span<const double>)>& emulator_log_value,
    const Density& aux, std::span<const double> samples_flat, std::size_t count) {
  if (count == 0) throw std::invalid_argument("inner_log_weights: no samples");
  const std::size_t dim = aux.dim();
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::span<const double> z{samples_flat.data() + i * dim, dim};
    const double lq = aux.log_density(z);
    if (lq == neg_inf) {
      throw support_violation_error(
          "inner_log_weights: auxiliary density is zero at a drawn sample");
    }
    out[i] = emulator_log_value(z) - lq;
  }
  return out;
}

/// Linear-domain convenience used by tests and small batches.
inline std::vector<double> inner_weights(
    const std::function<double(std::span<const double>)>& emulator_log_value,
    const Density& aux, std::span<const double> samples_flat, std::size_t count) {
  auto lg = inner_log_weights(emulator_log_value, aux, samples_flat, count);
  for (double& v : lg) v = std::exp(v);
  return lg;
}

/// chat = (1/L) sum gamma_l, the emulator mass estimate.
inline double estimate_normalizer(std::span<const double> gamma) {
  if (gamma.empty()) throw std::invalid_argument("estimate_normalizer: empty");
  double acc = 0.0;
  for (double g : gamma) acc += g;
  return acc / static_cast<double>(gamma.size());
}

inline double log_estimate_normalizer(std::span<const double> log_gamma) {
  return log_evidence_estimate(log_gamma);
}

/// N i.i.d. categorical draws over the pool, probabilities proportional
/// to gamma. Returns pool indices; duplicates possible.
inline std::vector<std::size_t> multinomial_resample_indices(
    std::span<const double> log_gamma, std::size_t n, Rng& rng) {
  const auto probs = normalize_log_weights(log_gamma);  // throws if degenerate
  const AliasTable table(probs);
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = table.draw(rng);
  return out;
}

inline std::vector<Point> multinomial_resample(std::span<const double> points_flat,
                                               std::size_t dim,
                                               std::span<const double> log_gamma,
                                               std::size_t n, Rng& rng) {
  const auto idx = multinomial_resample_indices(log_gamma, n, rng);
  std::vector<Point> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* p = points_flat.data() + idx[i] * dim;
    out[i].assign(p, p + dim);
  }
  return out;
}

/// Silverman's per-dimension bandwidth: h_d = sigma_d (4/((d+2)L))^(1/(d+4)),
/// with sigma_d the weighted standard deviation of the pool. Shrinks at
/// the L^(-1/(d+4)) KDE-optimal rate.
inline std::vector<double> silverman_bandwidth(std::span<const double> points_flat,
                                               std::size_t dim,
                                               std::span<const double> log_gamma,
                                               std::size_t pool_size) {
  const auto wbar = normalize_log_weights(log_gamma);
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (std::size_t i = 0; i < pool_size; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      mean[d] += wbar[i] * points_flat[i * dim + d];
    }
  }
  for (std::size_t i = 0; i < pool_size; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double e = points_flat[i * dim + d] - mean[d];
      var[d] += wbar[i] * e * e;
    }
  }
  const double exponent = 1.0 / (static_cast<double>(dim) + 4.0);
  const double factor =
      std::pow(4.0 / ((static_cast<double>(dim) + 2.0) *
                      static_cast<double>(pool_size)),
               exponent);
  std::vector<double> h(dim);
  for (std::size_t d = 0; d < dim; ++d) h[d] = std::sqrt(var[d]) * factor;
  return h;
}

/// Multinomial resampling followed by a Gaussian perturbation with the
/// given per-dimension bandwidth, so the output points are a.s.
/// distinct. Perturbations leaving a bounded target domain are redrawn
/// up to 100 times, then clipped to the boundary.
inline std::vector<Point> regularized_resample(
    std::span<const double> points_flat, std::size_t dim,
    std::span<const double> log_gamma, std::size_t n,
    std::span<const double> bandwidth, const Domain& domain, Rng& rng) {
  const auto idx = multinomial_resample_indices(log_gamma, n, rng);
  std::vector<Point> out(n);
  Point candidate(dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double* base = points_flat.data() + idx[i] * dim;
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (std::size_t d = 0; d < dim; ++d) {
        candidate[d] = base[d] + bandwidth[d] * rng.normal();
      }
      if (domain.contains(candidate)) break;
    }
    if (!domain.contains(candidate)) domain.box().clip(candidate);
    out[i] = candidate;
  }
  return out;
}

/// Kolmogorov-Smirnov distance between a sample and an analytic CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double F = cdf(sample[i]);
    ks = std::max(ks, std::abs(F - static_cast<double>(i) / n));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - F));
  }
  return ks;
}

/// SIR bias diagnostic: for each pool size L, the KS distance between
/// the resampled empirical CDF and the analytic target CDF. The bias
/// shrinks as L grows; the property suite asserts the monotone trend.
struct SirProbePoint {
  std::size_t pool_size;
  double ks;
};

inline std::vector<SirProbePoint> sir_bias_probe(
    const std::function<double(double)>& target_log_pdf,
    const std::function<double(double)>& target_cdf, const Density& aux,
    std::span<const std::size_t> pool_schedule, std::size_t n, Rng& rng) {
  if (aux.dim() != 1) throw std::invalid_argument("sir_bias_probe: 1-D only");
  std::vector<SirProbePoint> out;
  for (std::size_t pool : pool_schedule) {
    std::vector<double> z(pool), lg(pool);
    Point x(1);
    for (std::size_t i = 0; i < pool; ++i) {
      aux.sample(rng, x);
      z[i] = x[0];
      lg[i] = target_log_pdf(x[0]) - aux.log_density(x);
    }
    const auto idx = multinomial_resample_indices(lg, n, rng);
    std::vector<double> resampled(n);
    for (std::size_t i = 0; i < n; ++i) resampled[i] = z[idx[i]];
    out.push_back({pool, ks_distance(std::move(resampled), target_cdf)});
  }
  return out;
}

}  // namespace radis

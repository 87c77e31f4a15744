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
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "radis/weights.hpp"

namespace radis {

/// Weighted sample cloud {x, w} with iteration/sample tags. Weights are
/// stored in the log domain; the linear accessors exponentiate on the
/// way out. An empty set is invalid and every summary below throws on
/// one.
class WeightedParticleSet {
 public:
  explicit WeightedParticleSet(std::size_t dim) : dim_(dim) {}

  void reserve(std::size_t n) {
    coords_.reserve(n * dim_);
    log_weights_.reserve(n);
    iteration_tags_.reserve(n);
    sample_tags_.reserve(n);
  }

  void add(std::span<const double> x, double log_weight,
           std::uint32_t iteration = 0, std::uint32_t sample = 0) {
    if (x.size() != dim_) {
      throw std::invalid_argument("WeightedParticleSet: dimension mismatch");
    }
    if (std::isnan(log_weight) || log_weight == std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("WeightedParticleSet: weight must be finite and non-negative");
    }
    coords_.insert(coords_.end(), x.begin(), x.end());
    log_weights_.push_back(log_weight);
    iteration_tags_.push_back(iteration);
    sample_tags_.push_back(sample);
  }

  std::size_t size() const { return log_weights_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return log_weights_.empty(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double log_weight(std::size_t i) const { return log_weights_[i]; }
  double weight(std::size_t i) const { return std::exp(log_weights_[i]); }
  std::uint32_t iteration_tag(std::size_t i) const { return iteration_tags_[i]; }
  std::uint32_t sample_tag(std::size_t i) const { return sample_tags_[i]; }
  std::span<const double> log_weights() const { return log_weights_; }

  std::vector<double> weights() const {
    require_nonempty();
    std::vector<double> w(size());
    for (std::size_t i = 0; i < size(); ++i) w[i] = std::exp(log_weights_[i]);
    return w;
  }

  /// Zhat: arithmetic mean of the unnormalized weights.
  double evidence() const { return std::exp(log_evidence()); }

  double log_evidence() const {
    require_nonempty();
    return log_evidence_estimate(log_weights_);
  }

  std::vector<double> normalized_weights() const {
    require_nonempty();
    return normalize_log_weights(log_weights_);
  }

  double ess() const { return effective_sample_size(normalized_weights()); }

  /// Self-normalized estimate of E[f(x)] under the target.
  std::vector<double> estimate(
      const std::function<std::vector<double>(std::span<const double>)>& f) const {
    const auto wbar = normalized_weights();
    std::vector<double> acc;
    for (std::size_t i = 0; i < size(); ++i) {
      const auto fx = f(point(i));
      if (acc.empty()) acc.assign(fx.size(), 0.0);
      for (std::size_t k = 0; k < fx.size(); ++k) acc[k] += wbar[i] * fx[k];
    }
    return acc;
  }

  /// Self-normalized posterior mean.
  std::vector<double> mean() const {
    const auto wbar = normalized_weights();
    std::vector<double> m(dim_, 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
      const auto x = point(i);
      for (std::size_t d = 0; d < dim_; ++d) m[d] += wbar[i] * x[d];
    }
    return m;
  }

  /// Weighted quantile of one coordinate; p in [0,1]. Useful for
  /// credible intervals.
  double quantile(std::size_t dimension, double p) const {
    const auto wbar = normalized_weights();
    std::vector<std::size_t> order(size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return point(a)[dimension] < point(b)[dimension];
    });
    double acc = 0.0;
    for (std::size_t i : order) {
      acc += wbar[i];
      if (acc >= p) return point(i)[dimension];
    }
    return point(order.back())[dimension];
  }

  /// Index of the particle with the highest target value; requires the
  /// caller to have stored log pi as an auxiliary column.
  std::size_t argmax(std::span<const double> log_pi_values) const {
    require_nonempty();
    return static_cast<std::size_t>(
        std::max_element(log_pi_values.begin(), log_pi_values.end()) -
        log_pi_values.begin());
  }

 private:
  void require_nonempty() const {
    if (empty()) throw std::logic_error("WeightedParticleSet: empty set");
  }

  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<double> log_weights_;
  std::vector<std::uint32_t> iteration_tags_;
  std::vector<std::uint32_t> sample_tags_;
};

/// Self-normalized IS estimate over an explicit weight vector.
inline std::vector<double> self_normalized_estimate(
    const WeightedParticleSet& particles,
    const std::function<std::vector<double>(std::span<const double>)>& f) {
  return particles.estimate(f);
}

}  // namespace radis

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
#include <limits>
#include <span>
#include <vector>

#include "radis/errors.hpp"

namespace radis {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

/// log(sum(exp(v))) with max-subtraction so huge negative magnitudes do
/// not underflow. Returns -inf when every entry is -inf.
inline double log_sum_exp(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("log_sum_exp: empty input");
  }
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

inline double log_add_exp(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// Normalized weights proportional to w; w >= 0 and at least one entry
/// strictly positive, otherwise the proposal and target are mismatched.
inline std::vector<double> normalize_weights(std::span<const double> w) {
  if (w.empty()) throw std::invalid_argument("normalize_weights: empty input");
  double total = 0.0;
  for (double v : w) {
    if (v < 0.0 || !std::isfinite(v)) {
      throw std::invalid_argument("normalize_weights: negative or non-finite weight");
    }
    total += v;
  }
  if (total <= 0.0) {
    throw degenerate_weights_error("normalize_weights: all weights are zero");
  }
  std::vector<double> out(w.begin(), w.end());
  for (double& v : out) v /= total;
  return out;
}

/// Normalized weights from log weights, exponentiated after
/// max-subtraction. All entries -inf is degenerate.
inline std::vector<double> normalize_log_weights(std::span<const double> logw) {
  if (logw.empty()) {
    throw std::invalid_argument("normalize_log_weights: empty input");
  }
  const double m = *std::max_element(logw.begin(), logw.end());
  if (m == neg_inf) {
    throw degenerate_weights_error("normalize_log_weights: all weights are zero");
  }
  std::vector<double> out(logw.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    out[i] = std::exp(logw[i] - m);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

/// Evidence estimate: arithmetic mean of the unnormalized weights.
inline double evidence_estimate(std::span<const double> w) {
  if (w.empty()) throw std::invalid_argument("evidence_estimate: empty input");
  double acc = 0.0;
  for (double v : w) acc += v;
  return acc / static_cast<double>(w.size());
}

/// log of the evidence estimate, from log weights.
inline double log_evidence_estimate(std::span<const double> logw) {
  return log_sum_exp(logw) - std::log(static_cast<double>(logw.size()));
}

/// ESS = 1 / sum(wbar^2) for normalized weights; N when all equal, >= 1.
inline double effective_sample_size(std::span<const double> normalized) {
  if (normalized.empty()) {
    throw std::invalid_argument("effective_sample_size: empty input");
  }
  double acc = 0.0;
  for (double v : normalized) acc += v * v;
  return 1.0 / acc;
}

}  // namespace radis

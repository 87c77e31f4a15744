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
#include <numbers>
#include <span>
#include <vector>

#include "radis/grid.hpp"
#include "radis/target.hpp"
#include "radis/weights.hpp"

namespace radis {

// ---------------------------------------------------------------------------
// Banana-shaped benchmark density

/// Parameters of the banana kernel
///   log pi(x) = -(eta1 - B x1 - x2^2)^2 / (2 eta0^2)
///               - sum_i x_i^2 / (2 eta_i^2)
/// on [-10,10]^2. The defaults are calibrated so the grid ground truth
/// is Z = 7.9976 and mean [-0.4841, 0].
struct BananaParams {
  double b = 4.0;
  double eta0 = 1.888603233425;
  double eta1 = 3.704613112745;
  std::vector<double> eta{3.5, 3.5};
  double box_halfwidth = 10.0;
};

inline double banana_logpdf(std::span<const double> x, const BananaParams& p = {}) {
  const double ridge = p.eta1 - p.b * x[0] - x[1] * x[1];
  double acc = -ridge * ridge / (2.0 * p.eta0 * p.eta0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc -= x[i] * x[i] / (2.0 * p.eta[i] * p.eta[i]);
  }
  return acc;
}

inline TargetDensity make_banana_target(const BananaParams& p = {}) {
  const std::size_t dim = p.eta.size();
  Box box = Box::cube(dim, -p.box_halfwidth, p.box_halfwidth);
  return TargetDensity(
      [p](std::span<const double> x) { return banana_logpdf(x, p); }, dim,
      Domain::bounded(std::move(box)));
}

// ---------------------------------------------------------------------------
// 10-D three-component Gaussian mixture (normalized, Z = 1)

struct GaussianMixtureParams {
  std::size_t dim = 10;
  double component_stddev = 4.0;
};

inline std::vector<std::vector<double>> gaussian_mixture_modes(std::size_t dim) {
  std::vector<std::vector<double>> mu(3, std::vector<double>(dim, 0.0));
  mu[0][0] = 5.0;
  mu[1][0] = -7.0;
  mu[2].assign(dim, 1.0);
  return mu;
}

inline double gaussian_mixture_logpdf(std::span<const double> x,
                                      const GaussianMixtureParams& p = {}) {
  const auto modes = gaussian_mixture_modes(p.dim);
  const double var = p.component_stddev * p.component_stddev;
  const double log_norm =
      -0.5 * static_cast<double>(p.dim) * std::log(2.0 * std::numbers::pi * var) -
      std::log(3.0);
  double terms[3];
  for (std::size_t c = 0; c < 3; ++c) {
    double d2 = 0.0;
    for (std::size_t d = 0; d < p.dim; ++d) {
      const double e = x[d] - modes[c][d];
      d2 += e * e;
    }
    terms[c] = log_norm - d2 / (2.0 * var);
  }
  return log_sum_exp(terms);
}

inline TargetDensity make_gaussian_mixture_target(const GaussianMixtureParams& p = {}) {
  return TargetDensity(
      [p](std::span<const double> x) { return gaussian_mixture_logpdf(x, p); },
      p.dim, Domain::unbounded(p.dim));
}

// ---------------------------------------------------------------------------
// Grid quadrature ground truth

struct GridQuadratureResult {
  double z = 0.0;
  double log_z = 0.0;
  std::vector<double> mean;
  std::vector<double> covariance;  // row-major dim x dim
};

/// Riemann (midpoint) quadrature of an unnormalized density over its
/// bounded domain: Z, mean, and second moments, reusing one tensor
/// grid. Dense grids only make sense in low dimension.
inline GridQuadratureResult grid_quadrature(const TargetDensity& target,
                                            const Grid& grid) {
  if (!target.domain().is_bounded()) {
    throw config_error("grid_quadrature: unbounded domain");
  }
  if (target.dim() > 3) {
    throw config_error("grid_quadrature: dense grids need dim <= 3");
  }
  const std::size_t dim = target.dim();
  GridQuadratureResult out;
  out.mean.assign(dim, 0.0);
  out.covariance.assign(dim * dim, 0.0);
  double mass = 0.0;
  Point x(dim);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    const double v = std::exp(target.log_pi(x));
    mass += v;
    for (std::size_t a = 0; a < dim; ++a) {
      out.mean[a] += v * x[a];
      for (std::size_t b = 0; b < dim; ++b) {
        out.covariance[a * dim + b] += v * x[a] * x[b];
      }
    }
  }
  if (mass <= 0.0) {
    throw degenerate_weights_error("grid_quadrature: zero mass on the grid");
  }
  out.z = mass * grid.cell_volume();
  out.log_z = std::log(out.z);
  for (std::size_t a = 0; a < dim; ++a) out.mean[a] /= mass;
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) {
      out.covariance[a * dim + b] =
          out.covariance[a * dim + b] / mass - out.mean[a] * out.mean[b];
    }
  }
  return out;
}

inline GridQuadratureResult grid_quadrature(const TargetDensity& target,
                                            std::size_t points_per_dim) {
  return grid_quadrature(target,
                         Grid::uniform(target.domain().box(), points_per_dim));
}

}  // namespace radis

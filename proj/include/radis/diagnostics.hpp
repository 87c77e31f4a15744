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
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "radis/grid.hpp"
#include "radis/node_set.hpp"

namespace radis {

using GridFn = std::function<double(std::span<const double>)>;

/// Mean absolute error of scalar estimates against the truth.
inline double mae(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw std::invalid_argument("mae: empty input");
  double acc = 0.0;
  for (double e : estimates) acc += std::abs(e - truth);
  return acc / static_cast<double>(estimates.size());
}

/// Root-mean-squared error; the relative variant divides by |truth|.
inline double rmse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) throw std::invalid_argument("rmse: empty input");
  double acc = 0.0;
  for (double e : estimates) acc += (e - truth) * (e - truth);
  return std::sqrt(acc / static_cast<double>(estimates.size()));
}

inline double relative_rmse(std::span<const double> estimates, double truth) {
  if (truth == 0.0) throw std::invalid_argument("relative_rmse: truth is zero");
  return rmse(estimates, truth) / std::abs(truth);
}

/// Vector-estimate variant: RMSE of the Euclidean errors, relative to
/// the truth norm.
inline double relative_rmse_vector(std::span<const std::vector<double>> estimates,
                                   std::span<const double> truth) {
  if (estimates.empty()) throw std::invalid_argument("relative_rmse_vector: empty");
  double truth_norm2 = 0.0;
  for (double t : truth) truth_norm2 += t * t;
  if (truth_norm2 == 0.0) {
    throw std::invalid_argument("relative_rmse_vector: truth is zero");
  }
  double acc = 0.0;
  for (const auto& est : estimates) {
    for (std::size_t d = 0; d < truth.size(); ++d) {
      const double e = est[d] - truth[d];
      acc += e * e;
    }
  }
  return std::sqrt(acc / static_cast<double>(estimates.size()) / truth_norm2);
}

/// Grid L2 distance sqrt(sum (f-g)^2 dV).
inline double l2_distance_grid(const GridFn& f, const GridFn& g, const Grid& grid) {
  double acc = 0.0;
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    const double e = f(x) - g(x);
    acc += e * e;
  }
  return std::sqrt(acc * grid.cell_volume());
}

/// Grid Pearson divergence sum (p-q)^2/q dV between normalized
/// densities; infinite when q vanishes where p does not.
inline double chi2_divergence_grid(const GridFn& p_normalized,
                                   const GridFn& q_normalized, const Grid& grid) {
  double acc = 0.0;
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    const double p = p_normalized(x);
    const double q = q_normalized(x);
    if (q <= 0.0) {
      if (p > 0.0) return std::numeric_limits<double>::infinity();
      continue;
    }
    acc += (p - q) * (p - q) / q;
  }
  return acc * grid.cell_volume();
}

/// Fill distance: the largest distance from a grid point to its nearest
/// node; the quantity that controls the sup-norm emulator error.
inline double fill_distance(const NodeSet& nodes, const Grid& grid) {
  if (nodes.empty()) throw std::invalid_argument("fill_distance: empty node set");
  const KdTree& tree = nodes.index();
  double worst = 0.0;
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.point(i, x);
    worst = std::max(worst, tree.nearest(x).squared_distance);
  }
  return std::sqrt(worst);
}

/// One row of the long-format metric table the experiment runner emits.
struct MetricRow {
  std::string metric;
  std::string algorithm;
  std::string config_hash;
  std::size_t seed_count = 0;
  double value = 0.0;
  double std_error = 0.0;
};

inline void write_metric_csv_header(std::ostream& out) {
  out << "metric,algorithm,config_hash,seed_count,value,std_error\n";
}

inline void write_metric_csv_row(std::ostream& out, const MetricRow& row) {
  char buf[32];
  out << row.metric << ',' << row.algorithm << ',' << row.config_hash << ','
      << row.seed_count << ',';
  std::snprintf(buf, sizeof(buf), "%.10g", row.value);
  out << buf << ',';
  std::snprintf(buf, sizeof(buf), "%.10g", row.std_error);
  out << buf << '\n';
}

}  // namespace radis

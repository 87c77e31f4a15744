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
#include <memory>
#include <numeric>
#include <span>
#include <vector>

#include "radis/domain.hpp"
#include "radis/emulator.hpp"
#include "radis/node_set.hpp"
#include "radis/weights.hpp"

namespace radis {

/// Piecewise-constant Voronoi surrogate: the value at x is the mean of
/// pi over the k nearest nodes (k=1 is the interpolating case, exact at
/// every node). Zero outside the compact support box. Distance ties go
/// to the lowest node index.
class NnEmulator final : public Emulator {
 public:
  NnEmulator(std::shared_ptr<const NodeSet> nodes, std::size_t k, Box support)
      : nodes_(std::move(nodes)), k_(k), support_(std::move(support)) {
    if (nodes_ == nullptr || nodes_->empty()) {
      throw std::invalid_argument("NnEmulator: empty node set");
    }
    if (k_ < 1 || k_ > nodes_->size()) {
      throw std::invalid_argument("NnEmulator: k out of range");
    }
    nodes_->index();  // force the spatial index before sharing across threads
  }

  std::size_t dim() const override { return nodes_->dim(); }
  std::size_t k() const { return k_; }
  const Box& support() const { return support_; }
  const NodeSet& node_set() const { return *nodes_; }
  std::shared_ptr<const NodeSet> node_set_ptr() const { return nodes_; }

  double log_value(std::span<const double> x) const override {
    if (!support_.contains(x)) return neg_inf;
    if (k_ == 1) {
      return nodes_->log_value(nodes_->index().nearest(x).index);
    }
    const auto nn = nodes_->index().k_nearest(x, k_);
    std::vector<double> vals(nn.size());
    for (std::size_t i = 0; i < nn.size(); ++i) {
      vals[i] = nodes_->log_value(nn[i].index);
    }
    // arithmetic mean of pi over the k neighbors, in the log domain
    return log_sum_exp(vals) - std::log(static_cast<double>(vals.size()));
  }

 private:
  std::shared_ptr<const NodeSet> nodes_;
  std::size_t k_;
  Box support_;
};

inline std::shared_ptr<const NnEmulator> build_nn(
    std::shared_ptr<const NodeSet> nodes, std::size_t k, Box support) {
  return std::make_shared<const NnEmulator>(std::move(nodes), k,
                                            std::move(support));
}

/// Functional node-set growth: copy, append with dedup, return the
/// enlarged set. The result's first size() entries are exactly the
/// input's nodes, so count prefixes keep reproducing old emulators.
inline NodeSet add_nodes(const NodeSet& base, std::span<const double> points_flat,
                         std::span<const double> log_values, double dedup_tol) {
  NodeSet out = base;
  out.add_nodes(points_flat, log_values, dedup_tol);
  return out;
}

/// Minimal hyperrectangle containing all nodes, united with the previous
/// box; the support only ever grows.
inline Box expand_support(const Box& support, const NodeSet& nodes) {
  std::vector<double> lo, hi;
  nodes.bounds(lo, hi);
  return support.unite(Box(std::move(lo), std::move(hi)));
}

/// One Voronoi interval of a 1-D emulator with its normalized mass.
struct NnMixtureComponent {
  std::size_t node_index;
  double lower, upper;
  double mass;
};

/// Exact mixture-of-uniforms decomposition of a 1-D, k=1 emulator:
/// interval boundaries at midpoints between sorted nodes clipped to the
/// support, masses proportional to pi(x_i) * |R_i|. Test oracle for the
/// inner-IS resampling probabilities.
inline std::vector<NnMixtureComponent> nn_mixture_decomposition_1d(
    const NnEmulator& em) {
  if (em.dim() != 1) {
    throw std::invalid_argument("nn_mixture_decomposition_1d: 1-D only");
  }
  if (em.k() != 1) {
    throw std::invalid_argument("nn_mixture_decomposition_1d: k=1 only");
  }
  const NodeSet& nodes = em.node_set();
  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return nodes.node(a)[0] < nodes.node(b)[0];
  });
  const double lo = em.support().lower()[0];
  const double hi = em.support().upper()[0];
  std::vector<NnMixtureComponent> out(order.size());
  std::vector<double> log_mass(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double left =
        i == 0 ? lo
               : 0.5 * (nodes.node(order[i - 1])[0] + nodes.node(order[i])[0]);
    const double right =
        i + 1 == order.size()
            ? hi
            : 0.5 * (nodes.node(order[i])[0] + nodes.node(order[i + 1])[0]);
    out[i].node_index = order[i];
    out[i].lower = std::clamp(left, lo, hi);
    out[i].upper = std::clamp(right, lo, hi);
    const double width = std::max(out[i].upper - out[i].lower, 0.0);
    log_mass[i] = width > 0.0 ? nodes.log_value(order[i]) + std::log(width)
                              : neg_inf;
  }
  const auto mass = normalize_log_weights(log_mass);
  for (std::size_t i = 0; i < order.size(); ++i) out[i].mass = mass[i];
  return out;
}

}  // namespace radis

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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "radis/domain.hpp"

namespace radis {

/// Midpoint tensor grid over a box: the shared substrate for quadrature
/// ground truth and the L2 / chi-squared diagnostics.
class Grid {
 public:
  Grid(Box box, std::vector<std::size_t> points_per_dim)
      : box_(std::move(box)), counts_(std::move(points_per_dim)) {
    if (counts_.size() != box_.dim()) {
      throw std::invalid_argument("Grid: dimension mismatch");
    }
    total_ = 1;
    cell_volume_ = 1.0;
    for (std::size_t d = 0; d < counts_.size(); ++d) {
      if (counts_[d] == 0) throw std::invalid_argument("Grid: empty axis");
      total_ *= counts_[d];
      steps_.push_back((box_.upper()[d] - box_.lower()[d]) /
                       static_cast<double>(counts_[d]));
      cell_volume_ *= steps_.back();
    }
  }

  static Grid uniform(const Box& box, std::size_t points_per_dim) {
    return Grid(box, std::vector<std::size_t>(box.dim(), points_per_dim));
  }

  std::size_t size() const { return total_; }
  std::size_t dim() const { return box_.dim(); }
  double cell_volume() const { return cell_volume_; }
  const Box& box() const { return box_; }

  /// Midpoint of cell i (row-major over dimensions).
  void point(std::size_t i, std::span<double> out) const {
    for (std::size_t d = box_.dim(); d-- > 0;) {
      const std::size_t k = i % counts_[d];
      i /= counts_[d];
      out[d] = box_.lower()[d] + (static_cast<double>(k) + 0.5) * steps_[d];
    }
  }

  Point point(std::size_t i) const {
    Point x(dim());
    point(i, x);
    return x;
  }

  void for_each(const std::function<void(std::size_t, std::span<const double>)>& fn) const {
    Point x(dim());
    for (std::size_t i = 0; i < total_; ++i) {
      point(i, x);
      fn(i, x);
    }
  }

 private:
  Box box_;
  std::vector<std::size_t> counts_;
  std::vector<double> steps_;
  std::size_t total_ = 0;
  double cell_volume_ = 1.0;
};

}  // namespace radis

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
#include <span>
#include <stdexcept>
#include <vector>

namespace radis {

using Point = std::vector<double>;

/// Axis-aligned hyperrectangle. Serves both as a bounded target domain
/// and as the compact support of the nearest-neighbor emulator.
class Box {
 public:
  Box() = default;
  Box(std::vector<double> lower, std::vector<double> upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size() || lower_.empty()) {
      throw std::invalid_argument("Box: bound size mismatch");
    }
    for (std::size_t d = 0; d < lower_.size(); ++d) {
      if (!(lower_[d] <= upper_[d])) {
        throw std::invalid_argument("Box: lower bound above upper bound");
      }
    }
  }

  static Box cube(std::size_t dim, double lo, double hi) {
    return Box(std::vector<double>(dim, lo), std::vector<double>(dim, hi));
  }

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }

  bool contains(std::span<const double> x) const {
    for (std::size_t d = 0; d < lower_.size(); ++d) {
      if (x[d] < lower_[d] || x[d] > upper_[d]) return false;
    }
    return true;
  }

  double volume() const {
    double v = 1.0;
    for (std::size_t d = 0; d < lower_.size(); ++d) v *= upper_[d] - lower_[d];
    return v;
  }

  double log_volume() const {
    double lv = 0.0;
    for (std::size_t d = 0; d < lower_.size(); ++d) {
      lv += std::log(upper_[d] - lower_[d]);
    }
    return lv;
  }

  double diagonal() const {
    double acc = 0.0;
    for (std::size_t d = 0; d < lower_.size(); ++d) {
      const double e = upper_[d] - lower_[d];
      acc += e * e;
    }
    return std::sqrt(acc);
  }

  /// Smallest box containing both this box and `other`.
  Box unite(const Box& other) const {
    Box out = *this;
    for (std::size_t d = 0; d < lower_.size(); ++d) {
      out.lower_[d] = std::min(out.lower_[d], other.lower_[d]);
      out.upper_[d] = std::max(out.upper_[d], other.upper_[d]);
    }
    return out;
  }

  void clip(std::span<double> x) const {
    for (std::size_t d = 0; d < lower_.size(); ++d) {
      x[d] = std::clamp(x[d], lower_[d], upper_[d]);
    }
  }

  bool operator==(const Box& other) const {
    return lower_ == other.lower_ && upper_ == other.upper_;
  }

 private:
  std::vector<double> lower_, upper_;
};

/// Target domain: a bounded hyperrectangle or all of R^d.
class Domain {
 public:
  static Domain bounded(Box box) { return Domain(std::move(box), true); }
  static Domain unbounded(std::size_t dim) {
    return Domain(Box::cube(dim, 0.0, 0.0), false);
  }

  bool is_bounded() const { return bounded_; }
  std::size_t dim() const { return box_.dim(); }

  const Box& box() const {
    if (!bounded_) throw std::logic_error("Domain: unbounded domain has no box");
    return box_;
  }

  bool contains(std::span<const double> x) const {
    return !bounded_ || box_.contains(x);
  }

 private:
  Domain(Box box, bool bounded) : box_(std::move(box)), bounded_(bounded) {}
  Box box_;
  bool bounded_;
};

}  // namespace radis

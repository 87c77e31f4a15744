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
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "radis/kdtree.hpp"

namespace radis {

/// The growing support set: points where the target has been evaluated,
/// with their stored log pi values and a nearest-neighbor index. Nodes
/// are append-only and pairwise distinct under the dedup tolerance, so a
/// count prefix always reproduces an earlier state of the set.
class NodeSet {
 public:
  explicit NodeSet(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return log_values_.size(); }
  bool empty() const { return log_values_.empty(); }

  std::span<const double> node(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double log_value(std::size_t i) const { return log_values_[i]; }
  std::span<const double> coords_flat() const { return coords_; }
  std::span<const double> log_values() const { return log_values_; }

  const KdTree& index() const {
    if (!index_valid_) {
      index_ = KdTree(coords_, dim_);
      index_valid_ = true;
    }
    return index_;
  }

  /// Appends points with their log pi values, dropping any candidate
  /// within `dedup_tol` (Euclidean) of an existing or just-accepted
  /// node. Returns how many were kept.
  std::size_t add_nodes(std::span<const double> points_flat,
                        std::span<const double> log_values, double dedup_tol) {
    if (points_flat.size() != log_values.size() * dim_) {
      throw std::invalid_argument("NodeSet::add_nodes: size mismatch");
    }
    const double tol2 = dedup_tol * dedup_tol;
    const std::size_t before = size();
    const KdTree* base = empty() ? nullptr : &index();
    for (std::size_t n = 0; n < log_values.size(); ++n) {
      std::span<const double> x{points_flat.data() + n * dim_, dim_};
      bool duplicate = false;
      if (base != nullptr && base->nearest(x).squared_distance <= tol2) {
        duplicate = true;
      }
      // also check against nodes accepted within this batch
      for (std::size_t j = before; !duplicate && j < size(); ++j) {
        if (squared_distance(node(j), x) <= tol2) duplicate = true;
      }
      if (!duplicate) {
        coords_.insert(coords_.end(), x.begin(), x.end());
        log_values_.push_back(log_values[n]);
      }
    }
    if (size() != before) index_valid_ = false;
    return size() - before;
  }

  /// Coordinate-wise min/max over the nodes.
  void bounds(std::vector<double>& lower, std::vector<double>& upper) const {
    if (empty()) throw std::logic_error("NodeSet::bounds: empty set");
    lower.assign(node(0).begin(), node(0).end());
    upper = lower;
    for (std::size_t i = 1; i < size(); ++i) {
      const auto x = node(i);
      for (std::size_t d = 0; d < dim_; ++d) {
        lower[d] = std::min(lower[d], x[d]);
        upper[d] = std::max(upper[d], x[d]);
      }
    }
  }

  /// CSV with header x_1,...,x_d,log_pi; %.17g round-trips exactly.
  void write_csv(std::ostream& out) const {
    for (std::size_t d = 1; d <= dim_; ++d) {
      out << "x_" << d << ',';
    }
    out << "log_pi\n";
    char buf[32];
    for (std::size_t i = 0; i < size(); ++i) {
      const auto x = node(i);
      for (std::size_t d = 0; d < dim_; ++d) {
        std::snprintf(buf, sizeof(buf), "%.17g", x[d]);
        out << buf << ',';
      }
      std::snprintf(buf, sizeof(buf), "%.17g", log_values_[i]);
      out << buf << '\n';
    }
  }

  static NodeSet read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
      throw std::runtime_error("NodeSet::read_csv: empty input");
    }
    std::size_t dim = 0;
    for (char c : line) {
      if (c == ',') ++dim;
    }
    if (dim == 0) throw std::runtime_error("NodeSet::read_csv: bad header");
    NodeSet set(dim);
    std::size_t row = 1;
    while (std::getline(in, line)) {
      ++row;
      if (line.empty()) continue;
      std::stringstream ss(line);
      std::string cell;
      std::vector<double> values;
      while (std::getline(ss, cell, ',')) values.push_back(parse(cell, row));
      if (values.size() != dim + 1) {
        throw std::runtime_error("NodeSet::read_csv: wrong column count at row " +
                                 std::to_string(row));
      }
      set.coords_.insert(set.coords_.end(), values.begin(), values.end() - 1);
      set.log_values_.push_back(values.back());
    }
    return set;
  }

 private:
  static double parse(const std::string& cell, std::size_t row) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(cell, &pos);
      if (pos != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("NodeSet::read_csv: bad number at row " +
                               std::to_string(row));
    }
  }

  static double squared_distance(std::span<const double> a,
                                 std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
      const double e = a[d] - b[d];
      acc += e * e;
    }
    return acc;
  }

  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<double> log_values_;
  mutable KdTree index_;
  mutable bool index_valid_ = false;
};

}  // namespace radis

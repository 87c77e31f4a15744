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
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace radis {

/// Static k-d tree over a flat point array, rebuilt in batch whenever the
/// node set grows. Queries break distance ties toward the lowest point
/// index, which keeps piecewise-constant emulators deterministic on cell
/// boundaries. Above `kMaxTreeDim` the structure degrades to a linear
/// scan; median splits buy little there and the node counts stay small.
class KdTree {
 public:
  static constexpr std::size_t kMaxTreeDim = 20;

  KdTree() = default;

  KdTree(std::span<const double> points_flat, std::size_t dim) : dim_(dim) {
    if (dim_ == 0 || points_flat.size() % dim_ != 0) {
      throw std::invalid_argument("KdTree: bad point array");
    }
    points_.assign(points_flat.begin(), points_flat.end());
    count_ = points_.size() / dim_;
    order_.resize(count_);
    for (std::size_t i = 0; i < count_; ++i) order_[i] = i;
    if (count_ > 0 && dim_ <= kMaxTreeDim) {
      nodes_.reserve(count_);
      root_ = build(0, count_, 0);
    }
  }

  std::size_t size() const { return count_; }
  std::size_t dim() const { return dim_; }

  struct Neighbor {
    std::size_t index;
    double squared_distance;
  };

  /// Nearest point; ties by lowest index.
  Neighbor nearest(std::span<const double> query) const {
    if (count_ == 0) throw std::logic_error("KdTree: empty tree");
    Neighbor best{count_, std::numeric_limits<double>::infinity()};
    if (root_ == kNull) {
      for (std::size_t i = 0; i < count_; ++i) consider(query, i, best);
    } else {
      search1(root_, query, best);
    }
    return best;
  }

  /// k nearest points, ordered by (distance, index) ascending.
  std::vector<Neighbor> k_nearest(std::span<const double> query,
                                  std::size_t k) const {
    if (count_ == 0) throw std::logic_error("KdTree: empty tree");
    k = std::min(k, count_);
    std::vector<Neighbor> heap;  // max-heap on (distance, index)
    heap.reserve(k + 1);
    if (root_ == kNull) {
      for (std::size_t i = 0; i < count_; ++i) considerK(query, i, k, heap);
    } else {
      searchK(root_, query, k, heap);
    }
    std::sort(heap.begin(), heap.end(), neighborCloser);
    return heap;
  }

 private:
  static constexpr std::uint32_t kNull = 0xFFFFFFFFu;

  struct Node {
    std::uint32_t left = kNull, right = kNull;
    std::uint32_t point = 0;
    std::uint32_t axis = 0;
    double split = 0.0;
  };

  const double* at(std::size_t i) const { return points_.data() + i * dim_; }

  static bool neighborCloser(const Neighbor& a, const Neighbor& b) {
    if (a.squared_distance != b.squared_distance) {
      return a.squared_distance < b.squared_distance;
    }
    return a.index < b.index;
  }

  double sqdist(std::span<const double> q, std::size_t i) const {
    const double* p = at(i);
    double acc = 0.0;
    for (std::size_t d = 0; d < dim_; ++d) {
      const double e = q[d] - p[d];
      acc += e * e;
    }
    return acc;
  }

  void consider(std::span<const double> q, std::size_t i, Neighbor& best) const {
    const double d2 = sqdist(q, i);
    if (d2 < best.squared_distance ||
        (d2 == best.squared_distance && i < best.index)) {
      best = {i, d2};
    }
  }

  void considerK(std::span<const double> q, std::size_t i, std::size_t k,
                 std::vector<Neighbor>& heap) const {
    const Neighbor cand{i, sqdist(q, i)};
    if (heap.size() < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end(), neighborCloser);
    } else if (neighborCloser(cand, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), neighborCloser);
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end(), neighborCloser);
    }
  }

  std::uint32_t build(std::size_t lo, std::size_t hi, std::size_t depth) {
    if (lo >= hi) return kNull;
    const std::size_t axis = depth % dim_;
    const std::size_t mid = lo + (hi - lo) / 2;
    // (coordinate, index) ordering keeps the structure deterministic
    std::nth_element(order_.begin() + lo, order_.begin() + mid,
                     order_.begin() + hi, [&](std::size_t a, std::size_t b) {
                       const double ca = at(a)[axis], cb = at(b)[axis];
                       return ca != cb ? ca < cb : a < b;
                     });
    Node node;
    node.point = static_cast<std::uint32_t>(order_[mid]);
    node.axis = static_cast<std::uint32_t>(axis);
    node.split = at(order_[mid])[axis];
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(node);
    const std::uint32_t left = build(lo, mid, depth + 1);
    const std::uint32_t right = build(mid + 1, hi, depth + 1);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  void search1(std::uint32_t id, std::span<const double> q, Neighbor& best) const {
    const Node& node = nodes_[id];
    consider(q, node.point, best);
    const double delta = q[node.axis] - node.split;
    const std::uint32_t near = delta < 0.0 ? node.left : node.right;
    const std::uint32_t far = delta < 0.0 ? node.right : node.left;
    if (near != kNull) search1(near, q, best);
    // <= keeps equidistant points on the far side reachable for tie-breaks
    if (far != kNull && delta * delta <= best.squared_distance) {
      search1(far, q, best);
    }
  }

  void searchK(std::uint32_t id, std::span<const double> q, std::size_t k,
               std::vector<Neighbor>& heap) const {
    const Node& node = nodes_[id];
    considerK(q, node.point, k, heap);
    const double delta = q[node.axis] - node.split;
    const std::uint32_t near = delta < 0.0 ? node.left : node.right;
    const std::uint32_t far = delta < 0.0 ? node.right : node.left;
    if (near != kNull) searchK(near, q, k, heap);
    if (far != kNull &&
        (heap.size() < k || delta * delta <= heap.front().squared_distance)) {
      searchK(far, q, k, heap);
    }
  }

  std::size_t dim_ = 0;
  std::size_t count_ = 0;
  std::vector<double> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::uint32_t root_ = kNull;
};

}  // namespace radis

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

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <utility>

#include "radis/domain.hpp"
#include "radis/weights.hpp"

namespace radis {

/// Unnormalized log-target log pi(x) with domain metadata and a
/// synchronized evaluation ledger. Every sampler in this library draws
/// its budget from here: one log_pi() call is one evaluation, including
/// calls outside a bounded domain (which return -inf without touching
/// the wrapped function).
class TargetDensity {
 public:
  using LogDensityFn = std::function<double(std::span<const double>)>;

  TargetDensity(LogDensityFn log_pi, std::size_t dim, Domain domain)
      : log_pi_(std::move(log_pi)),
        dim_(dim),
        domain_(std::move(domain)),
        evals_(std::make_shared<std::atomic<std::uint64_t>>(0)) {}

  std::size_t dim() const { return dim_; }
  const Domain& domain() const { return domain_; }

  double log_pi(std::span<const double> x) const {
    evals_->fetch_add(1, std::memory_order_relaxed);
    if (!domain_.contains(x)) return neg_inf;
    return log_pi_(x);
  }

  std::uint64_t evaluations() const {
    return evals_->load(std::memory_order_relaxed);
  }

 private:
  LogDensityFn log_pi_;
  std::size_t dim_;
  Domain domain_;
  // shared_ptr so copies of the handle keep charging the same ledger
  std::shared_ptr<std::atomic<std::uint64_t>> evals_;
};

}  // namespace radis

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
#include <memory>
#include <span>

namespace radis {

/// A cheap evaluatable surrogate of the unnormalized target. Immutable
/// after construction; evaluation is safe from many threads.
class Emulator {
 public:
  virtual ~Emulator() = default;
  virtual std::size_t dim() const = 0;
  /// log of the surrogate value; -inf where the surrogate is zero.
  virtual double log_value(std::span<const double> x) const = 0;

  double value(std::span<const double> x) const {
    return std::exp(log_value(x));
  }
};

using EmulatorPtr = std::shared_ptr<const Emulator>;

}  // namespace radis

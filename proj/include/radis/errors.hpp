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

#include <stdexcept>
#include <string>

namespace radis {

/// All weights are zero (or -inf in log domain): the proposal and the
/// target share no effective support.
class degenerate_weights_error : public std::runtime_error {
 public:
  explicit degenerate_weights_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// A sample landed where the proposal density is zero.
class support_violation_error : public std::runtime_error {
 public:
  explicit support_violation_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// Kernel matrix could not be factorized even after jitter escalation.
class ill_conditioned_kernel_error : public std::runtime_error {
 public:
  explicit ill_conditioned_kernel_error(const std::string& what)
      : std::runtime_error(what) {}
};

/// Invalid sampler or experiment configuration.
class config_error : public std::invalid_argument {
 public:
  explicit config_error(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace radis

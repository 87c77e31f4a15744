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

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "radis/emulator.hpp"
#include "radis/errors.hpp"
#include "radis/node_set.hpp"
#include "radis/weights.hpp"

namespace radis {

/// Squared-exponential kernel k(x,x') = exp(-||x-x'||^2 / (2 eps^2)),
/// plus the regression noise level zeta on the Gram diagonal.
struct GpKernel {
  double lengthscale = 1.0;
  double noise = 1e-6;

  double operator()(std::span<const double> a, std::span<const double> b) const {
    double acc = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
      const double e = a[d] - b[d];
      acc += e * e;
    }
    return std::exp(-acc / (2.0 * lengthscale * lengthscale));
  }
};

/// Gaussian-process surrogate fitted to log pi over the node set and
/// exponentiated on evaluation. Zero-mean prior, so the prediction
/// reverts to log-value 0 (surrogate value 1) far from every node; on
/// unbounded domains the sampler must mix in a parametric tail for this
/// reason.
class GpEmulator final : public Emulator {
 public:
  std::size_t dim() const override { return nodes_->dim(); }
  const GpKernel& kernel() const { return kernel_; }
  std::span<const double> beta() const { return beta_; }
  const NodeSet& node_set() const { return *nodes_; }
  double jitter() const { return jitter_; }

  /// phi_hat(x) = sum_i beta_i k(x, x_i); the log of the surrogate.
  double log_value(std::span<const double> x) const override {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_->size(); ++i) {
      acc += beta_[i] * kernel_(x, nodes_->node(i));
    }
    return acc;
  }

  /// -1/2 phi' beta - 1/2 log det(K + zeta I) - J/2 log(2 pi), from the
  /// retained Cholesky factor.
  double log_marginal_likelihood() const {
    const auto n = static_cast<Eigen::Index>(nodes_->size());
    double quad = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      quad += nodes_->log_value(static_cast<std::size_t>(i)) * beta_[i];
    }
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) logdet += 2.0 * std::log(chol_(i, i));
    return -0.5 * quad - 0.5 * logdet -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  }

  friend std::shared_ptr<const GpEmulator> fit_gp(
      std::shared_ptr<const NodeSet> nodes, const GpKernel& kernel);

 private:
  GpEmulator() = default;

  std::shared_ptr<const NodeSet> nodes_;
  GpKernel kernel_;
  std::vector<double> beta_;
  Eigen::MatrixXd chol_;
  double jitter_ = 0.0;
};

/// Solves (K + zeta I) beta = phi by Cholesky, escalating a diagonal
/// jitter from 1e-10 up to 1e-6 * trace/J when the factorization fails.
inline std::shared_ptr<const GpEmulator> fit_gp(
    std::shared_ptr<const NodeSet> nodes, const GpKernel& kernel) {
  if (nodes == nullptr || nodes->empty()) {
    throw std::invalid_argument("fit_gp: empty node set");
  }
  const auto n = static_cast<Eigen::Index>(nodes->size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    gram(i, i) = 1.0 + kernel.noise;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double k = kernel(nodes->node(static_cast<std::size_t>(i)),
                              nodes->node(static_cast<std::size_t>(j)));
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }
  Eigen::VectorXd phi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    phi(i) = nodes->log_value(static_cast<std::size_t>(i));
    if (!std::isfinite(phi(i))) {
      throw std::invalid_argument("fit_gp: non-finite log value at a node");
    }
  }
  const double trace = gram.trace();
  const double max_jitter = 1e-6 * trace / static_cast<double>(n);
  double jitter = 0.0;
  for (;;) {
    Eigen::LLT<Eigen::MatrixXd> llt(
        jitter == 0.0
            ? gram
            : Eigen::MatrixXd(gram + jitter * Eigen::MatrixXd::Identity(n, n)));
    if (llt.info() == Eigen::Success) {
      auto em = std::shared_ptr<GpEmulator>(new GpEmulator());
      em->nodes_ = std::move(nodes);
      em->kernel_ = kernel;
      em->chol_ = llt.matrixL();
      Eigen::VectorXd beta = llt.solve(phi);
      em->beta_.assign(beta.data(), beta.data() + n);
      em->jitter_ = jitter;
      return em;
    }
    if (jitter >= max_jitter) {
      throw ill_conditioned_kernel_error(
          "fit_gp: factorization failed at maximum jitter");
    }
    jitter = jitter == 0.0 ? 1e-10 : std::min(jitter * 10.0, max_jitter);
  }
}

/// Grid search for the lengthscale maximizing the GP marginal
/// likelihood; ties resolve to the smaller candidate. Candidates whose
/// kernel cannot be factorized are skipped.
inline double tune_lengthscale(std::shared_ptr<const NodeSet> nodes, double noise,
                               std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("tune_lengthscale: empty grid");
  if (nodes == nullptr || nodes->size() < 2) {
    throw std::invalid_argument("tune_lengthscale: need at least 2 nodes");
  }
  std::optional<double> best_eps;
  double best_ll = neg_inf;
  for (double eps : grid) {
    try {
      const auto em = fit_gp(nodes, GpKernel{eps, noise});
      const double ll = em->log_marginal_likelihood();
      if (!best_eps || ll > best_ll || (ll == best_ll && eps < *best_eps)) {
        best_eps = eps;
        best_ll = ll;
      }
    } catch (const ill_conditioned_kernel_error&) {
      continue;
    }
  }
  if (!best_eps) {
    throw ill_conditioned_kernel_error(
        "tune_lengthscale: every candidate ill-conditioned");
  }
  return *best_eps;
}

/// Greedy farthest-point subset of size at most `max_count`, seeded at
/// the node with the largest stored value. Used to cap the O(J^3) GP
/// refit cost; returns indices in selection order.
inline std::vector<std::size_t> farthest_point_subset(const NodeSet& nodes,
                                                      std::size_t max_count) {
  const std::size_t n = nodes.size();
  if (max_count >= n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return all;
  }
  std::size_t seed = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (nodes.log_value(i) > nodes.log_value(seed)) seed = i;
  }
  std::vector<std::size_t> chosen{seed};
  std::vector<double> dist2(n, std::numeric_limits<double>::infinity());
  for (std::size_t round = 1; round < max_count; ++round) {
    const auto last = nodes.node(chosen.back());
    std::size_t far = 0;
    double far_d2 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      const auto x = nodes.node(i);
      for (std::size_t d = 0; d < x.size(); ++d) {
        const double e = x[d] - last[d];
        acc += e * e;
      }
      dist2[i] = std::min(dist2[i], acc);
      if (dist2[i] > far_d2) {
        far_d2 = dist2[i];
        far = i;
      }
    }
    chosen.push_back(far);
  }
  return chosen;
}

}  // namespace radis

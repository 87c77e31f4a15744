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
#include <memory>
#include <numbers>
#include <span>
#include <vector>

#include "radis/domain.hpp"
#include "radis/errors.hpp"
#include "radis/rng.hpp"
#include "radis/weights.hpp"

namespace radis {

/// A normalized density that can be sampled and evaluated in the log
/// domain. Immutable once built; safe to share across threads.
class Density {
 public:
  virtual ~Density() = default;
  virtual std::size_t dim() const = 0;
  virtual double log_density(std::span<const double> x) const = 0;
  virtual void sample(Rng& rng, std::span<double> out) const = 0;

  Point draw(Rng& rng) const {
    Point x(dim());
    sample(rng, x);
    return x;
  }
};

using DensityPtr = std::shared_ptr<const Density>;

class UniformBoxDensity final : public Density {
 public:
  explicit UniformBoxDensity(Box box)
      : box_(std::move(box)), log_density_(-box_.log_volume()) {
    if (!(box_.volume() > 0.0)) {
      throw config_error("UniformBoxDensity: box has zero volume");
    }
  }

  const Box& box() const { return box_; }
  std::size_t dim() const override { return box_.dim(); }

  double log_density(std::span<const double> x) const override {
    return box_.contains(x) ? log_density_ : neg_inf;
  }

  void sample(Rng& rng, std::span<double> out) const override {
    for (std::size_t d = 0; d < box_.dim(); ++d) {
      out[d] = rng.uniform(box_.lower()[d], box_.upper()[d]);
    }
  }

 private:
  Box box_;
  double log_density_;
};

/// Multivariate Gaussian with full covariance (Cholesky-parameterized).
class GaussianDensity final : public Density {
 public:
  GaussianDensity(std::vector<double> mean, const Eigen::MatrixXd& covariance)
      : mean_(std::move(mean)) {
    const auto n = static_cast<Eigen::Index>(mean_.size());
    if (covariance.rows() != n || covariance.cols() != n) {
      throw config_error("GaussianDensity: covariance size mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
      throw config_error("GaussianDensity: covariance not positive definite");
    }
    chol_ = llt.matrixL();
    log_norm_ = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < n; ++i) log_norm_ -= std::log(chol_(i, i));
  }

  /// Isotropic or diagonal shorthand.
  static GaussianDensity diagonal(std::vector<double> mean,
                                  const std::vector<double>& variances) {
    const auto n = static_cast<Eigen::Index>(mean.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) cov(i, i) = variances[i];
    return GaussianDensity(std::move(mean), cov);
  }

  static GaussianDensity isotropic(std::vector<double> mean, double variance) {
    const std::size_t n = mean.size();
    return diagonal(std::move(mean), std::vector<double>(n, variance));
  }

  std::size_t dim() const override { return mean_.size(); }
  const std::vector<double>& mean() const { return mean_; }

  double log_density(std::span<const double> x) const override {
    const auto n = static_cast<Eigen::Index>(mean_.size());
    Eigen::VectorXd diff(n);
    for (Eigen::Index i = 0; i < n; ++i) diff(i) = x[i] - mean_[i];
    chol_.triangularView<Eigen::Lower>().solveInPlace(diff);
    return log_norm_ - 0.5 * diff.squaredNorm();
  }

  void sample(Rng& rng, std::span<double> out) const override {
    const auto n = static_cast<Eigen::Index>(mean_.size());
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
    const Eigen::VectorXd x = chol_ * z;
    for (Eigen::Index i = 0; i < n; ++i) out[i] = mean_[i] + x(i);
  }

 private:
  std::vector<double> mean_;
  Eigen::MatrixXd chol_;
  double log_norm_ = 0.0;
};

/// Product of independent univariate Student-t components with
/// per-dimension location and scale.
class StudentTDensity final : public Density {
 public:
  StudentTDensity(std::vector<double> location, std::vector<double> scale,
                  double dof)
      : location_(std::move(location)), scale_(std::move(scale)), dof_(dof) {
    if (location_.size() != scale_.size() || dof_ <= 0.0) {
      throw config_error("StudentTDensity: bad parameters");
    }
    // log of the 1-D t normalizing constant
    log_norm_1d_ = std::lgamma(0.5 * (dof_ + 1.0)) - std::lgamma(0.5 * dof_) -
                   0.5 * std::log(dof_ * std::numbers::pi);
  }

  std::size_t dim() const override { return location_.size(); }

  double log_density(std::span<const double> x) const override {
    double acc = 0.0;
    for (std::size_t d = 0; d < location_.size(); ++d) {
      const double z = (x[d] - location_[d]) / scale_[d];
      acc += log_norm_1d_ - std::log(scale_[d]) -
             0.5 * (dof_ + 1.0) * std::log1p(z * z / dof_);
    }
    return acc;
  }

  void sample(Rng& rng, std::span<double> out) const override {
    for (std::size_t d = 0; d < location_.size(); ++d) {
      out[d] = location_[d] + scale_[d] * rng.student_t(dof_);
    }
  }

 private:
  std::vector<double> location_, scale_;
  double dof_;
  double log_norm_1d_;
};

/// Equally-weighted mixture of isotropic Gaussians sharing one scale,
/// stored flat. This is the shape of a LAIS/PMC proposal bank, where the
/// mixture is evaluated at every inner sample; the flat layout keeps
/// that loop allocation-free.
class IsotropicGaussianMixture final : public Density {
 public:
  IsotropicGaussianMixture(std::vector<double> means_flat, std::size_t dim,
                           double stddev)
      : means_(std::move(means_flat)), dim_(dim), stddev_(stddev) {
    if (dim_ == 0 || means_.empty() || means_.size() % dim_ != 0 ||
        !(stddev_ > 0.0)) {
      throw config_error("IsotropicGaussianMixture: bad parameters");
    }
    count_ = means_.size() / dim_;
    log_norm_ = -0.5 * static_cast<double>(dim_) *
                    std::log(2.0 * std::numbers::pi * stddev_ * stddev_) -
                std::log(static_cast<double>(count_));
  }

  std::size_t dim() const override { return dim_; }
  std::size_t component_count() const { return count_; }
  std::span<const double> component_mean(std::size_t c) const {
    return {means_.data() + c * dim_, dim_};
  }

  double log_density(std::span<const double> x) const override {
    const double inv2s2 = 1.0 / (2.0 * stddev_ * stddev_);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> d2(count_);
    for (std::size_t c = 0; c < count_; ++c) {
      const double* mu = means_.data() + c * dim_;
      double acc = 0.0;
      for (std::size_t d = 0; d < dim_; ++d) {
        const double e = x[d] - mu[d];
        acc += e * e;
      }
      d2[c] = acc;
      best = std::min(best, acc);
    }
    double sum = 0.0;
    for (double v : d2) sum += std::exp((best - v) * inv2s2);
    return log_norm_ - best * inv2s2 + std::log(sum);
  }

  void sample(Rng& rng, std::span<double> out) const override {
    const std::size_t c = rng.uniform_index(count_);
    const double* mu = means_.data() + c * dim_;
    for (std::size_t d = 0; d < dim_; ++d) out[d] = mu[d] + stddev_ * rng.normal();
  }

 private:
  std::vector<double> means_;
  std::size_t dim_;
  double stddev_;
  std::size_t count_ = 0;
  double log_norm_ = 0.0;
};

/// Finite mixture of densities with arbitrary non-negative weights.
class MixtureDensity final : public Density {
 public:
  MixtureDensity(std::vector<double> weights, std::vector<DensityPtr> components)
      : log_weights_(weights.size()), components_(std::move(components)) {
    if (components_.empty() || weights.size() != components_.size()) {
      throw config_error("MixtureDensity: empty or mismatched components");
    }
    const auto wbar = normalize_weights(weights);
    for (std::size_t c = 0; c < wbar.size(); ++c) {
      log_weights_[c] = std::log(wbar[c]);
      cumulative_.push_back((c == 0 ? 0.0 : cumulative_.back()) + wbar[c]);
    }
  }

  static MixtureDensity equally_weighted(std::vector<DensityPtr> components) {
    return MixtureDensity(std::vector<double>(components.size(), 1.0),
                          std::move(components));
  }

  std::size_t dim() const override { return components_.front()->dim(); }
  std::size_t component_count() const { return components_.size(); }

  double log_density(std::span<const double> x) const override {
    std::vector<double> terms(components_.size());
    double m = neg_inf;
    for (std::size_t c = 0; c < components_.size(); ++c) {
      terms[c] = log_weights_[c] + components_[c]->log_density(x);
      m = std::max(m, terms[c]);
    }
    if (m == neg_inf) return neg_inf;
    double acc = 0.0;
    for (double v : terms) acc += std::exp(v - m);
    return m + std::log(acc);
  }

  void sample(Rng& rng, std::span<double> out) const override {
    const double u = rng.uniform01();
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    const std::size_t c = std::min<std::size_t>(
        static_cast<std::size_t>(it - cumulative_.begin()),
        components_.size() - 1);
    components_[c]->sample(rng, out);
  }

 private:
  std::vector<double> log_weights_;
  std::vector<double> cumulative_;
  std::vector<DensityPtr> components_;
};

}  // namespace radis

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
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "radis/domain.hpp"
#include "radis/driver.hpp"
#include "radis/errors.hpp"
#include "radis/rng.hpp"
#include "radis/target.hpp"

namespace radis {

/// Deterministic nonlinear map h: R^dx -> R^dy with a cost ledger; the
/// expensive part of an inversion problem.
class ForwardModel {
 public:
  ForwardModel() = default;
  ForwardModel(const ForwardModel& other) : evals_(other.evals_.load()) {}
  ForwardModel& operator=(const ForwardModel& other) {
    evals_.store(other.evals_.load());
    return *this;
  }
  virtual ~ForwardModel() = default;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual const Box& prior_box() const = 0;

  void evaluate(std::span<const double> x, std::span<double> y) const {
    evals_.fetch_add(1, std::memory_order_relaxed);
    evaluate_impl(x, y);
  }

  std::uint64_t evaluations() const {
    return evals_.load(std::memory_order_relaxed);
  }

 protected:
  virtual void evaluate_impl(std::span<const double> x, std::span<double> y) const = 0;

 private:
  mutable std::atomic<std::uint64_t> evals_{0};
};

/// Fixed synthetic stand-in for an expensive radiative-transfer-style
/// model: y_j = sum_i a_ji sin(b_ji xt_i + c_ji) + sum_i d_ji xt_i^2
/// with xt the box-normalized input. The constants live in a committed
/// CSV; per-dimension coefficient scales make two of the six input
/// components nearly unidentifiable, which is the regime the sequential
/// harness is exercised on.
class SyntheticModel final : public ForwardModel {
 public:
  std::size_t input_dim() const override { return box_.dim(); }
  std::size_t output_dim() const override { return dy_; }
  const Box& prior_box() const override { return box_; }

  static SyntheticModel from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("SyntheticModel: cannot open " + path);
    return from_stream(in);
  }

  static SyntheticModel from_stream(std::istream& in) {
    SyntheticModel m;
    std::string line;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> kinds;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::stringstream ss(line);
      std::string kind, cell;
      std::getline(ss, kind, ',');
      std::vector<double> row;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      kinds.push_back(kind);
      rows.push_back(std::move(row));
    }
    std::vector<double> lower, upper;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (kinds[i] == "lower") lower = rows[i];
      else if (kinds[i] == "upper") upper = rows[i];
      else if (kinds[i] == "a") m.a_.push_back(rows[i]);
      else if (kinds[i] == "b") m.b_.push_back(rows[i]);
      else if (kinds[i] == "c") m.c_.push_back(rows[i]);
      else if (kinds[i] == "d") m.d_.push_back(rows[i]);
      else throw std::runtime_error("SyntheticModel: unknown row kind " + kinds[i]);
    }
    if (lower.empty() || m.a_.empty() || m.a_.size() != m.b_.size() ||
        m.a_.size() != m.c_.size() || m.a_.size() != m.d_.size()) {
      throw std::runtime_error("SyntheticModel: malformed constants file");
    }
    m.box_ = Box(std::move(lower), std::move(upper));
    m.dy_ = m.a_.size();
    return m;
  }

  /// The generator that produced the committed constants (seed 20240611,
  /// dy = 64). Components 2 and 4 (0-based 1 and 3) get coefficient
  /// scale 0.05, giving them small average partial derivatives.
  static SyntheticModel generate(std::uint64_t seed = 20240611, std::size_t dy = 64) {
    SyntheticModel m;
    m.box_ = Box({0.0, 0.0, 0.0, 0.0, 0.0, 0.0}, {2.0, 10.0, 5.0, 1.0, 0.5, 0.2});
    m.dy_ = dy;
    const std::size_t dx = m.box_.dim();
    Rng rng(seed);
    const auto scale = [](std::size_t i) { return (i == 1 || i == 3) ? 0.05 : 1.0; };
    for (std::size_t j = 0; j < dy; ++j) {
      std::vector<double> a(dx), b(dx), c(dx), d(dx);
      for (std::size_t i = 0; i < dx; ++i) {
        a[i] = rng.uniform(-1.0, 1.0) * scale(i);
        b[i] = rng.uniform(0.5, 2.5);
        c[i] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        d[i] = rng.uniform(-0.5, 0.5) * scale(i);
      }
      m.a_.push_back(std::move(a));
      m.b_.push_back(std::move(b));
      m.c_.push_back(std::move(c));
      m.d_.push_back(std::move(d));
    }
    return m;
  }

  void write_csv(std::ostream& out) const {
    char buf[32];
    const auto row = [&](const char* kind, std::span<const double> v) {
      out << kind;
      for (double x : v) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        out << ',' << buf;
      }
      out << '\n';
    };
    row("lower", box_.lower());
    row("upper", box_.upper());
    for (const auto& r : a_) row("a", r);
    for (const auto& r : b_) row("b", r);
    for (const auto& r : c_) row("c", r);
    for (const auto& r : d_) row("d", r);
  }

 protected:
  void evaluate_impl(std::span<const double> x, std::span<double> y) const override {
    if (!box_.contains(x)) {
      throw std::invalid_argument("SyntheticModel: input outside the prior box");
    }
    const std::size_t dx = box_.dim();
    std::vector<double> xt(dx);
    for (std::size_t i = 0; i < dx; ++i) {
      xt[i] = (x[i] - box_.lower()[i]) / (box_.upper()[i] - box_.lower()[i]);
    }
    for (std::size_t j = 0; j < dy_; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < dx; ++i) {
        acc += a_[j][i] * std::sin(b_[j][i] * xt[i] + c_[j][i]);
        acc += d_[j][i] * xt[i] * xt[i];
      }
      y[j] = acc;
    }
  }

 private:
  Box box_ = Box::cube(1, 0.0, 1.0);
  std::size_t dy_ = 0;
  std::vector<std::vector<double>> a_, b_, c_, d_;
};

/// Exact-key memoization around a shared forward model: repeated
/// evaluation at a previously seen point costs no model run. This is
/// what makes node sharing across a problem sequence free.
class CachingForwardModel {
 public:
  explicit CachingForwardModel(std::shared_ptr<const ForwardModel> model)
      : model_(std::move(model)) {}

  const ForwardModel& model() const { return *model_; }
  std::uint64_t model_evaluations() const { return model_->evaluations(); }
  std::uint64_t cache_hits() const { return hits_; }

  std::vector<double> evaluate(std::span<const double> x) const {
    std::vector<double> key(x.begin(), x.end());
    {
      std::lock_guard<std::mutex> lock(mutex_);
      const auto it = cache_.find(key);
      if (it != cache_.end()) {
        ++hits_;
        return it->second;
      }
    }
    std::vector<double> y(model_->output_dim());
    model_->evaluate(x, y);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(std::move(key), y);
    return y;
  }

 private:
  std::shared_ptr<const ForwardModel> model_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<double>, std::vector<double>> cache_;
  mutable std::uint64_t hits_ = 0;
};

/// One Bayesian inversion: observation, noise level, and the box prior;
/// the induced target is exp(-||y - h(x)||^2 / (2 sigma^2)) inside the
/// box and zero outside.
struct InversionProblem {
  std::shared_ptr<CachingForwardModel> forward;
  std::vector<double> observation;
  double noise_stddev = 1.0;

  TargetDensity make_target() const {
    auto fwd = forward;
    auto y = observation;
    const double inv2s2 = 1.0 / (2.0 * noise_stddev * noise_stddev);
    const Box& box = fwd->model().prior_box();
    return TargetDensity(
        [fwd, y, inv2s2](std::span<const double> x) {
          const auto hx = fwd->evaluate(x);
          double acc = 0.0;
          for (std::size_t j = 0; j < y.size(); ++j) {
            const double e = y[j] - hx[j];
            acc += e * e;
          }
          return -acc * inv2s2;
        },
        box.dim(), Domain::bounded(box));
  }
};

struct InversionResult {
  Point map;
  double evidence = 0.0;
  std::uint64_t forward_evaluations = 0;  // fresh model runs for this problem
  std::uint64_t target_evaluations = 0;
};

/// Solves a sequence of inversion problems that share one forward
/// model. With sharing on, the MAP estimates of already-solved problems
/// replace that many fresh initial nodes for the next problem; their
/// forward outputs come from the cache, so the model budget shrinks
/// while the node set starts warmer.
inline std::vector<InversionResult> sequential_inversion(
    std::span<const InversionProblem> problems, const RadisConfig& base_cfg,
    bool share_nodes, Rng rng) {
  if (problems.empty()) {
    throw config_error("sequential_inversion: no problems given");
  }
  std::vector<InversionResult> results;
  std::vector<Point> maps;
  for (std::size_t r = 0; r < problems.size(); ++r) {
    const auto& problem = problems[r];
    TargetDensity target = problem.make_target();
    const std::uint64_t fwd_start = problem.forward->model_evaluations();
    const std::uint64_t tgt_start = target.evaluations();

    RadisConfig cfg = base_cfg;
    if (share_nodes && !maps.empty()) {
      const std::size_t reuse = std::min(maps.size(), cfg.init.count);
      for (std::size_t s = maps.size() - reuse; s < maps.size(); ++s) {
        const double lp = target.log_pi(maps[s]);  // cache hit on h
        cfg.init.points_flat.insert(cfg.init.points_flat.end(), maps[s].begin(),
                                    maps[s].end());
        cfg.init.log_values.push_back(lp);
      }
      cfg.init.count -= reuse;
    }
    RadisOutput run = run_radis(target, cfg, rng.split(r));

    InversionResult res;
    res.map.assign(run.map_point().begin(), run.map_point().end());
    res.evidence = run.evidence;
    res.forward_evaluations = problem.forward->model_evaluations() - fwd_start;
    res.target_evaluations = target.evaluations() - tgt_start;
    results.push_back(std::move(res));
    maps.push_back(results.back().map);
  }
  return results;
}

/// Deterministic problem sequence for experiments: true parameters move
/// smoothly through the prior box and observations carry Gaussian noise
/// from a fixed observation seed.
inline std::vector<InversionProblem> make_synthetic_problem_sequence(
    std::shared_ptr<CachingForwardModel> forward, std::size_t count,
    double noise_stddev, std::uint64_t observation_seed,
    std::vector<Point>* true_params = nullptr) {
  const Box& box = forward->model().prior_box();
  const std::size_t dx = box.dim();
  const std::size_t dy = forward->model().output_dim();
  Rng rng(observation_seed);
  std::vector<InversionProblem> problems;
  for (std::size_t r = 0; r < count; ++r) {
    const double s = static_cast<double>(r) / static_cast<double>(count);
    Point x(dx);
    for (std::size_t d = 0; d < dx; ++d) {
      const double phase = 2.0 * std::numbers::pi *
                           (s + static_cast<double>(d) / static_cast<double>(dx));
      const double u = 0.5 + 0.35 * std::sin(phase);
      x[d] = box.lower()[d] + u * (box.upper()[d] - box.lower()[d]);
    }
    std::vector<double> y(dy);
    forward->model().evaluate(x, y);
    for (double& v : y) v += noise_stddev * rng.normal();
    problems.push_back(InversionProblem{forward, std::move(y), noise_stddev});
    if (true_params != nullptr) true_params->push_back(std::move(x));
  }
  return problems;
}

}  // namespace radis

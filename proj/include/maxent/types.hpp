// Copyright 2026 The maxent-robust Authors
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
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace maxent {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// Probabilities below this are treated as zero when taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

/// Raised when a table has the wrong dimensions for the model it is used with.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a mathematical precondition fails (support, positivity, budget).
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A sequence of per-timestep items. A single item stands for every step.
template <typename Item>
class PerStep {
 public:
  PerStep() = default;
  explicit PerStep(Item item) { items_.push_back(std::move(item)); }
  explicit PerStep(std::vector<Item> items) : items_(std::move(items)) {
    if (items_.empty()) throw ShapeError("PerStep: at least one item is required");
  }

  const Item& at(int t) const {
    return items_.size() == 1 ? items_.front() : items_.at(static_cast<std::size_t>(t));
  }
  bool stationary() const { return items_.size() == 1; }
  int size() const { return static_cast<int>(items_.size()); }
  const std::vector<Item>& items() const { return items_; }

 private:
  std::vector<Item> items_;
};

/// log(sum(exp(x))) shifted by the maximum.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = x.maxCoeff();
  if (!std::isfinite(static_cast<double>(m))) return m;
  Scalar acc(0);
  for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::exp(x.derived()(i) - m);
  return m + std::log(acc);
}

/// Shannon entropy in nats with the 0 log 0 = 0 convention.
template <typename Derived>
typename Derived::Scalar entropy(const Eigen::DenseBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  Scalar h(0);
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Scalar v = p.derived()(i);
    if (v > Scalar(0)) h -= v * std::log(v);
  }
  return h;
}

template <typename Derived>
Vector<typename Derived::Scalar> softmax(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = x.maxCoeff();
  Vector<Scalar> e = (x.derived().array() - m).exp().matrix();
  return e / e.sum();
}

}  // namespace maxent

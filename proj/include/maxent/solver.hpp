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

// Finite-horizon backward induction: soft (log-sum-exp) and greedy (max).

#pragma once

#include "maxent/mdp.hpp"

namespace maxent {

template <typename Scalar>
struct BasicSoftSolution {
  /// values[t](s), t = 0..T; values[T] is identically zero.
  std::vector<Vector<Scalar>> values;
  /// q_values[t](s, a), t = 0..T-1.
  std::vector<Matrix<Scalar>> q_values;
  BasicStochasticPolicy<Scalar> policy;
  Scalar alpha{0};
  /// Number of (t, s) pairs where the greedy maximum was attained by more than one action.
  int ties{0};

  /// E_{p1}[V_1].
  Scalar initial_value(const Vector<Scalar>& initial_dist) const { return initial_dist.dot(values.front()); }
};

using SoftSolution = BasicSoftSolution<double>;

namespace detail {

template <typename Scalar>
Matrix<Scalar> backup(const BasicTabularMDP<Scalar>& mdp, int t, const Vector<Scalar>& next_values) {
  Matrix<Scalar> q = mdp.rewards();
  for (int a = 0; a < mdp.num_actions(); ++a) q.col(a) += mdp.transition(t, a) * next_values;
  return q;
}

}  // namespace detail

/// Optimal time-indexed policy of the entropy-regularized objective with temperature alpha.
template <typename Scalar>
BasicSoftSolution<Scalar> soft_value_iteration(const BasicTabularMDP<Scalar>& mdp, Scalar alpha) {
  if (!(alpha > Scalar(0))) throw PreconditionError("soft_value_iteration: alpha must be > 0");
  const int S = mdp.num_states();
  const int T = mdp.horizon();
  std::vector<Vector<Scalar>> values(static_cast<std::size_t>(T + 1), Vector<Scalar>::Zero(S));
  std::vector<Matrix<Scalar>> qs(static_cast<std::size_t>(T));
  std::vector<Matrix<Scalar>> tables(static_cast<std::size_t>(T));
  for (int t = T - 1; t >= 0; --t) {
    Matrix<Scalar> q = detail::backup(mdp, t, values[static_cast<std::size_t>(t + 1)]);
    Vector<Scalar> v(S);
    Matrix<Scalar> pi(S, mdp.num_actions());
    for (int s = 0; s < S; ++s) {
      const Vector<Scalar> scaled = q.row(s).transpose() / alpha;
      const Scalar lse = log_sum_exp(scaled);
      v(s) = alpha * lse;
      pi.row(s) = (scaled.array() - lse).exp().matrix().transpose();
      pi.row(s) /= pi.row(s).sum();
    }
    values[static_cast<std::size_t>(t)] = std::move(v);
    qs[static_cast<std::size_t>(t)] = std::move(q);
    tables[static_cast<std::size_t>(t)] = std::move(pi);
  }
  return {std::move(values), std::move(qs), BasicStochasticPolicy<Scalar>(std::move(tables)), alpha, 0};
}

/// Standard backward induction; ties go to the lowest action index.
template <typename Scalar>
BasicSoftSolution<Scalar> greedy_value_iteration(const BasicTabularMDP<Scalar>& mdp) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int T = mdp.horizon();
  std::vector<Vector<Scalar>> values(static_cast<std::size_t>(T + 1), Vector<Scalar>::Zero(S));
  std::vector<Matrix<Scalar>> qs(static_cast<std::size_t>(T));
  std::vector<Matrix<Scalar>> tables(static_cast<std::size_t>(T));
  int ties = 0;
  for (int t = T - 1; t >= 0; --t) {
    Matrix<Scalar> q = detail::backup(mdp, t, values[static_cast<std::size_t>(t + 1)]);
    Vector<Scalar> v(S);
    Matrix<Scalar> pi = Matrix<Scalar>::Zero(S, A);
    for (int s = 0; s < S; ++s) {
      int best = 0;
      for (int a = 1; a < A; ++a)
        if (q(s, a) > q(s, best)) best = a;
      for (int a = 0; a < A; ++a)
        if (a != best && q(s, a) == q(s, best)) {
          ++ties;
          break;
        }
      v(s) = q(s, best);
      pi(s, best) = Scalar(1);
    }
    values[static_cast<std::size_t>(t)] = std::move(v);
    qs[static_cast<std::size_t>(t)] = std::move(q);
    tables[static_cast<std::size_t>(t)] = std::move(pi);
  }
  return {std::move(values), std::move(qs), BasicStochasticPolicy<Scalar>(std::move(tables)), Scalar(0), ties};
}

}  // namespace maxent

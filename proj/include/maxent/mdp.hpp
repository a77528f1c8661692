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

// Finite-horizon tabular MDPs, stochastic policies, occupancy measures and the
// exact evaluation of the standard and entropy-regularized objectives.

#pragma once

#include "maxent/types.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <optional>

namespace maxent {

/// One transition matrix per action: kernel[a](s, s') = p(s' | s, a).
template <typename Scalar>
using TransitionKernel = std::vector<Matrix<Scalar>>;

/// Reward table r(s, a), optionally time-indexed.
template <typename Scalar>
using RewardTable = PerStep<Matrix<Scalar>>;

template <typename Scalar>
class BasicTabularMDP {
 public:
  BasicTabularMDP(Vector<Scalar> initial_dist, PerStep<TransitionKernel<Scalar>> transitions,
                  Matrix<Scalar> rewards, int horizon)
      : initial_(std::move(initial_dist)),
        transitions_(std::move(transitions)),
        rewards_(std::move(rewards)),
        horizon_(horizon) {
    const auto S = initial_.size();
    if (S == 0) throw ShapeError("TabularMDP: at least one state is required");
    if (horizon_ < 1) throw ShapeError("TabularMDP: horizon must be >= 1");
    if (rewards_.rows() != S || rewards_.cols() == 0)
      throw ShapeError(fmt::format("TabularMDP: rewards must be {} x A", S));
    if (!transitions_.stationary() && transitions_.size() != horizon_)
      throw ShapeError("TabularMDP: time-indexed transitions need one kernel per step");
    for (const auto& kernel : transitions_.items()) {
      if (static_cast<Eigen::Index>(kernel.size()) != rewards_.cols())
        throw ShapeError("TabularMDP: one transition matrix per action is required");
      for (const auto& m : kernel)
        if (m.rows() != S || m.cols() != S)
          throw ShapeError(fmt::format("TabularMDP: transition matrices must be {} x {}", S, S));
    }
  }

  /// Stationary-dynamics convenience constructor.
  BasicTabularMDP(Vector<Scalar> initial_dist, TransitionKernel<Scalar> kernel,
                  Matrix<Scalar> rewards, int horizon)
      : BasicTabularMDP(std::move(initial_dist), PerStep<TransitionKernel<Scalar>>(std::move(kernel)),
                        std::move(rewards), horizon) {}

  int num_states() const { return static_cast<int>(initial_.size()); }
  int num_actions() const { return static_cast<int>(rewards_.cols()); }
  int horizon() const { return horizon_; }
  const Vector<Scalar>& initial_dist() const { return initial_; }
  const Matrix<Scalar>& rewards() const { return rewards_; }
  const PerStep<TransitionKernel<Scalar>>& transitions() const { return transitions_; }
  const TransitionKernel<Scalar>& kernel(int t) const { return transitions_.at(t); }
  const Matrix<Scalar>& transition(int t, int a) const {
    return transitions_.at(t)[static_cast<std::size_t>(a)];
  }
  bool time_indexed_dynamics() const { return !transitions_.stationary(); }

  /// True iff every r(s, a) > 0.
  bool positive_rewards() const { return rewards_.minCoeff() > Scalar(0); }

  BasicTabularMDP with_rewards(Matrix<Scalar> rewards) const {
    return BasicTabularMDP(initial_, transitions_, std::move(rewards), horizon_);
  }
  BasicTabularMDP with_transitions(PerStep<TransitionKernel<Scalar>> transitions) const {
    return BasicTabularMDP(initial_, std::move(transitions), rewards_, horizon_);
  }
  BasicTabularMDP with_horizon(int horizon) const {
    return BasicTabularMDP(initial_, transitions_, rewards_, horizon);
  }

 private:
  Vector<Scalar> initial_;
  PerStep<TransitionKernel<Scalar>> transitions_;
  Matrix<Scalar> rewards_;
  int horizon_;
};

/// Per-timestep state-conditioned action distributions pi_t(a | s), stored S x A.
template <typename Scalar>
class BasicStochasticPolicy {
 public:
  explicit BasicStochasticPolicy(Matrix<Scalar> stationary) : tables_(std::move(stationary)) {}
  explicit BasicStochasticPolicy(std::vector<Matrix<Scalar>> per_step) : tables_(std::move(per_step)) {
    for (const auto& m : tables_.items())
      if (m.rows() != tables_.at(0).rows() || m.cols() != tables_.at(0).cols())
        throw ShapeError("StochasticPolicy: all tables must share one shape");
  }

  static BasicStochasticPolicy uniform(int num_states, int num_actions) {
    return BasicStochasticPolicy(
        Matrix<Scalar>::Constant(num_states, num_actions, Scalar(1) / Scalar(num_actions)));
  }

  const Matrix<Scalar>& at(int t) const { return tables_.at(t); }
  bool stationary() const { return tables_.stationary(); }
  int num_steps() const { return tables_.size(); }
  int num_states() const { return static_cast<int>(tables_.at(0).rows()); }
  int num_actions() const { return static_cast<int>(tables_.at(0).cols()); }
  const std::vector<Matrix<Scalar>>& tables() const { return tables_.items(); }

  /// True iff every entry is at least the probability floor.
  bool full_support() const {
    for (const auto& m : tables_.items())
      if (m.minCoeff() < Scalar(kProbabilityFloor)) return false;
    return true;
  }

 private:
  PerStep<Matrix<Scalar>> tables_;
};

/// Exact per-timestep visitation distributions.
template <typename Scalar>
struct BasicOccupancyMeasure {
  /// states[t](s) = rho_t(s), t = 0..T (index T is the state after the last step).
  std::vector<Vector<Scalar>> states;
  /// state_actions[t](s, a) = rho_t(s) pi_t(a | s), t = 0..T-1.
  std::vector<Matrix<Scalar>> state_actions;
  /// joint[t][a](s, s') = rho_t(s) pi_t(a | s) p(s' | s, a).
  std::vector<std::vector<Matrix<Scalar>>> joint;

  int horizon() const { return static_cast<int>(state_actions.size()); }
};

template <typename Scalar>
struct BasicEntropyProfile {
  std::vector<Scalar> policy;    ///< E_{rho_t}[H_pi(a | s)]
  std::vector<Scalar> dynamics;  ///< E_{rho_t}[H_p(s' | s, a)]
  Scalar policy_total{0};
  Scalar dynamics_total{0};
};

struct Violation {
  std::string where;
  double residual;
};

using TabularMDP = BasicTabularMDP<double>;
using StochasticPolicy = BasicStochasticPolicy<double>;
using OccupancyMeasure = BasicOccupancyMeasure<double>;
using EntropyProfile = BasicEntropyProfile<double>;

namespace detail {

template <typename Scalar>
void check_distribution(const std::string& where, const Eigen::Ref<const Vector<Scalar>>& row,
                        double tol, std::vector<Violation>& out) {
  const double negative = static_cast<double>(std::min(row.minCoeff(), Scalar(0)));
  if (negative < 0) out.push_back({where + " has a negative entry", negative});
  const double residual = static_cast<double>(Scalar(1) - row.sum());
  if (std::abs(residual) > tol) out.push_back({where + " does not sum to 1", residual});
}

}  // namespace detail

/// Lists every broken invariant of `mdp`; empty means the model is valid.
template <typename Scalar>
std::vector<Violation> validate(const BasicTabularMDP<Scalar>& mdp) {
  constexpr double tol = 1e-12;
  std::vector<Violation> out;
  detail::check_distribution<Scalar>("initial_dist", mdp.initial_dist(), tol, out);
  for (int k = 0; k < mdp.transitions().size(); ++k)
    for (int a = 0; a < mdp.num_actions(); ++a)
      for (int s = 0; s < mdp.num_states(); ++s) {
        const Vector<Scalar> row = mdp.transition(k, a).row(s).transpose();
        detail::check_distribution<Scalar>(fmt::format("P[t={}][s={}][a={}]", k, s, a), row, tol, out);
      }
  if (!mdp.rewards().allFinite()) out.push_back({"rewards contain a non-finite entry", 0.0});
  return out;
}

template <typename Scalar>
void check_policy_shape(const BasicTabularMDP<Scalar>& mdp, const BasicStochasticPolicy<Scalar>& policy) {
  if (policy.num_states() != mdp.num_states() || policy.num_actions() != mdp.num_actions())
    throw ShapeError(fmt::format("policy is {} x {} but the MDP is {} x {}", policy.num_states(),
                                 policy.num_actions(), mdp.num_states(), mdp.num_actions()));
  if (!policy.stationary() && policy.num_steps() != mdp.horizon())
    throw ShapeError(fmt::format("policy has {} steps but the horizon is {}", policy.num_steps(),
                                 mdp.horizon()));
}

/// Exact forward recursion of the visitation distribution.
template <typename Scalar>
BasicOccupancyMeasure<Scalar> occupancy(const BasicTabularMDP<Scalar>& mdp,
                                        const BasicStochasticPolicy<Scalar>& policy) {
  check_policy_shape(mdp, policy);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int T = mdp.horizon();
  BasicOccupancyMeasure<Scalar> occ;
  occ.states.reserve(T + 1);
  occ.states.push_back(mdp.initial_dist());
  for (int t = 0; t < T; ++t) {
    const Vector<Scalar>& rho = occ.states.back();
    Matrix<Scalar> sa = rho.asDiagonal() * policy.at(t);
    std::vector<Matrix<Scalar>> joint_t;
    joint_t.reserve(A);
    Vector<Scalar> next = Vector<Scalar>::Zero(S);
    for (int a = 0; a < A; ++a) {
      Matrix<Scalar> j = sa.col(a).asDiagonal() * mdp.transition(t, a);
      next += j.colwise().sum().transpose();
      joint_t.push_back(std::move(j));
    }
    occ.state_actions.push_back(std::move(sa));
    occ.joint.push_back(std::move(joint_t));
    occ.states.push_back(std::move(next));
  }
  return occ;
}

/// sum_t sum_{s,a} rho_t(s, a) r_t(s, a).
template <typename Scalar>
Scalar expected_return(const BasicOccupancyMeasure<Scalar>& occ, const RewardTable<Scalar>& rewards) {
  Scalar total(0);
  for (int t = 0; t < occ.horizon(); ++t) {
    const Matrix<Scalar>& sa = occ.state_actions[static_cast<std::size_t>(t)];
    const Matrix<Scalar>& r = rewards.at(t);
    if (r.rows() != sa.rows() || r.cols() != sa.cols()) throw ShapeError("reward table shape mismatch");
    for (Eigen::Index s = 0; s < sa.rows(); ++s)
      for (Eigen::Index a = 0; a < sa.cols(); ++a) total += sa(s, a) * r(s, a);
  }
  return total;
}

template <typename Scalar>
Scalar expected_return(const BasicTabularMDP<Scalar>& mdp, const BasicStochasticPolicy<Scalar>& policy) {
  return expected_return(occupancy(mdp, policy), RewardTable<Scalar>(mdp.rewards()));
}

template <typename Scalar>
BasicEntropyProfile<Scalar> entropy_profile(const BasicTabularMDP<Scalar>& mdp,
                                            const BasicOccupancyMeasure<Scalar>& occ,
                                            const BasicStochasticPolicy<Scalar>& policy) {
  BasicEntropyProfile<Scalar> prof;
  for (int t = 0; t < mdp.horizon(); ++t) {
    const auto& rho = occ.states[static_cast<std::size_t>(t)];
    const auto& sa = occ.state_actions[static_cast<std::size_t>(t)];
    Scalar hp(0), hd(0);
    for (int s = 0; s < mdp.num_states(); ++s) {
      if (rho(s) == Scalar(0)) continue;
      hp += rho(s) * entropy(policy.at(t).row(s));
      for (int a = 0; a < mdp.num_actions(); ++a)
        if (sa(s, a) != Scalar(0)) hd += sa(s, a) * entropy(mdp.transition(t, a).row(s));
    }
    prof.policy.push_back(hp);
    prof.dynamics.push_back(hd);
    prof.policy_total += hp;
    prof.dynamics_total += hd;
  }
  return prof;
}

template <typename Scalar>
BasicEntropyProfile<Scalar> entropy_profile(const BasicTabularMDP<Scalar>& mdp,
                                            const BasicStochasticPolicy<Scalar>& policy) {
  return entropy_profile(mdp, occupancy(mdp, policy), policy);
}

/// Expected return plus alpha times the expected policy entropy.
///
/// Exact zeros contribute nothing to the entropy. A probability strictly between
/// zero and the floor at a visited state is rejected when alpha > 0, since its
/// log cannot be represented without clamping.
template <typename Scalar>
Scalar maxent_objective(const BasicTabularMDP<Scalar>& mdp, const BasicStochasticPolicy<Scalar>& policy,
                        Scalar alpha) {
  if (alpha < Scalar(0)) throw PreconditionError("maxent_objective: alpha must be >= 0");
  const auto occ = occupancy(mdp, policy);
  const Scalar ret = expected_return(occ, RewardTable<Scalar>(mdp.rewards()));
  if (alpha == Scalar(0)) return ret;
  for (int t = 0; t < mdp.horizon(); ++t) {
    const auto& pi = policy.at(t);
    for (int s = 0; s < mdp.num_states(); ++s) {
      if (occ.states[static_cast<std::size_t>(t)](s) == Scalar(0)) continue;
      for (int a = 0; a < mdp.num_actions(); ++a)
        if (pi(s, a) > Scalar(0) && pi(s, a) < Scalar(kProbabilityFloor))
          throw PreconditionError(
              fmt::format("maxent_objective: pi(a={} | s={}) at t={} is below the probability floor", a, s, t));
    }
  }
  return ret + alpha * entropy_profile(mdp, occ, policy).policy_total;
}

/// Absorbing-state construction for a discount factor: with probability 1 - gamma
/// the process moves to an extra zero-reward sink.
template <typename Scalar>
BasicTabularMDP<Scalar> discounted(const BasicTabularMDP<Scalar>& mdp, Scalar gamma) {
  if (gamma < Scalar(0) || gamma > Scalar(1)) throw PreconditionError("discounted: gamma must be in [0, 1]");
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<TransitionKernel<Scalar>> kernels;
  for (const auto& kernel : mdp.transitions().items()) {
    TransitionKernel<Scalar> k;
    for (int a = 0; a < A; ++a) {
      Matrix<Scalar> m = Matrix<Scalar>::Zero(S + 1, S + 1);
      m.topLeftCorner(S, S) = gamma * kernel[static_cast<std::size_t>(a)];
      m.col(S).head(S).setConstant(Scalar(1) - gamma);
      m(S, S) = Scalar(1);
      k.push_back(std::move(m));
    }
    kernels.push_back(std::move(k));
  }
  Vector<Scalar> init = Vector<Scalar>::Zero(S + 1);
  init.head(S) = mdp.initial_dist();
  Matrix<Scalar> r = Matrix<Scalar>::Zero(S + 1, A);
  r.topRows(S) = mdp.rewards();
  return BasicTabularMDP<Scalar>(std::move(init), PerStep<TransitionKernel<Scalar>>(std::move(kernels)),
                                 std::move(r), mdp.horizon());
}

}  // namespace maxent

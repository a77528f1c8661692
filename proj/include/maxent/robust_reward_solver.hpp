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

// Robust control over a finite reward ensemble in the bandit setting: the
// matrix game between arms and reward functions, the log-construction of a
// MaxEnt reward from the minimax policy, and the alternating lower-bound scheme.

#pragma once

#include "maxent/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace maxent {

/// Payoff matrix M(a, i) = r_i(a): one column per reward function.
using RewardEnsemble = MatrixXd;

void check_ensemble(const RewardEnsemble& ensemble);

struct MinimaxResult {
  VectorXd policy;     ///< averaged arm distribution
  VectorXd adversary;  ///< averaged mixture over reward functions
  double value = 0;    ///< midpoint of [lower, upper]
  double lower = 0;    ///< min_i E_policy[r_i]
  double upper = 0;    ///< max_a E_adversary[r(a)]
  double exploitability = 0;
  int iterations = 0;
  bool converged = false;
};

/// Fictitious play with alternating best responses (ties go to the lowest index).
/// Stops once upper - lower < tol.
MinimaxResult fictitious_play(const RewardEnsemble& ensemble, int max_iters, double tol);

/// fictitious_play(ensemble, 1'000'000, 1e-5).
MinimaxResult minimax(const RewardEnsemble& ensemble);
double minimax_value(const RewardEnsemble& ensemble);

/// min_i E_policy[r_i].
double robust_value(const RewardEnsemble& ensemble, const VectorXd& policy);

struct MaxEntConstruction {
  VectorXd reward;     ///< log of the floored minimax policy
  VectorXd minimax_policy;
  VectorXd recovered;  ///< softmax(reward)
  double total_variation = 0;
  double floor = 1e-9;
  int floored_entries = 0;
  bool degenerate_support = false;
};

MaxEntConstruction maxent_construction(const RewardEnsemble& ensemble, double floor = 1e-9);
MaxEntConstruction maxent_construction(const VectorXd& minimax_policy, double floor = 1e-9);

struct RewardSubproblemResult {
  VectorXd reward;
  double objective = 0;        ///< E_policy[reward]
  double max_constraint = 0;   ///< max_i sum_a exp(reward(a) - r_i(a))
  int newton_steps = 0;
};

/// max_r E_policy[r] subject to sum_a exp(r(a) - r_i(a)) <= 1 for every i,
/// by a damped-Newton log-barrier path with weights 1, 0.1, ..., 1e-6.
RewardSubproblemResult reward_subproblem(const RewardEnsemble& ensemble, const VectorXd& policy);

struct LowerBoundResult {
  VectorXd reward;
  VectorXd policy;
  double robust_value = 0;
  double oracle_value = 0;
  double normalized = 0;
  int rounds = 0;
};

/// Alternates reward_subproblem with policy = softmax(reward) and keeps the
/// iterate with the best robust value. Stops after 10 rounds without improvement.
LowerBoundResult lower_bound_maxent(const RewardEnsemble& ensemble, int rounds = 50);
LowerBoundResult lower_bound_maxent(const RewardEnsemble& ensemble, double oracle_value, int rounds = 50);

struct BaselineResult {
  VectorXd policy;
  double robust_value = 0;
  double normalized = 0;
};

struct Baselines {
  BaselineResult pointwise_min;
  BaselineResult uniform;
};

/// Pointwise-min policy: argmax_a min_i r_i(a), uniform over ties.
Baselines baseline_policies(const RewardEnsemble& ensemble);
Baselines baseline_policies(const RewardEnsemble& ensemble, double oracle_value);

struct Fig10Config {
  std::uint64_t seed = 0;
  int num_problems = 10;
  int arms = 5;
  int ensemble_size = 5;
  double shift = 0.1;
  int rounds = 50;
  int jobs = 1;
};

struct Fig10Row {
  int problem_id = 0;
  std::string method;
  double normalized_minimax = 0;
  double raw_minimax = 0;
  double oracle_value = 0;
  int iterations = 0;
};

struct Fig10Result {
  std::vector<Fig10Row> rows;
  std::vector<RewardEnsemble> ensembles;
  std::vector<MinimaxResult> oracles;

  /// Mean normalized minimax of one method over all problems.
  double mean(const std::string& method) const;
};

inline const std::vector<std::string>& fig10_methods() {
  static const std::vector<std::string> names{"fictitious_play", "lower_bound_maxent", "pointwise_min", "uniform"};
  return names;
}

/// Standard-normal entries, then each column is shifted so its minimum equals `shift`.
RewardEnsemble fig10_ensemble(std::uint64_t seed, int arms, int ensemble_size, double shift);

/// All four methods on one ensemble.
std::vector<Fig10Row> fig10_problem(const RewardEnsemble& ensemble, int problem_id, int rounds,
                                    MinimaxResult* oracle = nullptr);

/// Problem p uses the RNG stream seeded with seed + p.
Fig10Result fig10_experiment(const Fig10Config& config);

}  // namespace maxent

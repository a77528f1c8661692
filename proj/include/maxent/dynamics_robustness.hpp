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

// Dynamics robust sets: the pessimistic reward, the trajectory divergence
// between two transition kernels, the Jensen/Fenchel lower-bound chain, the
// entropy budget, and numerical adversaries over transition tables.

#pragma once

#include "maxent/mdp.hpp"
#include "maxent/reward_robustness.hpp"

#include <json.hpp>

namespace maxent {

using Kernels = PerStep<TransitionKernel<double>>;

struct DynamicsPerturbation {
  Kernels ptilde;
  /// E_{pi,p}[d(p, p~; tau)].
  double divergence_expectation = 0;
  Provenance provenance = Provenance::user;
};

struct PessimisticReward {
  /// rbar_t(s, a) = log r(s, a) / T + H[p_t(. | s, a)].
  RewardTable<double> folded;
  /// full[t][a](s, s'); constant in s'.
  std::vector<std::vector<MatrixXd>> full;
};

struct DynamicsRobustAudit {
  double lhs_log_return = 0;       ///< log E_{p~,pi}[sum_t r]
  double return_under_ptilde = 0;  ///< E_{p~,pi}[sum_t r]
  double maxent_under_ptilde = 0;  ///< J_MaxEnt(pi; p~, r), alpha = 1
  double pessimistic_value = 0;    ///< J_MaxEnt(pi; p, rbar), alpha = 1
  double divergence = 0;
  double rhs = 0;                  ///< pessimistic_value + log T - divergence
  double gap = 0;                  ///< lhs_log_return - rhs
  double epsilon_budget = 0;
  double entropy_witness = 0;      ///< T E[H_pi]
  double theorem_form_rhs = 0;     ///< exp(pessimistic_value + log T); reported only
};

nlohmann::json to_json(const DynamicsRobustAudit& audit);

PessimisticReward pessimistic_reward(const TabularMDP& mdp);

/// Per-state divergence term log sum_{a', s''} p(s'' | s, a') / p~(s'' | s, a') at step t.
VectorXd divergence_terms(const TabularMDP& mdp, const Kernels& ptilde, int t);

/// E_{pi,p}[sum_t log sum_{a', s''} p / p~] from the state marginals under (pi, p).
double dynamics_divergence(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde);
double dynamics_divergence(const TabularMDP& mdp, const OccupancyMeasure& occ, const Kernels& ptilde);

DynamicsPerturbation make_dynamics_perturbation(const TabularMDP& mdp, const StochasticPolicy& policy,
                                                Kernels ptilde, Provenance provenance = Provenance::user);

/// Smallest divergence any kernel can reach: p~(. | s, a) proportional to sqrt(p(. | s, a)).
Kernels minimum_divergence_kernel(const TabularMDP& mdp);

struct EpsilonBudget {
  /// T E_rho[H_p~ + H_pi] = sum_t E_{rho_t}[H_p~(s' | s, a) + H_pi(a | s)].
  double value = 0;
  /// sum_t E_{rho_t}[H_pi(a | s)].
  double entropy_witness = 0;
};

EpsilonBudget epsilon_budget(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde);

DynamicsRobustAudit proof_chain_audit(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde);

/// Uniform next-state rows.
DynamicsPerturbation optimal_dynamics_adversary(const TabularMDP& mdp, const StochasticPolicy& policy);

/// Delta-dependent part of the unit-multiplier relaxation,
/// E_{pi,p}[sum_t log p~ - log p] + E[d(p, p~)].
double relaxed_dynamics_objective(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde);

/// Intermediate values of the Jensen chain, by exact trajectory enumeration.
struct JensenChain {
  double lhs_log_return = 0;          ///< log E_{p~}[sum r]
  double importance_log_return = 0;   ///< E_p[log sum r + sum log p~/p]
  double averaged_log_reward = 0;     ///< E_p[sum (1/T) log r + log p~/p] + log T
  double log_mean_reward_under_ptilde = 0;  ///< E_{p~}[log(sum r / T)] + log T
};

/// Throws when the number of trajectories exceeds max_trajectories.
JensenChain jensen_chain(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde,
                         long max_trajectories = 2'000'000);

struct DynamicsSearchOptions {
  int iterations = 5000;
  int restarts = 20;
  double step = 0.1;
  double decay = 0.999;
  double initial_penalty = 1.0;
  std::uint64_t seed = 0;
  double drift_tolerance = 1e-6;
};

struct DynamicsSearchResult {
  DynamicsPerturbation perturbation;
  double achieved_return = 0;
  double divergence = 0;
  double feasibility_floor = 0;
  bool converged = false;
  double late_drift = 0;
  double final_penalty = 0;
};

/// Minimizes E_{p~,pi}[sum r] over kernels with divergence <= epsilon by
/// exponentiated-gradient steps on each row, with a penalty weight that doubles
/// whenever the iterate leaves the set. Returns the best feasible iterate.
DynamicsSearchResult adversary_search_dynamics(const TabularMDP& mdp, const StochasticPolicy& policy, double epsilon,
                                               const DynamicsSearchOptions& options = {});

struct CombinedRobustnessAudit {
  DynamicsRobustAudit dynamics;
  double epsilon_r = 0;
  double perturbed_return = 0;  ///< E_{p~,pi}[sum r~] with r~ the analytic reward adversary
  double bound = 0;             ///< pessimistic_value + log T - divergence - epsilon_r
  double gap = 0;
};

CombinedRobustnessAudit combined_robustness_audit(const TabularMDP& mdp, const StochasticPolicy& policy,
                                                  const Kernels& ptilde, double epsilon_r);

}  // namespace maxent

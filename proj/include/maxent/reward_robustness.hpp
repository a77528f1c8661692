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

// Reward robust sets: the log-sum-exp constraint on reward perturbations, its
// closed-form worst case, a numerical adversary, and temperature-scaled sets.

#pragma once

#include "maxent/mdp.hpp"
#include "maxent/random_instances.hpp"

#include <json.hpp>

namespace maxent {

enum class Provenance { analytic, searched, user, identity, uniform_adversary };
std::string to_string(Provenance p);

/// A perturbed reward r~_t(s, a) stored together with delta_t = r - r~_t.
struct RewardPerturbation {
  RewardTable<double> delta;
  RewardTable<double> rtilde;
  Provenance provenance = Provenance::user;

  static RewardPerturbation from_rtilde(const MatrixXd& r, RewardTable<double> rtilde, Provenance provenance);
};

struct RewardRobustAudit {
  double constraint_value = 0;
  double epsilon = 0;
  double adversarial_return = 0;
  double maxent_value = 0;
  /// adversarial_return + constraint_value - maxent_value; nonnegative for every r~.
  double gap = 0;
};

nlohmann::json to_json(const RewardRobustAudit& audit);

/// E_dist[-f] + logsumexp(f) - H(dist) >= 0, zero iff f = log dist + c on the support.
double fenchel_gap(const VectorXd& dist, const VectorXd& f);

/// E_pi[sum_t log sum_a' exp(r(s_t, a') - r~_t(s_t, a'))], exact through the occupancy.
double reward_constraint_expected(const TabularMDP& mdp, const StochasticPolicy& policy,
                                  const RewardTable<double>& rtilde);
double reward_constraint_expected(const OccupancyMeasure& occ, const MatrixXd& r, const RewardTable<double>& rtilde);

/// values[t](s) = log sum_a' exp(r(s, a') - r~_t(s, a')).
std::vector<VectorXd> reward_constraint_per_state(const MatrixXd& r, const RewardTable<double>& rtilde, int horizon);

/// Membership in the per-state subset: every per-state value is at most epsilon / T.
bool in_per_state_subset(const MatrixXd& r, const RewardTable<double>& rtilde, int horizon, double epsilon,
                         double tol = 1e-12);

/// E_pi[sum_t r~_t(s_t, a_t)].
double adversarial_return(const TabularMDP& mdp, const StochasticPolicy& policy, const RewardTable<double>& rtilde);

/// r~_t = r - log pi_t - epsilon / T, which spends the budget exactly.
RewardPerturbation worst_case_reward(const StochasticPolicy& policy, const MatrixXd& r, int horizon, double epsilon);
RewardPerturbation worst_case_reward(const TabularMDP& mdp, const StochasticPolicy& policy, double epsilon);

RewardRobustAudit audit_reward(const TabularMDP& mdp, const StochasticPolicy& policy,
                               const RewardTable<double>& rtilde, double epsilon);

struct RewardSearchOptions {
  int iterations = 5000;
  double step = 0.05;
  /// Non-convergence is reported when the best value moves by more than this over the last 10%.
  double drift_tolerance = 1e-6;
};

struct RewardSearchResult {
  RewardPerturbation perturbation;
  double value = 0;
  double constraint_value = 0;
  bool converged = false;
  double late_drift = 0;
  double final_step = 0;
};

/// Numerical minimization of E[sum r~] over r~ with the expected constraint <= epsilon.
///
/// Gradient descent on delta with the convex objective reduced by the budget
/// constraint: a uniform shift of delta raises the constraint by T and lowers the
/// return by T, so after every step the iterate is moved onto the boundary
/// exactly. Each state's step is scaled by its inverse visitation probability.
RewardSearchResult adversary_search_reward(const TabularMDP& mdp, const StochasticPolicy& policy, double epsilon,
                                           const RewardSearchOptions& options = {});

/// A random r~ with constraint value in [epsilon - slack, epsilon].
RewardTable<double> sample_feasible_reward(Rng& rng, const TabularMDP& mdp, const OccupancyMeasure& occ,
                                           double epsilon, double scale = 1.0);

struct TemperatureMembership {
  bool member = false;
  /// min over (s, a) of u = (r~ - r) / alpha; must be >= 0.
  double min_u = 0;
  /// max over s of sum_a exp(-u); must be <= 1.
  double max_mass = 0;
  /// Smallest margin over both conditions (negative when violated).
  double worst_slack = 0;
};

TemperatureMembership temperature_membership(const MatrixXd& r, const MatrixXd& rtilde, double alpha,
                                             double tol = 1e-12);

}  // namespace maxent

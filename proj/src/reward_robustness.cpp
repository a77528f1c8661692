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

#include "maxent/reward_robustness.hpp"

namespace maxent {

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::analytic: return "analytic";
    case Provenance::searched: return "searched";
    case Provenance::user: return "user";
    case Provenance::identity: return "identity";
    case Provenance::uniform_adversary: return "uniform_adversary";
  }
  return "unknown";
}

RewardPerturbation RewardPerturbation::from_rtilde(const MatrixXd& r, RewardTable<double> rtilde,
                                                   Provenance provenance) {
  std::vector<MatrixXd> delta;
  for (const auto& m : rtilde.items()) {
    if (m.rows() != r.rows() || m.cols() != r.cols()) throw ShapeError("reward perturbation shape mismatch");
    if (!m.allFinite()) throw PreconditionError("reward perturbation has a non-finite entry");
    delta.push_back(r - m);
  }
  return {RewardTable<double>(std::move(delta)), std::move(rtilde), provenance};
}

nlohmann::json to_json(const RewardRobustAudit& audit) {
  return {{"constraint_value", audit.constraint_value}, {"epsilon", audit.epsilon},
          {"adversarial_return", audit.adversarial_return}, {"maxent_value", audit.maxent_value},
          {"gap", audit.gap}};
}

double fenchel_gap(const VectorXd& dist, const VectorXd& f) {
  if (dist.size() != f.size()) throw ShapeError("fenchel_gap: size mismatch");
  return -dist.dot(f) + log_sum_exp(f) - entropy(dist);
}

std::vector<VectorXd> reward_constraint_per_state(const MatrixXd& r, const RewardTable<double>& rtilde,
                                                  int horizon) {
  std::vector<VectorXd> out;
  out.reserve(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    const MatrixXd& rt = rtilde.at(t);
    if (rt.rows() != r.rows() || rt.cols() != r.cols()) throw ShapeError("reward table shape mismatch");
    VectorXd v(r.rows());
    for (Eigen::Index s = 0; s < r.rows(); ++s) v(s) = log_sum_exp((r.row(s) - rt.row(s)).transpose());
    out.push_back(std::move(v));
  }
  return out;
}

double reward_constraint_expected(const OccupancyMeasure& occ, const MatrixXd& r,
                                  const RewardTable<double>& rtilde) {
  const auto per_state = reward_constraint_per_state(r, rtilde, occ.horizon());
  double total = 0;
  for (int t = 0; t < occ.horizon(); ++t) {
    const VectorXd& rho = occ.states[static_cast<std::size_t>(t)];
    for (Eigen::Index s = 0; s < rho.size(); ++s)
      if (rho(s) != 0) total += rho(s) * per_state[static_cast<std::size_t>(t)](s);
  }
  return total;
}

double reward_constraint_expected(const TabularMDP& mdp, const StochasticPolicy& policy,
                                  const RewardTable<double>& rtilde) {
  return reward_constraint_expected(occupancy(mdp, policy), mdp.rewards(), rtilde);
}

bool in_per_state_subset(const MatrixXd& r, const RewardTable<double>& rtilde, int horizon, double epsilon,
                         double tol) {
  const double cap = epsilon / horizon + tol;
  for (const auto& v : reward_constraint_per_state(r, rtilde, horizon))
    if (v.maxCoeff() > cap) return false;
  return true;
}

double adversarial_return(const TabularMDP& mdp, const StochasticPolicy& policy, const RewardTable<double>& rtilde) {
  return expected_return(occupancy(mdp, policy), rtilde);
}

RewardPerturbation worst_case_reward(const StochasticPolicy& policy, const MatrixXd& r, int horizon,
                                     double epsilon) {
  if (epsilon < 0) throw PreconditionError("worst_case_reward: epsilon must be >= 0");
  if (policy.num_states() != r.rows() || policy.num_actions() != r.cols())
    throw ShapeError("worst_case_reward: policy and reward shapes differ");
  const double shift = epsilon / horizon;
  std::vector<MatrixXd> tables;
  const int steps = policy.stationary() ? 1 : policy.num_steps();
  for (int t = 0; t < steps; ++t) {
    const MatrixXd& pi = policy.at(t);
    for (Eigen::Index s = 0; s < pi.rows(); ++s)
      for (Eigen::Index a = 0; a < pi.cols(); ++a)
        if (pi(s, a) < kProbabilityFloor)
          throw PreconditionError(fmt::format(
              "worst_case_reward: pi(a={} | s={}) at t={} is zero; the policy needs full support", a, s, t));
    tables.push_back(r - pi.array().log().matrix() - MatrixXd::Constant(r.rows(), r.cols(), shift));
  }
  return RewardPerturbation::from_rtilde(r, RewardTable<double>(std::move(tables)), Provenance::analytic);
}

RewardPerturbation worst_case_reward(const TabularMDP& mdp, const StochasticPolicy& policy, double epsilon) {
  check_policy_shape(mdp, policy);
  return worst_case_reward(policy, mdp.rewards(), mdp.horizon(), epsilon);
}

RewardRobustAudit audit_reward(const TabularMDP& mdp, const StochasticPolicy& policy,
                               const RewardTable<double>& rtilde, double epsilon) {
  const auto occ = occupancy(mdp, policy);
  RewardRobustAudit audit;
  audit.epsilon = epsilon;
  audit.constraint_value = reward_constraint_expected(occ, mdp.rewards(), rtilde);
  audit.adversarial_return = expected_return(occ, rtilde);
  audit.maxent_value = expected_return(occ, RewardTable<double>(mdp.rewards())) +
                       entropy_profile(mdp, occ, policy).policy_total;
  audit.gap = audit.adversarial_return + audit.constraint_value - audit.maxent_value;
  return audit;
}

namespace {

// phi(delta) = sum_t sum_s rho_t(s) [lse(delta_t(s)) - pi_t(s) . delta_t(s)]
double reduced_objective(const OccupancyMeasure& occ, const StochasticPolicy& policy,
                         const std::vector<MatrixXd>& delta) {
  double total = 0;
  for (int t = 0; t < occ.horizon(); ++t) {
    const VectorXd& rho = occ.states[static_cast<std::size_t>(t)];
    const MatrixXd& d = delta[static_cast<std::size_t>(t)];
    const MatrixXd& pi = policy.at(t);
    for (Eigen::Index s = 0; s < d.rows(); ++s) {
      if (rho(s) == 0) continue;
      total += rho(s) * (log_sum_exp(d.row(s).transpose()) - pi.row(s).dot(d.row(s)));
    }
  }
  return total;
}

double budget_usage(const OccupancyMeasure& occ, const std::vector<MatrixXd>& delta) {
  double total = 0;
  for (int t = 0; t < occ.horizon(); ++t) {
    const VectorXd& rho = occ.states[static_cast<std::size_t>(t)];
    const MatrixXd& d = delta[static_cast<std::size_t>(t)];
    for (Eigen::Index s = 0; s < d.rows(); ++s)
      if (rho(s) != 0) total += rho(s) * log_sum_exp(d.row(s).transpose());
  }
  return total;
}

// Uniform shift that puts delta exactly on the budget boundary.
std::vector<MatrixXd> onto_budget(const OccupancyMeasure& occ, std::vector<MatrixXd> delta, double epsilon) {
  const double shift = (epsilon - budget_usage(occ, delta)) / occ.horizon();
  for (auto& d : delta) d.array() += shift;
  return delta;
}

}  // namespace

RewardSearchResult adversary_search_reward(const TabularMDP& mdp, const StochasticPolicy& policy, double epsilon,
                                           const RewardSearchOptions& options) {
  check_policy_shape(mdp, policy);
  if (!policy.full_support()) throw PreconditionError("adversary_search_reward: the policy needs full support");
  if (epsilon < 0) throw PreconditionError("adversary_search_reward: epsilon must be >= 0");
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int T = mdp.horizon();
  const auto occ = occupancy(mdp, policy);
  const double base_return = expected_return(occ, RewardTable<double>(mdp.rewards()));

  std::vector<MatrixXd> delta(static_cast<std::size_t>(T), MatrixXd::Zero(S, A));
  double phi = reduced_objective(occ, policy, delta);
  double step = options.step;
  const int late_start = options.iterations - options.iterations / 10;
  double best_at_late_start = base_return - epsilon + phi;

  for (int it = 0; it < options.iterations; ++it) {
    if (it == late_start) best_at_late_start = base_return - epsilon + phi;
    std::vector<MatrixXd> trial = delta;
    for (int t = 0; t < T; ++t) {
      const MatrixXd& pi = policy.at(t);
      MatrixXd& d = trial[static_cast<std::size_t>(t)];
      for (int s = 0; s < S; ++s) {
        const VectorXd q = softmax(d.row(s).transpose());
        d.row(s) -= step * (q - pi.row(s).transpose()).transpose();
      }
    }
    const double trial_phi = reduced_objective(occ, policy, trial);
    if (trial_phi <= phi) {
      delta = std::move(trial);
      phi = trial_phi;
    } else {
      step *= 0.5;
    }
  }

  delta = onto_budget(occ, std::move(delta), epsilon);
  std::vector<MatrixXd> rtilde;
  for (const auto& d : delta) rtilde.push_back(mdp.rewards() - d);
  RewardTable<double> table(std::move(rtilde));

  RewardSearchResult result;
  result.value = expected_return(occ, table);
  result.constraint_value = reward_constraint_expected(occ, mdp.rewards(), table);
  result.late_drift = std::abs(best_at_late_start - (base_return - epsilon + phi));
  result.converged = result.late_drift <= options.drift_tolerance;
  result.final_step = step;
  result.perturbation = RewardPerturbation::from_rtilde(mdp.rewards(), std::move(table), Provenance::searched);
  return result;
}

RewardTable<double> sample_feasible_reward(Rng& rng, const TabularMDP& mdp, const OccupancyMeasure& occ,
                                           double epsilon, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<MatrixXd> delta(static_cast<std::size_t>(mdp.horizon()), MatrixXd(S, A));
  for (auto& d : delta)
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) d(s, a) = normal(rng);
  delta = onto_budget(occ, std::move(delta), epsilon);
  // Half the samples sit strictly inside the set.
  if (unit(rng) < 0.5) {
    const double slack = unit(rng) * scale / mdp.horizon();
    for (auto& d : delta) d.array() -= slack;
  }
  std::vector<MatrixXd> rtilde;
  for (const auto& d : delta) rtilde.push_back(mdp.rewards() - d);
  return RewardTable<double>(std::move(rtilde));
}

TemperatureMembership temperature_membership(const MatrixXd& r, const MatrixXd& rtilde, double alpha, double tol) {
  if (!(alpha > 0)) throw PreconditionError("temperature_membership: alpha must be > 0");
  if (r.rows() != rtilde.rows() || r.cols() != rtilde.cols()) throw ShapeError("temperature_membership: shapes differ");
  const MatrixXd u = (rtilde - r) / alpha;
  TemperatureMembership out;
  out.min_u = u.minCoeff();
  out.max_mass = (-u.array()).exp().rowwise().sum().maxCoeff();
  out.worst_slack = std::min(out.min_u, 1.0 - out.max_mass);
  out.member = out.min_u >= -tol && out.max_mass <= 1.0 + tol;
  return out;
}

}  // namespace maxent

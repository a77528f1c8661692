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

#include "maxent/dynamics_robustness.hpp"

#include "maxent/random_instances.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace maxent {
namespace {

void check_kernels(const TabularMDP& mdp, const Kernels& ptilde) {
  if (!ptilde.stationary() && ptilde.size() != mdp.horizon())
    throw ShapeError("adversarial dynamics need one kernel per step or a single kernel");
  for (const auto& kernel : ptilde.items()) {
    if (static_cast<int>(kernel.size()) != mdp.num_actions())
      throw ShapeError("adversarial dynamics need one matrix per action");
    for (const auto& m : kernel)
      if (m.rows() != mdp.num_states() || m.cols() != mdp.num_states())
        throw ShapeError("adversarial transition matrices must be S x S");
  }
}

// Entropy-regularized value with alpha = 1 under the given occupancy.
double maxent_value(const TabularMDP& mdp, const OccupancyMeasure& occ, const StochasticPolicy& policy,
                    const RewardTable<double>& rewards) {
  return expected_return(occ, rewards) + entropy_profile(mdp, occ, policy).policy_total;
}

}  // namespace

nlohmann::json to_json(const DynamicsRobustAudit& a) {
  return {{"lhs_log_return", a.lhs_log_return},
          {"return_under_ptilde", a.return_under_ptilde},
          {"maxent_under_ptilde", a.maxent_under_ptilde},
          {"pessimistic_value", a.pessimistic_value},
          {"divergence", a.divergence},
          {"rhs", a.rhs},
          {"gap", a.gap},
          {"epsilon_budget", a.epsilon_budget},
          {"entropy_witness", a.entropy_witness},
          {"theorem_form_rhs", a.theorem_form_rhs}};
}

PessimisticReward pessimistic_reward(const TabularMDP& mdp) {
  if (!mdp.positive_rewards())
    throw PreconditionError("pessimistic_reward: rewards must be strictly positive (log r is taken)");
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int T = mdp.horizon();
  const int stages = mdp.transitions().size();
  std::vector<MatrixXd> folded;
  std::vector<std::vector<MatrixXd>> full;
  for (int k = 0; k < stages; ++k) {
    MatrixXd rbar(S, A);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a)
        rbar(s, a) = std::log(mdp.rewards()(s, a)) / T + entropy(mdp.transition(k, a).row(s));
    std::vector<MatrixXd> per_action;
    for (int a = 0; a < A; ++a) per_action.push_back(rbar.col(a).replicate(1, S));
    folded.push_back(std::move(rbar));
    full.push_back(std::move(per_action));
  }
  return {RewardTable<double>(std::move(folded)), std::move(full)};
}

VectorXd divergence_terms(const TabularMDP& mdp, const Kernels& ptilde, int t) {
  check_kernels(mdp, ptilde);
  const int S = mdp.num_states();
  VectorXd out(S);
  for (int s = 0; s < S; ++s) {
    double z = 0;
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const MatrixXd& p = mdp.transition(t, a);
      const MatrixXd& q = ptilde.at(t)[static_cast<std::size_t>(a)];
      for (int sp = 0; sp < S; ++sp) {
        if (p(s, sp) <= 0) continue;
        if (q(s, sp) < kProbabilityFloor)
          throw PreconditionError(fmt::format(
              "p~(s'={} | s={}, a={}) at t={} is zero where p is positive; the divergence is infinite", sp, s, a,
              t));
        z += p(s, sp) / q(s, sp);
      }
    }
    out(s) = std::log(z);
  }
  return out;
}

double dynamics_divergence(const TabularMDP& mdp, const OccupancyMeasure& occ, const Kernels& ptilde) {
  double total = 0;
  for (int t = 0; t < mdp.horizon(); ++t) {
    const VectorXd terms = divergence_terms(mdp, ptilde, t);
    const VectorXd& rho = occ.states[static_cast<std::size_t>(t)];
    for (int s = 0; s < mdp.num_states(); ++s)
      if (rho(s) != 0) total += rho(s) * terms(s);
  }
  return total;
}

double dynamics_divergence(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde) {
  return dynamics_divergence(mdp, occupancy(mdp, policy), ptilde);
}

DynamicsPerturbation make_dynamics_perturbation(const TabularMDP& mdp, const StochasticPolicy& policy,
                                                Kernels ptilde, Provenance provenance) {
  const double d = dynamics_divergence(mdp, policy, ptilde);
  return {std::move(ptilde), d, provenance};
}

Kernels minimum_divergence_kernel(const TabularMDP& mdp) {
  std::vector<TransitionKernel<double>> out;
  for (const auto& kernel : mdp.transitions().items()) {
    TransitionKernel<double> k;
    for (const auto& m : kernel) {
      MatrixXd root = m.array().sqrt().matrix();
      for (Eigen::Index s = 0; s < root.rows(); ++s) root.row(s) /= root.row(s).sum();
      k.push_back(std::move(root));
    }
    out.push_back(std::move(k));
  }
  return Kernels(std::move(out));
}

EpsilonBudget epsilon_budget(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde) {
  check_kernels(mdp, ptilde);
  const auto occ = occupancy(mdp, policy);
  EpsilonBudget out;
  for (int t = 0; t < mdp.horizon(); ++t) {
    const VectorXd& rho = occ.states[static_cast<std::size_t>(t)];
    const MatrixXd& sa = occ.state_actions[static_cast<std::size_t>(t)];
    for (int s = 0; s < mdp.num_states(); ++s) {
      if (rho(s) == 0) continue;
      const double hpi = rho(s) * entropy(policy.at(t).row(s));
      out.entropy_witness += hpi;
      out.value += hpi;
      for (int a = 0; a < mdp.num_actions(); ++a)
        if (sa(s, a) != 0) out.value += sa(s, a) * entropy(ptilde.at(t)[static_cast<std::size_t>(a)].row(s));
    }
  }
  return out;
}

DynamicsRobustAudit proof_chain_audit(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde) {
  check_kernels(mdp, ptilde);
  if (!policy.full_support()) throw PreconditionError("proof_chain_audit: the policy needs full support");
  const auto rbar = pessimistic_reward(mdp);
  const auto occ = occupancy(mdp, policy);
  const TabularMDP perturbed = mdp.with_transitions(ptilde);
  const auto occ_tilde = occupancy(perturbed, policy);
  const RewardTable<double> r(mdp.rewards());

  DynamicsRobustAudit audit;
  audit.return_under_ptilde = expected_return(occ_tilde, r);
  audit.lhs_log_return = std::log(audit.return_under_ptilde);
  audit.maxent_under_ptilde = maxent_value(perturbed, occ_tilde, policy, r);
  audit.pessimistic_value = maxent_value(mdp, occ, policy, rbar.folded);
  audit.divergence = dynamics_divergence(mdp, occ, ptilde);
  audit.rhs = audit.pessimistic_value + std::log(static_cast<double>(mdp.horizon())) - audit.divergence;
  audit.gap = audit.lhs_log_return - audit.rhs;
  const auto eps = epsilon_budget(mdp, policy, ptilde);
  audit.epsilon_budget = eps.value;
  audit.entropy_witness = eps.entropy_witness;
  audit.theorem_form_rhs = std::exp(audit.pessimistic_value + std::log(static_cast<double>(mdp.horizon())));
  return audit;
}

DynamicsPerturbation optimal_dynamics_adversary(const TabularMDP& mdp, const StochasticPolicy& policy) {
  check_policy_shape(mdp, policy);
  if (!policy.full_support()) throw PreconditionError("optimal_dynamics_adversary: the policy needs full support");
  const int S = mdp.num_states();
  TransitionKernel<double> uniform(static_cast<std::size_t>(mdp.num_actions()),
                                   MatrixXd::Constant(S, S, 1.0 / S));
  return make_dynamics_perturbation(mdp, policy, Kernels(std::move(uniform)), Provenance::uniform_adversary);
}

double relaxed_dynamics_objective(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde) {
  check_kernels(mdp, ptilde);
  const auto occ = occupancy(mdp, policy);
  double total = 0;
  for (int t = 0; t < mdp.horizon(); ++t)
    for (int a = 0; a < mdp.num_actions(); ++a) {
      const MatrixXd& j = occ.joint[static_cast<std::size_t>(t)][static_cast<std::size_t>(a)];
      const MatrixXd& p = mdp.transition(t, a);
      const MatrixXd& q = ptilde.at(t)[static_cast<std::size_t>(a)];
      for (Eigen::Index s = 0; s < j.rows(); ++s)
        for (Eigen::Index sp = 0; sp < j.cols(); ++sp)
          if (j(s, sp) > 0) total += j(s, sp) * (std::log(q(s, sp)) - std::log(p(s, sp)));
    }
  return total + dynamics_divergence(mdp, occ, ptilde);
}

namespace {

// Depth-first walk over every trajectory with positive probability under `walk`.
void enumerate(const TabularMDP& walk, const StochasticPolicy& policy,
               const std::function<void(double prob, const std::vector<int>& states, const std::vector<int>& actions)>& visit,
               long max_trajectories) {
  const int T = walk.horizon();
  std::vector<int> states(static_cast<std::size_t>(T + 1)), actions(static_cast<std::size_t>(T));
  long count = 0;
  std::function<void(int, double)> step = [&](int t, double prob) {
    if (t == T) {
      if (++count > max_trajectories) throw PreconditionError("jensen_chain: too many trajectories to enumerate");
      visit(prob, states, actions);
      return;
    }
    const int s = states[static_cast<std::size_t>(t)];
    for (int a = 0; a < walk.num_actions(); ++a) {
      const double pa = policy.at(t)(s, a);
      if (pa <= 0) continue;
      actions[static_cast<std::size_t>(t)] = a;
      for (int sp = 0; sp < walk.num_states(); ++sp) {
        const double ps = walk.transition(t, a)(s, sp);
        if (ps <= 0) continue;
        states[static_cast<std::size_t>(t + 1)] = sp;
        step(t + 1, prob * pa * ps);
      }
    }
  };
  for (int s = 0; s < walk.num_states(); ++s) {
    if (walk.initial_dist()(s) <= 0) continue;
    states[0] = s;
    step(0, walk.initial_dist()(s));
  }
}

}  // namespace

JensenChain jensen_chain(const TabularMDP& mdp, const StochasticPolicy& policy, const Kernels& ptilde,
                         long max_trajectories) {
  check_kernels(mdp, ptilde);
  if (!mdp.positive_rewards()) throw PreconditionError("jensen_chain: rewards must be strictly positive");
  const int T = mdp.horizon();
  const double logT = std::log(static_cast<double>(T));
  const TabularMDP perturbed = mdp.with_transitions(ptilde);
  JensenChain out;
  out.lhs_log_return = std::log(expected_return(perturbed, policy));

  enumerate(mdp, policy,
            [&](double prob, const std::vector<int>& s, const std::vector<int>& a) {
              double total = 0, log_mean = 0, log_ratio = 0;
              for (int t = 0; t < T; ++t) {
                const auto st = static_cast<std::size_t>(t);
                const double r = mdp.rewards()(s[st], a[st]);
                total += r;
                log_mean += std::log(r) / T;
                log_ratio += std::log(ptilde.at(t)[static_cast<std::size_t>(a[st])](s[st], s[st + 1])) -
                             std::log(mdp.transition(t, a[st])(s[st], s[st + 1]));
              }
              out.importance_log_return += prob * (std::log(total) + log_ratio);
              out.averaged_log_reward += prob * (log_mean + log_ratio);
            },
            max_trajectories);
  out.averaged_log_reward += logT;

  enumerate(perturbed, policy,
            [&](double prob, const std::vector<int>& s, const std::vector<int>& a) {
              double total = 0;
              for (int t = 0; t < T; ++t)
                total += mdp.rewards()(s[static_cast<std::size_t>(t)], a[static_cast<std::size_t>(t)]);
              out.log_mean_reward_under_ptilde += prob * std::log(total / T);
            },
            max_trajectories);
  out.log_mean_reward_under_ptilde += logT;
  return out;
}

namespace {

struct SearchState {
  std::vector<TransitionKernel<double>> kernels;
};

// E_{p~,pi}[sum r] and its gradient with respect to every p~ entry.
double return_and_gradient(const TabularMDP& mdp, const StochasticPolicy& policy,
                           const std::vector<TransitionKernel<double>>& kernels,
                           std::vector<TransitionKernel<double>>& grad) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int T = mdp.horizon();
  const bool stationary = kernels.size() == 1;
  auto kernel_at = [&](int t) -> const TransitionKernel<double>& {
    return kernels[stationary ? 0 : static_cast<std::size_t>(t)];
  };
  // Backward policy evaluation under p~.
  std::vector<VectorXd> v(static_cast<std::size_t>(T + 1), VectorXd::Zero(S));
  for (int t = T - 1; t >= 0; --t) {
    MatrixXd q = mdp.rewards();
    for (int a = 0; a < A; ++a) q.col(a) += kernel_at(t)[static_cast<std::size_t>(a)] * v[static_cast<std::size_t>(t + 1)];
    v[static_cast<std::size_t>(t)] = q.cwiseProduct(policy.at(t)).rowwise().sum();
  }
  for (auto& k : grad)
    for (auto& m : k) m.setZero();
  VectorXd rho = mdp.initial_dist();
  for (int t = 0; t < T; ++t) {
    const MatrixXd sa = rho.asDiagonal() * policy.at(t);
    VectorXd next = VectorXd::Zero(S);
    auto& g = grad[stationary ? 0 : static_cast<std::size_t>(t)];
    for (int a = 0; a < A; ++a) {
      const MatrixXd& k = kernel_at(t)[static_cast<std::size_t>(a)];
      g[static_cast<std::size_t>(a)] += sa.col(a) * v[static_cast<std::size_t>(t + 1)].transpose();
      next += (sa.col(a).asDiagonal() * k).colwise().sum().transpose();
    }
    rho = std::move(next);
  }
  return mdp.initial_dist().dot(v.front());
}

// Divergence under the fixed (pi, p) occupancy and its gradient.
double divergence_and_gradient(const TabularMDP& mdp, const OccupancyMeasure& occ,
                               const std::vector<TransitionKernel<double>>& kernels,
                               std::vector<TransitionKernel<double>>& grad) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const bool stationary = kernels.size() == 1;
  for (auto& k : grad)
    for (auto& m : k) m.setZero();
  double total = 0;
  for (int t = 0; t < mdp.horizon(); ++t) {
    const auto& q = kernels[stationary ? 0 : static_cast<std::size_t>(t)];
    auto& g = grad[stationary ? 0 : static_cast<std::size_t>(t)];
    const VectorXd& rho = occ.states[static_cast<std::size_t>(t)];
    for (int s = 0; s < S; ++s) {
      if (rho(s) == 0) continue;
      double z = 0;
      for (int a = 0; a < A; ++a)
        for (int sp = 0; sp < S; ++sp) {
          const double p = mdp.transition(t, a)(s, sp);
          if (p > 0) z += p / q[static_cast<std::size_t>(a)](s, sp);
        }
      total += rho(s) * std::log(z);
      for (int a = 0; a < A; ++a)
        for (int sp = 0; sp < S; ++sp) {
          const double p = mdp.transition(t, a)(s, sp);
          const double qq = q[static_cast<std::size_t>(a)](s, sp);
          if (p > 0) g[static_cast<std::size_t>(a)](s, sp) -= rho(s) * p / (qq * qq * z);
        }
    }
  }
  return total;
}

void normalize_rows(std::vector<TransitionKernel<double>>& kernels) {
  for (auto& k : kernels)
    for (auto& m : k) {
      m = m.cwiseMax(kProbabilityFloor);
      for (Eigen::Index s = 0; s < m.rows(); ++s) m.row(s) /= m.row(s).sum();
    }
}

}  // namespace

DynamicsSearchResult adversary_search_dynamics(const TabularMDP& mdp, const StochasticPolicy& policy, double epsilon,
                                               const DynamicsSearchOptions& options) {
  check_policy_shape(mdp, policy);
  if (!mdp.positive_rewards()) throw PreconditionError("adversary_search_dynamics: rewards must be strictly positive");
  if (!policy.full_support()) throw PreconditionError("adversary_search_dynamics: the policy needs full support");
  const auto occ = occupancy(mdp, policy);
  const Kernels floor_kernel = minimum_divergence_kernel(mdp);
  const double floor = dynamics_divergence(mdp, occ, floor_kernel);
  if (epsilon < floor - 1e-12)
    throw PreconditionError(fmt::format(
        "adversary_search_dynamics: infeasible budget {} (no kernel has divergence below {})", epsilon, floor));

  Rng rng(options.seed);
  DynamicsSearchResult best;
  best.feasibility_floor = floor;
  best.achieved_return = std::numeric_limits<double>::infinity();
  std::vector<TransitionKernel<double>> best_kernels;
  double worst_drift = 0;
  double final_penalty = options.initial_penalty;

  for (int restart = 0; restart < std::max(1, options.restarts); ++restart) {
    std::vector<TransitionKernel<double>> kernels = floor_kernel.items();
    if (restart == 1) {
      kernels = mdp.transitions().items();
    } else if (restart > 1) {
      for (auto& k : kernels)
        for (auto& m : k)
          for (Eigen::Index s = 0; s < m.rows(); ++s)
            m.row(s) = 0.5 * m.row(s) + 0.5 * random_distribution(rng, static_cast<int>(m.cols())).transpose();
    }
    normalize_rows(kernels);
    auto grad_j = kernels;
    auto grad_d = kernels;
    double penalty = options.initial_penalty;
    double step = options.step;
    double run_best = std::numeric_limits<double>::infinity();
    double run_best_at_late = std::numeric_limits<double>::infinity();
    const int late_start = options.iterations - options.iterations / 10;

    for (int it = 0; it <= options.iterations; ++it) {
      if (it == late_start) run_best_at_late = run_best;
      const double j = return_and_gradient(mdp, policy, kernels, grad_j);
      const double d = divergence_and_gradient(mdp, occ, kernels, grad_d);
      const bool feasible = d <= epsilon;
      if (feasible && j < run_best) {
        run_best = j;
        if (j < best.achieved_return) {
          best.achieved_return = j;
          best.divergence = d;
          best_kernels = kernels;
        }
      }
      if (it == options.iterations) break;
      penalty = feasible ? std::max(options.initial_penalty * 1e-3, 0.9 * penalty) : 2.0 * penalty;
      double scale = 0;
      for (std::size_t k = 0; k < kernels.size(); ++k)
        for (std::size_t a = 0; a < kernels[k].size(); ++a) {
          grad_j[k][a] += penalty * grad_d[k][a];
          scale = std::max(scale, grad_j[k][a].cwiseAbs().maxCoeff());
        }
      if (scale <= 0) break;
      for (std::size_t k = 0; k < kernels.size(); ++k)
        for (std::size_t a = 0; a < kernels[k].size(); ++a)
          kernels[k][a] = kernels[k][a].cwiseProduct((-(step / scale) * grad_j[k][a]).array().exp().matrix());
      normalize_rows(kernels);
      step *= options.decay;
    }
    if (std::isfinite(run_best) && std::isfinite(run_best_at_late))
      worst_drift = std::max(worst_drift, std::abs(run_best_at_late - run_best));
    final_penalty = penalty;
  }

  if (best_kernels.empty()) {
    // The minimum-divergence kernel is feasible whenever the budget clears the floor.
    best_kernels = floor_kernel.items();
    best.divergence = floor;
    best.achieved_return = expected_return(mdp.with_transitions(floor_kernel), policy);
  }
  best.perturbation = {Kernels(std::move(best_kernels)), best.divergence, Provenance::searched};
  best.late_drift = worst_drift;
  best.converged = worst_drift <= options.drift_tolerance;
  best.final_penalty = final_penalty;
  return best;
}

CombinedRobustnessAudit combined_robustness_audit(const TabularMDP& mdp, const StochasticPolicy& policy,
                                                  const Kernels& ptilde, double epsilon_r) {
  CombinedRobustnessAudit out;
  out.dynamics = proof_chain_audit(mdp, policy, ptilde);
  out.epsilon_r = epsilon_r;
  const auto rtilde = worst_case_reward(mdp, policy, epsilon_r);
  out.perturbed_return = expected_return(occupancy(mdp.with_transitions(ptilde), policy), rtilde.rtilde);
  out.bound = out.dynamics.rhs - epsilon_r;
  out.gap = out.perturbed_return - out.bound;
  return out;
}

}  // namespace maxent

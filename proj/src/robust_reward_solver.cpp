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

#include "maxent/robust_reward_solver.hpp"

#include "maxent/random_instances.hpp"

#include <Eigen/Cholesky>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace maxent {
namespace {

Eigen::Index first_argmax(const VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

Eigen::Index first_argmin(const VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) < v(best)) best = i;
  return best;
}

void check_policy(const RewardEnsemble& ensemble, const VectorXd& policy) {
  if (policy.size() != ensemble.rows())
    throw ShapeError(fmt::format("policy has {} arms but the ensemble has {}", policy.size(), ensemble.rows()));
  if ((policy.array() < 0).any() || std::abs(policy.sum() - 1) > 1e-9)
    throw PreconditionError("policy must be a probability vector");
}

}  // namespace

void check_ensemble(const RewardEnsemble& ensemble) {
  if (ensemble.rows() < 1 || ensemble.cols() < 1)
    throw ShapeError("a reward ensemble needs at least one arm and one reward function");
  if (!ensemble.allFinite()) throw PreconditionError("reward ensemble entries must be finite");
}

MinimaxResult fictitious_play(const RewardEnsemble& m, int max_iters, double tol) {
  check_ensemble(m);
  if (max_iters < 1) throw PreconditionError("fictitious_play: max_iters must be at least 1");
  const Eigen::Index n = m.rows();
  const Eigen::Index k = m.cols();
  VectorXd arm_counts = VectorXd::Zero(n);
  VectorXd fn_counts = VectorXd::Zero(k);
  // Cumulative payoffs against the opponent's counts.
  VectorXd arm_payoff = VectorXd::Zero(n);  // M * fn_counts
  VectorXd fn_payoff = VectorXd::Zero(k);   // M^T * arm_counts

  // The adversary opens with a best response to the uniform policy.
  const Eigen::Index opening = first_argmin(m.colwise().mean().transpose());
  fn_counts(opening) += 1;
  arm_payoff += m.col(opening);

  // The returned pair is the best averaged strategy seen on each side.
  MinimaxResult out;
  out.lower = -std::numeric_limits<double>::infinity();
  out.upper = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iters; ++it) {
    const Eigen::Index a = first_argmax(arm_payoff);
    arm_counts(a) += 1;
    fn_payoff += m.row(a).transpose();
    const Eigen::Index i = first_argmin(fn_payoff);
    fn_counts(i) += 1;
    arm_payoff += m.col(i);

    out.iterations = it;
    const double lower = fn_payoff.minCoeff() / it;
    const double upper = arm_payoff.maxCoeff() / (it + 1);
    if (lower > out.lower) {
      out.lower = lower;
      out.policy = arm_counts / it;
    }
    if (upper < out.upper) {
      out.upper = upper;
      out.adversary = fn_counts / (it + 1);
    }
    out.exploitability = std::max(0.0, out.upper - out.lower);
    if (out.exploitability < tol) {
      out.converged = true;
      break;
    }
  }
  out.value = 0.5 * (out.lower + out.upper);
  return out;
}

MinimaxResult minimax(const RewardEnsemble& ensemble) { return fictitious_play(ensemble, 1'000'000, 1e-5); }

double minimax_value(const RewardEnsemble& ensemble) { return minimax(ensemble).value; }

double robust_value(const RewardEnsemble& ensemble, const VectorXd& policy) {
  check_ensemble(ensemble);
  check_policy(ensemble, policy);
  return (ensemble.transpose() * policy).minCoeff();
}

MaxEntConstruction maxent_construction(const VectorXd& minimax_policy, double floor) {
  MaxEntConstruction out;
  out.minimax_policy = minimax_policy;
  out.floor = floor;
  VectorXd floored = minimax_policy.cwiseMax(floor);
  out.floored_entries = static_cast<int>((minimax_policy.array() < floor).count());
  floored /= floored.sum();
  out.reward = floored.array().log().matrix();
  out.recovered = softmax(out.reward);
  out.total_variation = 0.5 * (out.recovered - minimax_policy).cwiseAbs().sum();
  out.degenerate_support = out.total_variation >= 1e-3;
  return out;
}

MaxEntConstruction maxent_construction(const RewardEnsemble& ensemble, double floor) {
  return maxent_construction(minimax(ensemble).policy, floor);
}

RewardSubproblemResult reward_subproblem(const RewardEnsemble& m, const VectorXd& policy) {
  check_ensemble(m);
  check_policy(m, policy);
  const Eigen::Index n = m.rows();
  const Eigen::Index k = m.cols();

  // g_i(r) = log sum_a exp(r(a) - r_i(a)) <= 0 is the constraint in log form.
  auto constraints = [&](const VectorXd& r) {
    VectorXd g(k);
    for (Eigen::Index i = 0; i < k; ++i) g(i) = log_sum_exp(r - m.col(i));
    return g;
  };
  auto barrier = [&](const VectorXd& r, double weight, double& value) {
    const VectorXd g = constraints(r);
    if ((g.array() >= 0).any()) return false;
    value = -weight * policy.dot(r) - (-g.array()).log().sum();
    return true;
  };

  // A uniform downward shift always restores feasibility.
  RewardSubproblemResult out;
  VectorXd r = VectorXd::Constant(n, m.minCoeff() - std::log(static_cast<double>(n)) - 1.0);
  for (double weight = 1.0; weight <= 1e6 * (1 + 1e-9); weight *= 10) {
    for (int step = 0; step < 200; ++step) {
      const VectorXd g = constraints(r);
      VectorXd grad = -weight * policy;
      MatrixXd hess = MatrixXd::Zero(n, n);
      for (Eigen::Index i = 0; i < k; ++i) {
        const VectorXd s = softmax(VectorXd(r - m.col(i)));
        const double slack = -g(i);
        grad += s / slack;
        hess += (MatrixXd(s.asDiagonal()) - s * s.transpose()) / slack + s * s.transpose() / (slack * slack);
      }
      hess.diagonal().array() += 1e-14;
      const VectorXd dir = -hess.ldlt().solve(grad);
      const double decrement = -grad.dot(dir);
      if (!(decrement > 2e-14)) break;
      double f0 = 0, f1 = 0;
      barrier(r, weight, f0);
      double t = 1.0;
      while (t > 1e-16 && !(barrier(r + t * dir, weight, f1) && f1 <= f0 - 0.25 * t * decrement)) t *= 0.5;
      if (t <= 1e-16) break;
      r += t * dir;
      ++out.newton_steps;
    }
  }
  out.reward = r;
  out.objective = policy.dot(r);
  out.max_constraint = constraints(r).array().exp().maxCoeff();
  return out;
}

LowerBoundResult lower_bound_maxent(const RewardEnsemble& ensemble, double oracle_value, int rounds) {
  check_ensemble(ensemble);
  if (rounds < 1) throw PreconditionError("lower_bound_maxent: rounds must be at least 1");
  LowerBoundResult best;
  best.robust_value = -std::numeric_limits<double>::infinity();
  best.oracle_value = oracle_value;
  VectorXd policy = VectorXd::Constant(ensemble.rows(), 1.0 / static_cast<double>(ensemble.rows()));
  int stale = 0;
  for (int round = 1; round <= rounds; ++round) {
    const auto sub = reward_subproblem(ensemble, policy);
    policy = softmax(sub.reward);
    const double value = robust_value(ensemble, policy);
    best.rounds = round;
    if (value > best.robust_value + 1e-12) {
      best.robust_value = value;
      best.reward = sub.reward;
      best.policy = policy;
      stale = 0;
    } else if (++stale >= 10) {
      break;
    }
  }
  best.normalized = best.robust_value / oracle_value;
  return best;
}

LowerBoundResult lower_bound_maxent(const RewardEnsemble& ensemble, int rounds) {
  return lower_bound_maxent(ensemble, minimax_value(ensemble), rounds);
}

Baselines baseline_policies(const RewardEnsemble& ensemble, double oracle_value) {
  check_ensemble(ensemble);
  const Eigen::Index n = ensemble.rows();
  const VectorXd pointwise = ensemble.rowwise().minCoeff();
  const double top = pointwise.maxCoeff();
  VectorXd tied = (pointwise.array() >= top - 1e-12).cast<double>().matrix();
  Baselines out;
  out.pointwise_min.policy = tied / tied.sum();
  out.uniform.policy = VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (BaselineResult* b : {&out.pointwise_min, &out.uniform}) {
    b->robust_value = robust_value(ensemble, b->policy);
    b->normalized = b->robust_value / oracle_value;
  }
  return out;
}

Baselines baseline_policies(const RewardEnsemble& ensemble) {
  return baseline_policies(ensemble, minimax_value(ensemble));
}

double Fig10Result::mean(const std::string& method) const {
  double total = 0;
  int count = 0;
  for (const auto& row : rows)
    if (row.method == method) {
      total += row.normalized_minimax;
      ++count;
    }
  return count ? total / count : std::numeric_limits<double>::quiet_NaN();
}

RewardEnsemble fig10_ensemble(std::uint64_t seed, int arms, int ensemble_size, double shift) {
  if (arms < 1 || ensemble_size < 1) throw ShapeError("fig10_ensemble: arms and ensemble_size must be positive");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RewardEnsemble m(arms, ensemble_size);
  for (int i = 0; i < ensemble_size; ++i)
    for (int a = 0; a < arms; ++a) m(a, i) = normal(rng);
  for (int i = 0; i < ensemble_size; ++i) m.col(i).array() += shift - m.col(i).minCoeff();
  return m;
}

std::vector<Fig10Row> fig10_problem(const RewardEnsemble& ensemble, int problem_id, int rounds,
                                    MinimaxResult* oracle) {
  const MinimaxResult fp = minimax(ensemble);
  if (oracle) *oracle = fp;
  const double v = fp.value;
  const auto lb = lower_bound_maxent(ensemble, v, rounds);
  const auto base = baseline_policies(ensemble, v);
  const double fp_raw = robust_value(ensemble, fp.policy);
  return {
      {problem_id, "fictitious_play", fp_raw / v, fp_raw, v, fp.iterations},
      {problem_id, "lower_bound_maxent", lb.normalized, lb.robust_value, v, lb.rounds},
      {problem_id, "pointwise_min", base.pointwise_min.normalized, base.pointwise_min.robust_value, v, 0},
      {problem_id, "uniform", base.uniform.normalized, base.uniform.robust_value, v, 0},
  };
}

Fig10Result fig10_experiment(const Fig10Config& config) {
  if (config.num_problems < 1) throw PreconditionError("fig10_experiment: num_problems must be positive");
  const auto count = static_cast<std::size_t>(config.num_problems);
  std::vector<std::vector<Fig10Row>> per_problem(count);
  Fig10Result out;
  out.ensembles.resize(count);
  out.oracles.resize(count);
  auto solve = [&](std::size_t p) {
    out.ensembles[p] = fig10_ensemble(config.seed + p, config.arms, config.ensemble_size, config.shift);
    per_problem[p] = fig10_problem(out.ensembles[p], static_cast<int>(p), config.rounds, &out.oracles[p]);
  };
  const auto jobs = static_cast<std::size_t>(std::max(1, config.jobs));
  if (jobs == 1) {
    for (std::size_t p = 0; p < count; ++p) solve(p);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < std::min(jobs, count); ++w)
      workers.emplace_back([&, w] {
        for (std::size_t p = w; p < count; p += jobs) solve(p);
      });
  }
  for (auto& rows : per_problem) out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  return out;
}

}  // namespace maxent

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

#include "test_support.hpp"

#include "maxent/random_instances.hpp"
#include "maxent/robust_reward_solver.hpp"
#include "maxent/solver.hpp"

#include <doctest.h>

using namespace maxent;

namespace {

RewardEnsemble pennies() { return MatrixXd::Identity(2, 2); }

RewardEnsemble random_game(Rng& rng, int arms, int k) {
  std::normal_distribution<double> normal(0, 1);
  RewardEnsemble m(arms, k);
  for (int a = 0; a < arms; ++a)
    for (int i = 0; i < k; ++i) m(a, i) = normal(rng);
  return m;
}

}  // namespace

TEST_CASE("ensemble validation") {
  CHECK_THROWS_AS(check_ensemble(MatrixXd(0, 3)), ShapeError);
  MatrixXd bad = MatrixXd::Ones(2, 2);
  bad(0, 0) = std::nan("");
  CHECK_THROWS(check_ensemble(bad));
  CHECK_NOTHROW(check_ensemble(pennies()));
}

TEST_CASE("fictitious play: matching pennies and single-column games") {
  const auto fp = fictitious_play(pennies(), 100000, 1e-3);
  CHECK(fp.converged);
  CHECK(fp.exploitability < 1e-3);
  CHECK(std::abs(fp.value - 0.5) < 1e-3);
  CHECK((fp.policy.array() - 0.5).abs().maxCoeff() < 1e-3);

  const auto one = minimax(MatrixXd((MatrixXd(2, 1) << 2.0, 1.0).finished()));
  CHECK(one.policy(0) == 1.0);
  CHECK(one.value == doctest::Approx(2.0));
  CHECK(minimax_value(MatrixXd::Constant(3, 4, 0.7)) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("fictitious play: random games against the support-enumeration oracle") {
  Rng rng(41);
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = random_game(rng, 5, 5);
    const auto fp = fictitious_play(m, 100000, 1e-3);
    CHECK(fp.exploitability < 1e-3);
    CHECK(fp.exploitability >= 0);
    // The reported interval brackets the value and its width is the exploitability.
    CHECK(fp.lower <= fp.value);
    CHECK(fp.value <= fp.upper);
    CHECK(std::abs((fp.upper - fp.lower) - fp.exploitability) < 1e-12);
    CHECK(std::abs(fp.lower - (m.transpose() * fp.policy).minCoeff()) < 1e-12);
    CHECK(std::abs(fp.upper - (m * fp.adversary).maxCoeff()) < 1e-12);
    CHECK(fp.value >= m.minCoeff());
    CHECK(fp.value <= m.maxCoeff());
    const auto exact = oracle::game_value(m);
    REQUIRE(exact.has_value());
    CHECK(std::abs(fp.value - *exact) < 2e-3);
    CHECK(std::abs(minimax_value(m) - *exact) < 1e-5);
  }
}

TEST_CASE("robust value is the worst ensemble member") {
  RewardEnsemble m(3, 2);
  m << 1, 0, 0, 2, 3, -1;
  VectorXd pi(3);
  pi << 0.2, 0.3, 0.5;
  CHECK(robust_value(m, pi) == doctest::Approx(std::min(0.2 + 1.5, 0.6 - 0.5)));
}

TEST_CASE("MaxEnt construction") {
  const auto c = maxent_construction(pennies());
  CHECK((c.reward.array() + std::log(2.0)).abs().maxCoeff() < 1e-3);
  CHECK(c.total_variation < 1e-3);
  CHECK_FALSE(c.degenerate_support);

  const auto k1 = maxent_construction(MatrixXd((MatrixXd(2, 1) << 2.0, 1.0).finished()));
  CHECK(k1.floored_entries == 1);
  CHECK(k1.total_variation < 1e-3);
  CHECK(k1.recovered(0) > 1 - 1e-8);
  CHECK_FALSE(k1.degenerate_support);
  // A floor too coarse to repair the support is flagged.
  CHECK(maxent_construction(VectorXd(VectorXd::Unit(3, 0)), 0.3).degenerate_support);

  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) CHECK(maxent_construction(random_game(rng, 5, 5)).total_variation < 1e-3);

  // On tabular MDPs, soft value iteration on r = log pi recovers pi.
  for (int rep = 0; rep < 10; ++rep) {
    const auto mdp = random_mdp(rng, 4, 3, 4);
    const auto target = random_policy(rng, 4, 3, 1, 1e-3);
    const MatrixXd logpi = target.at(0).array().log();
    const auto sol = soft_value_iteration(mdp.with_rewards(logpi), 1.0);
    for (int t = 0; t < 4; ++t) CHECK((sol.policy.at(t) - target.at(0)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("reward subproblem: worked value and feasibility") {
  const auto sub = reward_subproblem(pennies(), VectorXd::Constant(2, 0.5));
  const double c = -std::log(1 + std::exp(-1.0));
  CHECK(std::abs(sub.reward(0) - c) < 1e-3);
  CHECK(std::abs(sub.reward(1) - c) < 1e-3);
  CHECK(sub.max_constraint <= 1 + 1e-8);
  CHECK(std::abs(c - (-0.313262)) < 1e-6);

  Rng rng(43);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int rep = 0; rep < 20; ++rep) {
    const int k = 1 + rep % 4;
    const auto m = random_game(rng, 2, k);
    VectorXd pi(2);
    pi(0) = unit(rng);
    pi(1) = 1 - pi(0);
    const auto res = reward_subproblem(m, pi);
    for (int i = 0; i < k; ++i) CHECK(((res.reward - m.col(i)).array().exp().sum()) <= 1 + 1e-8);
    CHECK(std::abs(res.objective - pi.dot(res.reward)) < 1e-12);
    CHECK(std::abs(res.objective - oracle::two_arm_subproblem(m, pi)) < 1e-3);
  }
  for (int rep = 0; rep < 20; ++rep) {
    const auto m = random_game(rng, 5, 5);
    const auto res = reward_subproblem(m, random_distribution(rng, 5, 1.0, 0.01));
    CHECK(res.max_constraint <= 1 + 1e-8);
  }
}

TEST_CASE("reward subproblem: single function tilts toward the likelier arm") {
  const RewardEnsemble r1 = (MatrixXd(2, 1) << 2.0, 1.0).finished();
  VectorXd pi(2);
  pi << 0.7, 0.3;
  const auto res = reward_subproblem(r1, pi);
  // With one constraint the optimum is r = r1 + log pi.
  CHECK(std::abs(res.reward(0) - (2 + std::log(0.7))) < 1e-4);
  CHECK(std::abs(res.reward(1) - (1 + std::log(0.3))) < 1e-4);
  CHECK(std::abs(res.objective - oracle::two_arm_subproblem(r1, pi)) < 1e-4);
}

TEST_CASE("LowerBound+MaxEnt: validity and worked values") {
  const auto lb = lower_bound_maxent(pennies());
  CHECK((lb.policy.array() - 0.5).abs().maxCoeff() < 1e-6);
  CHECK(std::abs(lb.normalized - 1.0) < 1e-3);

  const auto k1 = lower_bound_maxent(MatrixXd((MatrixXd(2, 1) << 2.0, 1.0).finished()));
  CHECK(k1.normalized < 1.0);
  CHECK(k1.normalized > 0.5);

  Rng rng(44);
  for (int rep = 0; rep < 20; ++rep) {
    RewardEnsemble m = random_game(rng, 5, 5);
    for (int i = 0; i < 5; ++i) m.col(i).array() += 0.1 - m.col(i).minCoeff();
    const auto res = lower_bound_maxent(m);
    for (int i = 0; i < 5; ++i) CHECK(((res.reward - m.col(i)).array().exp().sum()) <= 1 + 1e-8);
    const double h = entropy(res.policy);
    CHECK(res.policy.dot(res.reward) + h <= robust_value(m, res.policy) + 1e-8);
    CHECK(std::abs(res.robust_value - robust_value(m, res.policy)) < 1e-12);
    CHECK(res.normalized <= 1.0 + 2e-3);
    CHECK(res.rounds >= 1);
  }
}

TEST_CASE("baselines") {
  const auto b = baseline_policies(pennies());
  CHECK((b.pointwise_min.policy.array() - 0.5).abs().maxCoeff() == 0.0);
  CHECK(b.pointwise_min.normalized == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(b.uniform.normalized == doctest::Approx(1.0).epsilon(1e-3));

  const auto k1 = baseline_policies(MatrixXd((MatrixXd(2, 1) << 2.0, 1.0).finished()));
  CHECK(k1.pointwise_min.policy(0) == 1.0);
  CHECK(k1.pointwise_min.normalized == doctest::Approx(1.0));
  CHECK(k1.uniform.normalized == doctest::Approx(0.75));
}

TEST_CASE("Fig 10 pipeline") {
  const auto e = fig10_ensemble(3, 5, 5, 0.1);
  CHECK(e.rows() == 5);
  for (int i = 0; i < 5; ++i) CHECK(e.col(i).minCoeff() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(fig10_ensemble(3, 5, 5, 0.1) == e);

  Fig10Config config;
  config.num_problems = 3;
  const auto a = fig10_experiment(config);
  config.jobs = 3;
  const auto b = fig10_experiment(config);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].method == b.rows[i].method);
    CHECK(a.rows[i].normalized_minimax == b.rows[i].normalized_minimax);
  }
  CHECK(a.rows.size() == 3 * fig10_methods().size());
  CHECK(std::abs(a.mean("fictitious_play") - 1.0) < 2e-3);

  // A single reward function: the oracle and pointwise-min are optimal, the entropic policies are not.
  config.ensemble_size = 1;
  config.jobs = 1;
  const auto single = fig10_experiment(config);
  CHECK(std::abs(single.mean("fictitious_play") - 1.0) < 2e-3);
  CHECK(std::abs(single.mean("pointwise_min") - 1.0) < 1e-9);
  CHECK(single.mean("uniform") < 1.0);
  CHECK(single.mean("lower_bound_maxent") < 1.0);

  // The two-arm fixture reproduces the worked values.
  const auto rows = fig10_problem(pennies(), 0, 50);
  for (const auto& row : rows) CHECK(std::abs(row.normalized_minimax - 1.0) < 1e-3);
}

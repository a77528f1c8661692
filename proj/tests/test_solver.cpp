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
#include "maxent/solver.hpp"

#include <doctest.h>

using namespace maxent;

namespace {

TabularMDP bandit(double r1, double r2) {
  MatrixXd r(1, 2);
  r << r1, r2;
  return TabularMDP(VectorXd::Ones(1), TransitionKernel<double>(2, MatrixXd::Ones(1, 1)), r, 1);
}

}  // namespace

TEST_CASE("soft value iteration on the two-armed bandit") {
  const auto sol = soft_value_iteration(bandit(2, 1), 1.0);
  const double e = std::exp(1.0);
  CHECK(sol.policy.at(0)(0, 0) == doctest::Approx(e / (1 + e)).epsilon(1e-14));
  CHECK(sol.values[0](0) == doctest::Approx(std::log(std::exp(2.0) + e)).epsilon(1e-14));
  CHECK(sol.values[1](0) == 0.0);
  // Grid search over the simplex at 1e-4 finds nothing better.
  double best = -1e9, best_p = 0;
  for (int k = 0; k <= 10000; ++k) {
    const double p = k / 10000.0;
    const double v = 2 * p + (1 - p) - oracle::plogp(p) - oracle::plogp(1 - p);
    if (v > best) best = v, best_p = p;
  }
  CHECK(std::abs(best_p - e / (1 + e)) < 1e-4);
  CHECK(best <= sol.values[0](0) + 1e-12);
}

TEST_CASE("soft value iteration: invariants of the returned solution") {
  Rng rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    const auto mdp = random_mdp(rng, 5, 3, 4);
    const double alpha = 0.3 + 0.1 * rep;
    const auto sol = soft_value_iteration(mdp, alpha);
    for (int t = 0; t < 4; ++t) {
      const auto st = static_cast<std::size_t>(t);
      const MatrixXd& q = sol.q_values[st];
      for (int s = 0; s < 5; ++s) {
        double z = 0;
        for (int a = 0; a < 3; ++a) z += std::exp(q(s, a) / alpha);
        CHECK(std::abs(sol.values[st](s) - alpha * std::log(z)) < 1e-12);
        CHECK(std::abs(sol.policy.at(t).row(s).sum() - 1) < 1e-10);
        for (int a = 0; a < 3; ++a)
          CHECK(std::abs(sol.policy.at(t)(s, a) - std::exp((q(s, a) - sol.values[st](s)) / alpha)) < 1e-12);
      }
    }
    CHECK(std::abs(sol.initial_value(mdp.initial_dist()) - oracle::value(mdp, sol.policy, alpha)) < 1e-9);
    // Optimality certificate against random policies.
    const double j = maxent_objective(mdp, sol.policy, alpha);
    for (int k = 0; k < 100; ++k)
      CHECK(maxent_objective(mdp, random_policy(rng, 5, 3, 4), alpha) <= j + 1e-9);
  }
}

TEST_CASE("soft optimum beats 10^4 random policies on a small MDP") {
  Rng rng(2);
  const auto mdp = random_mdp(rng, 2, 2, 2);
  const auto sol = soft_value_iteration(mdp, 1.0);
  const double j = sol.initial_value(mdp.initial_dist());
  for (int k = 0; k < 10000; ++k) CHECK(oracle::value(mdp, random_policy(rng, 2, 2, 2, 0.0), 1.0) <= j + 1e-9);
}

TEST_CASE("equal rewards give uniform soft policies and lowest-index greedy ties") {
  Rng rng(6);
  const auto mdp = random_mdp(rng, 3, 4, 3).with_rewards(MatrixXd::Constant(3, 4, 0.7));
  const auto soft = soft_value_iteration(mdp, 0.5);
  for (int t = 0; t < 3; ++t) CHECK((soft.policy.at(t).array() - 0.25).abs().maxCoeff() < 1e-14);
  const auto greedy = greedy_value_iteration(mdp);
  for (int t = 0; t < 3; ++t) {
    CHECK(greedy.policy.at(t).col(0).minCoeff() == 1.0);
    CHECK(greedy.policy.at(t).rightCols(3).maxCoeff() == 0.0);
  }
  CHECK(greedy.ties == 9);
}

TEST_CASE("greedy value iteration: bandit, value consistency and dominance") {
  const auto b = greedy_value_iteration(bandit(2, 1));
  CHECK(b.policy.at(0)(0, 0) == 1.0);
  CHECK(b.values[0](0) == 2.0);

  Rng rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    const auto mdp = random_mdp(rng, 5, 3, 4);
    const auto g = greedy_value_iteration(mdp);
    const double v = g.initial_value(mdp.initial_dist());
    CHECK(std::abs(v - expected_return(mdp, g.policy)) < 1e-12);
    for (int k = 0; k < 50; ++k) CHECK(expected_return(mdp, random_policy(rng, 5, 3, 4)) <= v + 1e-9);
    const auto soft = soft_value_iteration(mdp, 1e-6);
    CHECK(std::abs(expected_return(mdp, soft.policy) - v) < 1e-3);
  }
}

TEST_CASE("soft policies approach the greedy policy as alpha shrinks") {
  Rng rng(23);
  const auto mdp = random_mdp(rng, 4, 3, 3);
  const auto g = greedy_value_iteration(mdp);
  REQUIRE(g.ties == 0);
  double previous = 1e9;
  for (const double alpha : {1.0, 0.1, 0.01, 0.001}) {
    const auto s = soft_value_iteration(mdp, alpha);
    double dist = 0;
    for (int t = 0; t < 3; ++t) dist = std::max(dist, (s.policy.at(t) - g.policy.at(t)).cwiseAbs().maxCoeff());
    CHECK(dist <= previous + 1e-15);
    previous = dist;
  }
  CHECK(std::abs(expected_return(mdp, soft_value_iteration(mdp, 1e-3).policy) - expected_return(mdp, g.policy)) < 1e-2);
}

TEST_CASE("soft value iteration rejects nonpositive alpha and survives large rewards") {
  CHECK_THROWS_AS(soft_value_iteration(bandit(1, 0), 0.0), PreconditionError);
  const auto sol = soft_value_iteration(bandit(800, 0), 1.0);
  CHECK(std::isfinite(sol.values[0](0)));
  CHECK(sol.policy.at(0)(0, 0) == 1.0);
}

TEST_CASE("the solver is templated on the scalar type") {
  BasicTabularMDP<float> mdp(Vector<float>::Ones(1), TransitionKernel<float>(2, Matrix<float>::Ones(1, 1)),
                             (Matrix<float>(1, 2) << 2.f, 1.f).finished(), 1);
  const auto sol = soft_value_iteration(mdp, 1.0f);
  CHECK(sol.values[0](0) == doctest::Approx(2.313262f).epsilon(1e-6));
  const auto ld = soft_value_iteration(
      BasicTabularMDP<long double>(Vector<long double>::Ones(1),
                                   TransitionKernel<long double>(2, Matrix<long double>::Ones(1, 1)),
                                   (Matrix<long double>(1, 2) << 2, 1).finished(), 1),
      1.0L);
  CHECK(static_cast<double>(ld.values[0](0)) == doctest::Approx(std::log(std::exp(2.0) + std::exp(1.0))));
}

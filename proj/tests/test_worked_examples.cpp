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
#include "maxent/worked_examples.hpp"

#include <doctest.h>

#include <numbers>

using namespace maxent;

TEST_CASE("Simpson quadrature") {
  CHECK(simpson([](double x) { return x * x * x - 2 * x + 1; }, -1, 2, 2) == doctest::Approx(3.75 - 3 + 3));
  CHECK(std::abs(simpson([](double x) { return std::exp(-x * x); }, -8, 8, 1024) - std::sqrt(std::numbers::pi)) <
        1e-12);
  CHECK_THROWS_AS(simpson([](double x) { return x; }, 0, 1, 3), PreconditionError);
  // Triangle {0 <= y <= x <= 1} of x y has integral 1/8.
  CHECK(simpson_2d([](double x, double y) { return x * y; }, 0, 1,
                   [](double x) { return std::array<double, 2>{0.0, x}; }, 8, 8) == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("Fig 2: worked points") {
  const double ln2 = std::log(2.0);
  const auto half = fig2_evaluate(0.0, 0.5);
  CHECK(half.maxent_value == doctest::Approx(1.5 + ln2).epsilon(1e-14));
  CHECK(std::abs(half.robust_value - (1.5 + ln2)) < 1e-9);
  CHECK(std::abs(fig2_evaluate(1.0, 0.5).robust_value - (0.5 + ln2)) < 1e-9);
  for (const double eps : {0.0, 0.5, 1.0}) {
    for (const double t : {0.1, 0.5, 0.9}) {
      const auto b = fig2_boundary_point(eps, t);
      CHECK(std::abs(std::log(std::exp(2 - b[0]) + std::exp(1 - b[1])) - eps) < 1e-12);
    }
  }
}

TEST_CASE("Fig 2: the robust curve is the MaxEnt curve shifted by epsilon") {
  for (const double eps : {0.0, 0.5, 1.0}) {
    const auto curves = fig2_curves(eps);
    CHECK(curves.interior.size() == 101);
    CHECK(curves.boundary.size() == 201);
    for (const auto& pt : curves.interior) {
      CHECK(std::abs(pt.robust_value - (pt.maxent_value - eps)) < 1e-6);
      CHECK(pt.shifted_maxent == doctest::Approx(pt.maxent_value - eps).epsilon(1e-15));
      // No sampled boundary point undercuts the minimum.
      for (const auto& b : curves.boundary) CHECK(pt.p * b[0] + (1 - pt.p) * b[1] >= pt.robust_value - 1e-9);
    }
    REQUIRE(curves.endpoints.size() == 2);
    CHECK(std::abs(curves.endpoints[1].robust_value - (curves.endpoints[1].maxent_value - eps)) < 1e-6);
    CHECK(curves.endpoints[1].maxent_value == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("Gaussian reward penalty") {
  const double half_log_2pi = 0.5 * std::log(2 * std::numbers::pi);
  for (const double da : {0.0, 0.5, 1.0, 2.0}) {
    const auto g = reward_penalty_gaussian(da);
    CHECK(std::abs(g.quadrature - g.exact_truncated) < 1e-9);
    CHECK(std::abs(g.exact_untruncated - (da * da + half_log_2pi)) < 1e-15);
    CHECK(std::abs(g.exact_truncated - g.exact_untruncated) <= g.spec.truncation_bound + 1e-15);
    CHECK(g.closed_form == doctest::Approx(da * da + half_log_2pi + std::log(20.0)).epsilon(1e-15));
    CHECK_FALSE(g.spec.margin_warning);
  }
  CHECK(reward_penalty_gaussian(0).closed_form == doctest::Approx(3.9146708).epsilon(1e-8));
  CHECK(reward_penalty_gaussian(0).exact_untruncated == doctest::Approx(0.918939).epsilon(1e-6));
  CHECK(reward_penalty_gaussian(7.0).spec.margin_warning);
  double previous = -1e9;
  for (double da = 0; da <= 3; da += 0.25) {
    const double q = reward_penalty_gaussian(da).quadrature;
    CHECK(q > previous);
    previous = q;
  }
}

TEST_CASE("reward budget inversion") {
  const auto inv = reward_budget_inversion(10.0, 2);
  REQUIRE(inv.feasible);
  CHECK(std::abs(inv.analytic - inv.bisection) < 1e-9);
  CHECK(reward_penalty_gaussian(inv.analytic).closed_form == doctest::Approx(5.0).epsilon(1e-12));
  // Quadrupling the slack doubles the perturbation.
  const double slack = 5.0 - reward_penalty_gaussian(0).closed_form;
  const auto wider = reward_budget_inversion(2 * (reward_penalty_gaussian(0).closed_form + 4 * slack), 2);
  CHECK(wider.analytic == doctest::Approx(2 * inv.analytic).epsilon(1e-12));
  CHECK_FALSE(reward_budget_inversion(1.0, 2).feasible);
}

TEST_CASE("Gaussian dynamics penalty") {
  for (const double beta : {0.0, 1.0, 2.0}) {
    const auto g = dynamics_penalty_gaussian(beta);
    CHECK(std::abs(g.quadrature - g.exact_truncated) < 1e-4);
    CHECK(g.closed_form ==
          doctest::Approx(0.5 * beta * beta + std::log(8 * std::sqrt(std::numbers::pi)) + std::log(20.0)).epsilon(1e-15));
  }
  CHECK(dynamics_penalty_gaussian(0).closed_form == doctest::Approx(5.6475388).epsilon(1e-8));
  CHECK(dynamics_penalty_gaussian(0).exact_untruncated == doctest::Approx(4.607818).epsilon(1e-6));
  double previous = -1e9;
  for (double beta = 0; beta <= 3; beta += 0.5) {
    const double q = dynamics_penalty_gaussian(beta).quadrature;
    CHECK(q > previous);
    previous = q;
  }
  CHECK(dynamics_budget_feasible(0.0, 6.0));
  CHECK_FALSE(dynamics_budget_feasible(2.0, 6.0));
}

TEST_CASE("equal-variance dynamics penalty grows without a limit") {
  const auto growth = equal_variance_penalty_growth(1.0, {2, 4, 8, 16, 32});
  for (std::size_t i = 1; i < growth.size(); ++i) CHECK(growth[i] > growth[i - 1] + 0.5);
}

TEST_CASE("temperature boundary curves and nesting") {
  const auto curves = temperature_boundary_curves({2, 1}, {0.5, 1, 2}, 99);
  REQUIRE(curves.size() == 3);
  const auto& mid = curves[1].points[49];
  CHECK(mid[0] == doctest::Approx(2 + std::log(2.0)).epsilon(1e-14));
  CHECK(mid[1] == doctest::Approx(1 + std::log(2.0)).epsilon(1e-14));
  const MatrixXd r = (MatrixXd(1, 2) << 2.0, 1.0).finished();
  for (std::size_t hi = 0; hi < curves.size(); ++hi)
    for (const auto& pt : curves[hi].points) {
      const MatrixXd rt = (MatrixXd(1, 2) << pt[0], pt[1]).finished();
      CHECK(std::abs(temperature_membership(r, rt, curves[hi].alpha, 1e-12).max_mass - 1) < 1e-12);
      for (std::size_t lo = 0; lo < hi; ++lo) CHECK(temperature_membership(r, rt, curves[lo].alpha).member);
    }
  CHECK_THROWS_AS(temperature_boundary_curves({2, 1}, {0.0}, 3), PreconditionError);
}

TEST_CASE("linear-Gaussian pessimistic reward") {
  CHECK(linear_gaussian_pessimistic_reward(std::exp(1.0), 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(linear_gaussian_pessimistic_reward(0.0, 2), PreconditionError);
}

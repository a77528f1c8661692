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

// Closed-form examples: the two-armed bandit robust set, the Gaussian reward
// and dynamics penalties checked by Simpson quadrature, and the boundaries of
// the temperature-indexed reward sets.

#pragma once

#include "maxent/types.hpp"

#include <array>
#include <functional>
#include <vector>

namespace maxent {

/// Composite Simpson rule on [lo, hi]; `panels` is rounded up to an even count.
double simpson(const std::function<double(double)>& f, double lo, double hi, int panels);

/// Tensor-product Simpson rule; the inner bounds may depend on the outer variable.
double simpson_2d(const std::function<double(double, double)>& f, double lo, double hi,
                  const std::function<std::array<double, 2>(double)>& inner_bounds, int outer_panels,
                  int inner_panels);

struct QuadratureSpec {
  double lo = -10;
  double hi = 10;
  int panels = 4096;
  /// Relative mass of the integrand outside the window (bounds the log error).
  double truncation_bound = 0;
  bool margin_warning = false;
};

// ---- two-armed bandit with r = (2, 1) ----

struct Fig2Point {
  double p = 0;             ///< probability of arm 1
  double maxent_value = 0;  ///< 2p + (1 - p) + H(p)
  double robust_value = 0;  ///< min over the boundary, found numerically
  double shifted_maxent = 0;  ///< maxent_value - epsilon
  double adversary_t = 0;   ///< boundary parameter of the minimizer
};

struct Fig2Curves {
  double epsilon = 0;
  /// Boundary of {r~ : log(exp(2 - r~1) + exp(1 - r~2)) <= epsilon}.
  std::vector<std::array<double, 2>> boundary;
  /// Policies p = k / (n + 1), k = 1..n.
  std::vector<Fig2Point> interior;
  /// p = 0 and p = 1 evaluated with the policy floored at 1e-9.
  std::vector<Fig2Point> endpoints;
};

/// Boundary point at parameter t in (0, 1): exp(2 - r~1) = t e^eps, exp(1 - r~2) = (1 - t) e^eps.
std::array<double, 2> fig2_boundary_point(double epsilon, double t);

/// min over boundary points of p r~1 + (1 - p) r~2 by golden-section search on t.
Fig2Point fig2_evaluate(double epsilon, double p);

Fig2Curves fig2_curves(double epsilon, int policy_points = 101, int boundary_points = 201);

// ---- Gaussian reward penalty ----

struct GaussianPenalty {
  double closed_form = 0;      ///< the reference closed form
  double quadrature = 0;       ///< log of the Simpson integral over the window
  double exact_truncated = 0;  ///< log of the same integral via erf
  double exact_untruncated = 0;
  QuadratureSpec spec;
};

/// log of the integral of exp(-(a - a*)^2 + (a - (a* + da))^2 / 2) over the action bounds.
/// closed_form = da^2 + log(2 pi) / 2 + log 20.
GaussianPenalty reward_penalty_gaussian(double delta_a, double a_star = 0, double lo = -10, double hi = 10,
                                        int panels = 4096);

struct BudgetInversion {
  double analytic = 0;   ///< sqrt(eps / T - log(2 pi) / 2 - log 20); NaN when negative
  double bisection = 0;  ///< largest da with closed_form <= eps / T, by bisection
  bool feasible = false;
};

BudgetInversion reward_budget_inversion(double epsilon, int horizon);

// ---- Gaussian dynamics penalty ----

/// log of the double integral of p / p~ over a in the action bounds and s' in a
/// window of +-8 sigma~ around the integrand's peak, for p = N(a, 1) and
/// p~ = N(a + beta, sd sqrt 2) at s = 0, A = B = 1.
/// closed_form = beta^2 / 2 + log(8 sqrt(pi)) + log 20.
GaussianPenalty dynamics_penalty_gaussian(double beta, double lo = -10, double hi = 10, int panels = 1024);

/// The log-integral with equal unit variances over s' windows of the given half-widths.
std::vector<double> equal_variance_penalty_growth(double beta, const std::vector<double>& half_widths,
                                                  double lo = -10, double hi = 10, int panels = 1024);

/// closed_form penalty <= epsilon.
bool dynamics_budget_feasible(double beta, double epsilon);

// ---- temperatures ----

struct TemperatureCurve {
  double alpha = 0;
  std::vector<std::array<double, 2>> points;  ///< r + alpha u with sum exp(-u) = 1
};

std::vector<TemperatureCurve> temperature_boundary_curves(const std::array<double, 2>& r,
                                                          const std::vector<double>& alphas, int samples);

/// (2 / T) log ||s||.
double linear_gaussian_pessimistic_reward(double state_norm, int horizon);

}  // namespace maxent

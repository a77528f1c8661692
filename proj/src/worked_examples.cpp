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

#include "maxent/worked_examples.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace maxent {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEndpointFloor = 1e-9;

double binary_entropy(double p) {
  double h = 0;
  if (p > 0) h -= p * std::log(p);
  if (p < 1) h -= (1 - p) * std::log(1 - p);
  return h;
}

// Minimizer of a unimodal function on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi, int iterations = 200) {
  const double ratio = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iterations && hi - lo > 1e-15; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

// Mass of a unit-rate Gaussian N(c, sd^2) outside [lo, hi].
double gaussian_tail(double c, double sd, double lo, double hi) {
  return 0.5 * std::erfc((hi - c) / (sd * std::numbers::sqrt2)) + 0.5 * std::erfc((c - lo) / (sd * std::numbers::sqrt2));
}

double reward_closed_form(double delta_a) { return delta_a * delta_a + 0.5 * std::log(2 * kPi) + std::log(20.0); }

double dynamics_closed_form(double beta) {
  return 0.5 * beta * beta + std::log(8 * std::sqrt(kPi)) + std::log(20.0);
}

}  // namespace

double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
  if (panels < 2 || panels % 2 != 0) throw PreconditionError("simpson: the panel count must be even and >= 2");
  const double h = (hi - lo) / panels;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return acc * h / 3;
}

double simpson_2d(const std::function<double(double, double)>& f, double lo, double hi,
                  const std::function<std::array<double, 2>(double)>& inner_bounds, int outer_panels,
                  int inner_panels) {
  return simpson(
      [&](double x) {
        const auto [a, b] = inner_bounds(x);
        return simpson([&](double y) { return f(x, y); }, a, b, inner_panels);
      },
      lo, hi, outer_panels);
}

std::array<double, 2> fig2_boundary_point(double epsilon, double t) {
  return {2 - epsilon - std::log(t), 1 - epsilon - std::log1p(-t)};
}

Fig2Point fig2_evaluate(double epsilon, double p) {
  Fig2Point out;
  out.p = p;
  out.maxent_value = 2 * p + (1 - p) + binary_entropy(p);
  out.shifted_maxent = out.maxent_value - epsilon;
  const double q = std::clamp(p, kEndpointFloor, 1 - kEndpointFloor);
  auto objective = [&](double t) {
    const auto r = fig2_boundary_point(epsilon, t);
    return q * r[0] + (1 - q) * r[1];
  };
  out.adversary_t = golden_section(objective, 1e-15, 1 - 1e-15);
  out.robust_value = objective(out.adversary_t);
  return out;
}

Fig2Curves fig2_curves(double epsilon, int policy_points, int boundary_points) {
  if (policy_points < 2 || boundary_points < 2) throw PreconditionError("fig2_curves: need at least two grid points");
  Fig2Curves out;
  out.epsilon = epsilon;
  for (int k = 1; k <= boundary_points; ++k)
    out.boundary.push_back(fig2_boundary_point(epsilon, static_cast<double>(k) / (boundary_points + 1)));
  for (int k = 1; k <= policy_points; ++k)
    out.interior.push_back(fig2_evaluate(epsilon, static_cast<double>(k) / (policy_points + 1)));
  out.endpoints = {fig2_evaluate(epsilon, 0.0), fig2_evaluate(epsilon, 1.0)};
  return out;
}

GaussianPenalty reward_penalty_gaussian(double delta_a, double a_star, double lo, double hi, int panels) {
  if (!(hi > lo)) throw PreconditionError("reward_penalty_gaussian: empty action interval");
  GaussianPenalty out;
  out.closed_form = reward_closed_form(delta_a);
  out.spec = {lo, hi, panels + (panels % 2), 0, false};
  // The exponent completes to delta_a^2 - (a - c)^2 / 2 with c = a* - delta_a.
  const double c = a_star - delta_a;
  const double margin = std::min({a_star - lo, hi - a_star, a_star + delta_a - lo, hi - a_star - delta_a, c - lo, hi - c});
  out.spec.margin_warning = margin < 4;
  const double tail = gaussian_tail(c, 1, lo, hi);
  out.spec.truncation_bound = -std::log1p(-std::min(tail, 1 - 1e-300));
  const double q = simpson(
      [&](double a) {
        return std::exp(-(a - a_star) * (a - a_star) + 0.5 * (a - a_star - delta_a) * (a - a_star - delta_a) -
                        delta_a * delta_a);
      },
      lo, hi, panels);
  out.quadrature = delta_a * delta_a + std::log(q);
  out.exact_untruncated = delta_a * delta_a + 0.5 * std::log(2 * kPi);
  out.exact_truncated = out.exact_untruncated + std::log1p(-tail);
  return out;
}

BudgetInversion reward_budget_inversion(double epsilon, int horizon) {
  if (horizon < 1) throw PreconditionError("reward_budget_inversion: horizon must be positive");
  BudgetInversion out;
  const double per_step = epsilon / horizon;
  const double base = reward_closed_form(0);
  out.feasible = per_step >= base;
  if (!out.feasible) {
    out.analytic = out.bisection = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.analytic = std::sqrt(per_step - base);
  double lo = 0, hi = 1;
  while (reward_closed_form(hi) <= per_step) hi *= 2;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (reward_closed_form(mid) <= per_step ? lo : hi) = mid;
  }
  out.bisection = lo;
  return out;
}

GaussianPenalty dynamics_penalty_gaussian(double beta, double lo, double hi, int panels) {
  if (!(hi > lo)) throw PreconditionError("dynamics_penalty_gaussian: empty action interval");
  GaussianPenalty out;
  out.closed_form = dynamics_closed_form(beta);
  out.spec = {lo, hi, panels + (panels % 2), 0, false};
  // p / p~ = sqrt 2 exp(beta^2 / 2 - (s' - a + beta)^2 / 4); the window is centered on the peak.
  const double sd = std::numbers::sqrt2;
  const double half = 8 * sd;
  const double tail = std::erfc(half / 2);
  out.spec.truncation_bound = -std::log1p(-tail);
  const double q = simpson_2d(
      [&](double a, double s) {
        const double y = s - a;
        return sd * std::exp(-0.5 * y * y + 0.25 * (y - beta) * (y - beta) - 0.5 * beta * beta);
      },
      lo, hi, [&](double a) { return std::array<double, 2>{a - beta - half, a - beta + half}; }, panels, panels);
  out.quadrature = 0.5 * beta * beta + std::log(q);
  out.exact_untruncated = 0.5 * beta * beta + std::log(sd * 2 * std::sqrt(kPi) * (hi - lo));
  out.exact_truncated = out.exact_untruncated + std::log1p(-tail);
  return out;
}

std::vector<double> equal_variance_penalty_growth(double beta, const std::vector<double>& half_widths, double lo,
                                                  double hi, int panels) {
  std::vector<double> out;
  for (const double w : half_widths) {
    const double q = simpson_2d([&](double a, double s) { return std::exp(-(s - a) * beta + 0.5 * beta * beta); }, lo,
                                hi, [&](double a) { return std::array<double, 2>{a - w, a + w}; }, panels, panels);
    out.push_back(std::log(q));
  }
  return out;
}

bool dynamics_budget_feasible(double beta, double epsilon) { return dynamics_closed_form(beta) <= epsilon; }

std::vector<TemperatureCurve> temperature_boundary_curves(const std::array<double, 2>& r,
                                                          const std::vector<double>& alphas, int samples) {
  if (samples < 1) throw PreconditionError("temperature_boundary_curves: samples must be positive");
  std::vector<TemperatureCurve> out;
  for (const double alpha : alphas) {
    if (!(alpha > 0)) throw PreconditionError("temperature_boundary_curves: alphas must be positive");
    TemperatureCurve curve{alpha, {}};
    for (int k = 1; k <= samples; ++k) {
      const double t = static_cast<double>(k) / (samples + 1);
      curve.points.push_back({r[0] - alpha * std::log(t), r[1] - alpha * std::log1p(-t)});
    }
    out.push_back(std::move(curve));
  }
  return out;
}

double linear_gaussian_pessimistic_reward(double state_norm, int horizon) {
  if (!(state_norm > 0) || horizon < 1)
    throw PreconditionError("linear_gaussian_pessimistic_reward: need a positive norm and horizon");
  return 2.0 / horizon * std::log(state_norm);
}

}  // namespace maxent

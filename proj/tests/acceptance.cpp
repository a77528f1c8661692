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

// Acceptance suite: one PASS/FAIL line per criterion.

#include "test_support.hpp"

#include "maxent/dynamics_robustness.hpp"
#include "maxent/gridworld.hpp"
#include "maxent/random_instances.hpp"
#include "maxent/reward_robustness.hpp"
#include "maxent/robust_reward_solver.hpp"
#include "maxent/solver.hpp"
#include "maxent/worked_examples.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <functional>
#include <map>
#include <numbers>

using namespace maxent;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Instance {
  TabularMDP mdp;
  StochasticPolicy policy;
};

// |S| <= 6, |A| <= 4, T <= 5 with a full-support random policy.
Instance random_instance(std::uint64_t seed, bool positive) {
  Rng rng(seed);
  std::uniform_int_distribution<int> states(2, 6), actions(2, 4), horizon(1, 5);
  const int S = states(rng), A = actions(rng), T = horizon(rng);
  RandomMdpOptions options;
  if (positive) {
    options.reward_low = 0.1;
    options.reward_high = 2.0;
    options.min_transition = 1e-3;
  }
  auto mdp = random_mdp(rng, S, A, T, options);
  auto policy = random_policy(rng, S, A, T, 1e-3);
  return {std::move(mdp), std::move(policy)};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Outcome criterion1(std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  double worst_search = 0, worst_analytic = 0, worst_sample = 1e300;
  int failures = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto [mdp, pi] = random_instance(derive_seed(seed, i), false);
    const double j = oracle::value(mdp, pi, 1.0);
    const auto occ = occupancy(mdp, pi);
    Rng rng(derive_seed(seed ^ 0x5a5a, i));
    for (const double eps : {0.0, 0.5, 1.0}) {
      const auto search = adversary_search_reward(mdp, pi, eps);
      const double search_err = std::abs(search.value - (j - eps));
      worst_search = std::max(worst_search, search_err);
      const auto analytic = audit_reward(mdp, pi, worst_case_reward(mdp, pi, eps).rtilde, eps);
      const double analytic_err =
          std::max(std::abs(analytic.adversarial_return - (j - eps)), std::abs(analytic.constraint_value - eps));
      worst_analytic = std::max(worst_analytic, analytic_err);
      if (search_err > 1e-3 || search.constraint_value > eps + 1e-9 || analytic_err > 1e-10) ++failures;
      for (int k = 0; k < 1000; ++k) {
        const auto r = sample_feasible_reward(rng, mdp, occ, eps);
        if (reward_constraint_expected(occ, mdp.rewards(), r) > eps + 1e-12) continue;
        const double margin = expected_return(occ, r) - (j - eps);
        worst_sample = std::min(worst_sample, margin);
        if (margin < -1e-9) ++failures;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed < 120,
          fmt::format("search max |err| {:.2e} (tol 1e-3), analytic max |err| {:.2e} (tol 1e-10), "
                      "min sampled margin {:.2e} (tol -1e-9), {:.1f}s (limit 120s)",
                      worst_search, worst_analytic, worst_sample, elapsed)};
}

TabularMDP m1() {
  return TabularMDP(VectorXd::Constant(2, 0.5), TransitionKernel<double>(2, MatrixXd::Constant(2, 2, 0.5)),
                    MatrixXd::Ones(2, 2), 2);
}

Outcome criterion2(std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  long violations = 0;
  double worst = 1e300;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto [mdp, pi] = random_instance(derive_seed(seed, i), true);
    Rng rng(derive_seed(seed ^ 0xd1d1, i));
    for (int k = 0; k < 1000; ++k) {
      const Kernels q(random_kernel_perturbation(rng, mdp, 1.0));
      const double gap = proof_chain_audit(mdp, pi, q).gap;
      worst = std::min(worst, gap);
      if (gap < -1e-9) ++violations;
    }
  }
  const auto m = m1();
  const auto audit = proof_chain_audit(m, StochasticPolicy::uniform(2, 2), m.transitions());
  const double ln2 = std::log(2.0);
  const bool tight = std::abs(audit.gap) < 1e-9 && std::abs(audit.lhs_log_return - ln2) < 1e-12 &&
                     std::abs(audit.rhs - ln2) < 1e-12;
  const double elapsed = seconds_since(start);
  return {violations == 0 && tight && elapsed < 180,
          fmt::format("{} violations in 100000 draws (min gap {:.3e}), M1 lhs {:.12f} rhs {:.12f} |gap| {:.1e}, "
                      "{:.1f}s (limit 180s)",
                      violations, worst, audit.lhs_log_return, audit.rhs, std::abs(audit.gap), elapsed)};
}

Outcome criterion3(std::uint64_t seed) {
  int equal = 0, equal_uniform = 0, witness_exceptions = 0;
  double worst = 0, worst_uniform = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto [mdp, pi] = random_instance(derive_seed(seed, i), true);
    const auto star = optimal_dynamics_adversary(mdp, pi);
    const double diff = std::abs(dynamics_divergence(mdp, pi, star.ptilde) - epsilon_budget(mdp, pi, star.ptilde).value);
    worst = std::max(worst, diff);
    if (diff <= 1e-9) ++equal;
    const auto up = StochasticPolicy::uniform(mdp.num_states(), mdp.num_actions());
    const auto ustar = optimal_dynamics_adversary(mdp, up);
    const double udiff = std::abs(dynamics_divergence(mdp, up, ustar.ptilde) - epsilon_budget(mdp, up, ustar.ptilde).value);
    worst_uniform = std::max(worst_uniform, udiff);
    if (udiff <= 1e-9) ++equal_uniform;
    Rng rng(derive_seed(seed ^ 0x3e3e, i));
    for (const auto& q : {star.ptilde, mdp.transitions(), Kernels(random_kernel_perturbation(rng, mdp, 1.0))}) {
      const auto b = epsilon_budget(mdp, pi, q);
      if (b.value < b.entropy_witness) ++witness_exceptions;
    }
  }
  return {equal == 100 && witness_exceptions == 0,
          fmt::format("divergence = budget at the uniform adversary on {}/100 instances (max |diff| {:.3e}, tol 1e-9); "
                      "with uniform policies {}/100 (max |diff| {:.1e}); eps >= T E[H_pi] exceptions: {}",
                      equal, worst, equal_uniform, worst_uniform, witness_exceptions)};
}

Outcome criterion4() {
  bool pass = true;
  std::string detail;
  for (const double da : {0.0, 0.5, 1.0, 2.0}) {
    const auto g = reward_penalty_gaussian(da);
    const double diff = std::abs(g.quadrature - g.closed_form);
    pass = pass && diff <= 1e-6;
    detail += fmt::format("da={}: quadrature {:.6f} closed form {:.6f} |diff| {:.2e}; ", da, g.quadrature,
                          g.closed_form, diff);
  }
  const auto zero = reward_penalty_gaussian(0.0);
  pass = pass && std::abs(zero.quadrature - 3.914667) <= 1e-6;
  detail += fmt::format("value at da=0 {:.7f} vs 3.914667 (closed form evaluates to {:.7f}; exact integral "
                        "da^2 + ln(2 pi)/2 = {:.6f})",
                        zero.quadrature, zero.closed_form, zero.exact_untruncated);
  return {pass, detail};
}

Outcome criterion5() {
  bool pass = true;
  std::string detail;
  for (const double beta : {0.0, 1.0, 2.0}) {
    const auto g = dynamics_penalty_gaussian(beta);
    const double diff = std::abs(g.quadrature - g.closed_form);
    pass = pass && diff <= 1e-4;
    detail += fmt::format("beta={}: quadrature {:.6f} closed form {:.6f} |diff| {:.2e}; ", beta, g.quadrature,
                          g.closed_form, diff);
  }
  const auto zero = dynamics_penalty_gaussian(0.0);
  pass = pass && std::abs(zero.quadrature - 5.647500) <= 1e-4;
  detail += fmt::format("value at beta=0 {:.6f} vs 5.647500 (closed form evaluates to {:.6f}; exact integral "
                        "beta^2/2 + ln(2 sqrt(2 pi) 20) = {:.6f})",
                        zero.quadrature, zero.closed_form, zero.exact_untruncated);
  return {pass, detail};
}

Outcome criterion6() {
  double worst = 0;
  std::size_t points = 0;
  for (const double eps : {0.0, 0.5, 1.0}) {
    const auto curves = fig2_curves(eps, 101);
    for (const auto& pt : curves.interior) {
      // Independent check: the closed-form minimizer over the boundary.
      const double p = pt.p;
      const double analytic = 2 * p + (1 - p) - oracle::plogp(p) - oracle::plogp(1 - p) - eps;
      worst = std::max({worst, std::abs(pt.robust_value - (pt.maxent_value - eps)), std::abs(pt.robust_value - analytic)});
      ++points;
    }
  }
  return {points == 303 && worst <= 1e-6,
          fmt::format("{} interior points, max |robust - (maxent - eps)| {:.2e} (tol 1e-6)", points, worst)};
}

Outcome criterion7(std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  Fig10Config config;
  config.seed = seed;
  const auto result = fig10_experiment(config);
  const double fp = result.mean("fictitious_play"), lb = result.mean("lower_bound_maxent"),
               pm = result.mean("pointwise_min"), un = result.mean("uniform");
  const double elapsed = seconds_since(start);
  const bool pass = lb >= 0.85 && pm >= 0.40 && pm <= 0.75 && un >= 0.45 && un <= 0.75 && std::abs(fp - 1.0) <= 2e-3 &&
                    elapsed < 60;
  return {pass, fmt::format("LowerBound+MaxEnt {:.4f} (>= 0.85), pointwise-min {:.4f} ([0.40, 0.75]), uniform {:.4f} "
                            "([0.45, 0.75]), fictitious play {:.5f} (1 +- 2e-3), {:.1f}s (limit 60s)",
                            lb, pm, un, fp, elapsed)};
}

Outcome criterion8(std::uint64_t seed) {
  double worst = 0;
  int degenerate = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    Rng rng(derive_seed(seed, i));
    std::normal_distribution<double> normal(0, 1);
    RewardEnsemble m(5, 5);
    for (int a = 0; a < 5; ++a)
      for (int k = 0; k < 5; ++k) m(a, k) = normal(rng);
    const auto c = maxent_construction(m);
    // Recompute softmax(log pi*) independently of the stored recovery.
    const VectorXd logits = c.minimax_policy.cwiseMax(c.floor).array().log();
    const VectorXd recovered = (logits.array() - logits.maxCoeff()).exp().matrix();
    const double tv = 0.5 * (recovered / recovered.sum() - c.minimax_policy).cwiseAbs().sum();
    worst = std::max({worst, tv, c.total_variation});
    degenerate += c.degenerate_support;
  }
  return {worst < 1e-3,
          fmt::format("max TV {:.3e} over 50 ensembles (tol 1e-3), {} degenerate-support warnings", worst, degenerate)};
}

Outcome criterion9(std::uint64_t seed) {
  Rng rng(seed ^ 0x7e7e);
  std::uniform_real_distribution<double> unit(0, 1);
  std::exponential_distribution<double> expo(1.0);
  long members = 0, exceptions = 0;
  for (int pair = 0; pair < 10; ++pair) {
    const double a2 = 0.05 + 3 * unit(rng);
    const double a1 = a2 * (0.01 + 0.98 * unit(rng));
    const int S = 1 + pair % 3, A = 2 + pair % 3;
    MatrixXd r(S, A);
    for (int s = 0; s < S; ++s)
      for (int a = 0; a < A; ++a) r(s, a) = 4 * unit(rng) - 2;
    long drawn = 0;
    while (drawn < 1000) {
      MatrixXd u(S, A);
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) u(s, a) = expo(rng);
        // Lift each row onto or inside sum exp(-u) <= 1.
        const double mass = (-u.row(s).array()).exp().sum();
        u.row(s).array() += std::log(mass) + (unit(rng) < 0.5 ? 0.0 : unit(rng));
      }
      const MatrixXd rt = r + a2 * u;
      if (!temperature_membership(r, rt, a2).member) continue;
      ++drawn;
      ++members;
      if (!temperature_membership(r, rt, a1).member) ++exceptions;
    }
  }
  return {members == 10000 && exceptions == 0,
          fmt::format("{} sampled members over 10 pairs, {} failed the smaller-temperature set", members, exceptions)};
}

Outcome criterion10(std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<double> alphas{1e-3, 1e-1, 1.0};
  const auto study = gridworld_study(seed, 5, alphas, 4);
  int beats = 0, monotone = 0;
  std::string rows;
  for (const auto& layout : study) {
    const double g = layout.greedy.min_return;
    const double s1 = layout.soft[2].min_return;
    if (s1 > g) ++beats;
    const bool mono = layout.soft[0].min_return <= layout.soft[1].min_return &&
                      layout.soft[1].min_return <= layout.soft[2].min_return;
    monotone += mono;
    rows += fmt::format("[greedy {:.3f} | a=1e-3 {:.3f} a=0.1 {:.3f} a=1 {:.3f}] ", g, layout.soft[0].min_return,
                        layout.soft[1].min_return, s1);
  }
  const double elapsed = seconds_since(start);
  return {beats >= 4 && monotone >= 4 && elapsed < 120,
          fmt::format("soft a=1 beats greedy in {}/5 layouts (need 4), nondecreasing in alpha in {}/5 (need 4), "
                      "{:.1f}s (limit 120s); worst-case returns {}",
                      beats, monotone, elapsed, rows)};
}

Outcome criterion11(std::uint64_t seed) {
  double worst = 0;
  int misses = 0, games = 0;
  Fig10Config config;
  config.seed = seed;
  std::vector<RewardEnsemble> all;
  for (int p = 0; p < config.num_problems; ++p)
    all.push_back(fig10_ensemble(config.seed + static_cast<std::uint64_t>(p), config.arms, config.ensemble_size,
                                 config.shift));
  Rng rng(derive_seed(seed, 11));
  std::normal_distribution<double> normal(0, 1);
  for (int g = 0; g < 20; ++g) {
    RewardEnsemble m(5, 5);
    for (int a = 0; a < 5; ++a)
      for (int k = 0; k < 5; ++k) m(a, k) = normal(rng);
    all.push_back(m);
  }
  for (const auto& m : all) {
    const auto fp = fictitious_play(m, 100000, 1e-3);
    // Exploitability recomputed from the returned strategies.
    const double expl = (m * fp.adversary).maxCoeff() - (m.transpose() * fp.policy).minCoeff();
    worst = std::max(worst, expl);
    if (!(expl < 1e-3)) ++misses;
    ++games;
  }
  return {misses == 0, fmt::format("{} games, max exploitability {:.3e} within 1e5 iterations (tol 1e-3), {} misses",
                                   games, worst, misses)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("acceptance criteria");
  int only = 0;
  std::uint64_t seed = 0;
  app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
  app.add_option("--seed", seed, "base seed");
  CLI11_PARSE(app, argc, argv);

  const std::map<int, std::function<Outcome()>> criteria{
      {1, [&] { return criterion1(seed); }},  {2, [&] { return criterion2(seed); }},
      {3, [&] { return criterion3(seed); }},  {4, [] { return criterion4(); }},
      {5, [] { return criterion5(); }},       {6, [] { return criterion6(); }},
      {7, [&] { return criterion7(seed); }},  {8, [&] { return criterion8(seed); }},
      {9, [&] { return criterion9(seed); }},  {10, [&] { return criterion10(seed); }},
      {11, [&] { return criterion11(seed); }},
  };
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    if (only != 0 && id != only) continue;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, fmt::format("exception: {}", e.what())};
    }
    fmt::print("criterion {}: {} {}\n", id, outcome.pass ? "PASS" : "FAIL", outcome.detail);
    std::fflush(stdout);
    failed += !outcome.pass;
  }
  return failed == 0 ? 0 : 1;
}

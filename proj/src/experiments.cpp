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

#include "maxent/experiments.hpp"

#include "maxent/dynamics_robustness.hpp"
#include "maxent/gridworld.hpp"
#include "maxent/random_instances.hpp"
#include "maxent/report.hpp"
#include "maxent/reward_robustness.hpp"
#include "maxent/robust_reward_solver.hpp"
#include "maxent/solver.hpp"
#include "maxent/worked_examples.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

namespace maxent {
namespace {

using nlohmann::json;

template <typename T>
T setting(const json& config, const std::string& key, T fallback) {
  if (!config.contains(key)) return fallback;
  try {
    return config.at(key).get<T>();
  } catch (const json::exception& e) {
    throw PreconditionError(fmt::format("config field '{}': {}", key, e.what()));
  }
}

std::vector<std::string> numbers(std::initializer_list<double> values) {
  std::vector<std::string> out;
  for (const double v : values) out.push_back(format_number(v));
  return out;
}

json table_to_json(const CsvTable& table) {
  auto rows = json::array();
  for (const auto& row : table.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      char* end = nullptr;
      const double v = std::strtod(row[i].c_str(), &end);
      if (!row[i].empty() && end && *end == '\0')
        obj[table.columns[i]] = v;
      else
        obj[table.columns[i]] = row[i];
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

class Writer {
 public:
  Writer(const RunOptions& options, json resolved) : options_(options), resolved_(std::move(resolved)) {
    std::filesystem::create_directories(options_.out);
    const auto path = options_.out / "config.json";
    atomic_write(path, resolved_.dump(2) + "\n");
    output_.files.push_back(path);
  }

  void table(const std::string& name, const CsvTable& table, const json& extra = json::object()) {
    const bool as_json = options_.format == OutputFormat::json;
    const auto path = options_.out / (name + (as_json ? ".json" : ".csv"));
    atomic_write(path, as_json ? table_to_json(table).dump(2) + "\n" : to_csv(table));
    write_metadata(path, resolved_, extra);
    output_.files.push_back(path);
  }

  void plot(const std::string& name, const CsvTable& table, const PlotSpec& spec) {
    const auto path = options_.out / (name + ".svg");
    atomic_write(path, render_svg(table, spec));
    output_.files.push_back(path);
  }

  ExperimentOutput finish(json summary) {
    output_.summary = std::move(summary);
    return std::move(output_);
  }

 private:
  const RunOptions& options_;
  json resolved_;
  ExperimentOutput output_;
};

ExperimentOutput run_fig2(const RunOptions& options) {
  const auto& c = options.config;
  json resolved{{"experiment", "fig2"},
                {"seed", options.seed},
                {"epsilons", setting(c, "epsilons", std::vector<double>{0, 0.5, 1})},
                {"policy_points", setting(c, "policy_points", 101)},
                {"boundary_points", setting(c, "boundary_points", 201)}};
  Writer w(options, resolved);
  CsvTable boundary{{"epsilon", "index", "rtilde_1", "rtilde_2"}, {}};
  CsvTable robust{{"epsilon", "p", "robust_value", "adversary_t"}, {}};
  CsvTable maxent{{"epsilon", "p", "maxent_value", "maxent_minus_epsilon"}, {}};
  CsvTable plot{{"p", "series", "value"}, {}};
  double worst = 0;
  for (const double eps : resolved["epsilons"].get<std::vector<double>>()) {
    const auto curves = fig2_curves(eps, resolved["policy_points"], resolved["boundary_points"]);
    for (std::size_t i = 0; i < curves.boundary.size(); ++i)
      boundary.rows.push_back({format_number(eps), std::to_string(i), format_number(curves.boundary[i][0]),
                               format_number(curves.boundary[i][1])});
    for (const auto& pt : curves.interior) {
      robust.rows.push_back(numbers({eps, pt.p, pt.robust_value, pt.adversary_t}));
      maxent.rows.push_back(numbers({eps, pt.p, pt.maxent_value, pt.shifted_maxent}));
      plot.rows.push_back({format_number(pt.p), fmt::format("robust eps={}", eps), format_number(pt.robust_value)});
      worst = std::max(worst, std::abs(pt.robust_value - pt.shifted_maxent));
    }
    for (const auto& pt : curves.interior)
      plot.rows.push_back({format_number(pt.p), fmt::format("maxent eps={}", eps), format_number(pt.maxent_value)});
  }
  w.table("fig2_boundary", boundary);
  w.table("fig2_robust", robust);
  w.table("fig2_maxent", maxent);
  w.plot("fig2", plot, {PlotKind::line, "p", {"value"}, "series", "Two-armed bandit r = (2, 1)", "p(arm 1)", "objective"});
  return w.finish({{"max_abs_robust_minus_shifted_maxent", worst}});
}

ExperimentOutput run_worked_examples(const RunOptions& options) {
  const auto& c = options.config;
  json resolved{{"experiment", "worked-examples"},
                {"seed", options.seed},
                {"delta_a", setting(c, "delta_a", std::vector<double>{0, 0.5, 1, 2})},
                {"beta", setting(c, "beta", std::vector<double>{0, 1, 2})},
                {"budget_epsilons", setting(c, "budget_epsilons", std::vector<double>{4, 5, 10, 20})},
                {"budget_horizons", setting(c, "budget_horizons", std::vector<int>{1, 2})},
                {"growth_half_widths", setting(c, "growth_half_widths", std::vector<double>{4, 8, 16, 32})},
                {"reward_panels", setting(c, "reward_panels", 4096)},
                {"dynamics_panels", setting(c, "dynamics_panels", 1024)}};
  Writer w(options, resolved);
  CsvTable reward{{"delta_a", "closed_form", "quadrature", "exact_truncated", "closed_minus_quadrature",
                   "exact_minus_quadrature", "truncation_bound"},
                  {}};
  for (const double d : resolved["delta_a"].get<std::vector<double>>()) {
    const auto r = reward_penalty_gaussian(d, 0, -10, 10, resolved["reward_panels"]);
    reward.rows.push_back(numbers({d, r.closed_form, r.quadrature, r.exact_truncated, r.closed_form - r.quadrature,
                                   r.exact_truncated - r.quadrature, r.spec.truncation_bound}));
  }
  CsvTable dynamics{{"beta", "closed_form", "quadrature", "exact_truncated", "closed_minus_quadrature",
                     "exact_minus_quadrature", "truncation_bound"},
                    {}};
  for (const double b : resolved["beta"].get<std::vector<double>>()) {
    const auto r = dynamics_penalty_gaussian(b, -10, 10, resolved["dynamics_panels"]);
    dynamics.rows.push_back(numbers({b, r.closed_form, r.quadrature, r.exact_truncated, r.closed_form - r.quadrature,
                                     r.exact_truncated - r.quadrature, r.spec.truncation_bound}));
  }
  CsvTable budget{{"epsilon", "horizon", "feasible", "analytic", "bisection"}, {}};
  for (const double eps : resolved["budget_epsilons"].get<std::vector<double>>())
    for (const int T : resolved["budget_horizons"].get<std::vector<int>>()) {
      const auto b = reward_budget_inversion(eps, T);
      budget.rows.push_back({format_number(eps), std::to_string(T), b.feasible ? "1" : "0", format_number(b.analytic),
                             format_number(b.bisection)});
    }
  CsvTable growth{{"beta", "half_width", "log_integral"}, {}};
  const auto widths = resolved["growth_half_widths"].get<std::vector<double>>();
  for (const double b : {0.0, 1.0}) {
    const auto g = equal_variance_penalty_growth(b, widths);
    for (std::size_t i = 0; i < widths.size(); ++i) growth.rows.push_back(numbers({b, widths[i], g[i]}));
  }
  w.table("worked_reward_penalty", reward);
  w.table("worked_dynamics_penalty", dynamics);
  w.table("worked_budget_inversion", budget);
  w.table("worked_equal_variance_growth", growth);
  return w.finish(json::object());
}

ExperimentOutput run_temperatures(const RunOptions& options) {
  const auto& c = options.config;
  json resolved{{"experiment", "temperatures"},
                {"seed", options.seed},
                {"reward", setting(c, "reward", std::vector<double>{2, 1})},
                {"alphas", setting(c, "alphas", std::vector<double>{0.5, 1, 2, 4})},
                {"samples", setting(c, "samples", 101)}};
  Writer w(options, resolved);
  const auto r = resolved["reward"].get<std::vector<double>>();
  if (r.size() != 2) throw PreconditionError("config field 'reward': expected two arm rewards");
  const auto alphas = resolved["alphas"].get<std::vector<double>>();
  const auto curves = temperature_boundary_curves({r[0], r[1]}, alphas, resolved["samples"]);
  CsvTable points{{"alpha", "index", "rtilde_1", "rtilde_2"}, {}};
  for (const auto& curve : curves)
    for (std::size_t i = 0; i < curve.points.size(); ++i)
      points.rows.push_back({format_number(curve.alpha), std::to_string(i), format_number(curve.points[i][0]),
                             format_number(curve.points[i][1])});
  CsvTable nesting{{"alpha_small", "alpha_large", "points", "members"}, {}};
  MatrixXd base(1, 2);
  base << r[0], r[1];
  long exceptions = 0;
  for (const auto& small : curves)
    for (const auto& large : curves) {
      if (!(small.alpha < large.alpha)) continue;
      long members = 0;
      for (const auto& pt : large.points) {
        MatrixXd rt(1, 2);
        rt << pt[0], pt[1];
        members += temperature_membership(base, rt, small.alpha, 1e-12).member;
      }
      exceptions += static_cast<long>(large.points.size()) - members;
      nesting.rows.push_back({format_number(small.alpha), format_number(large.alpha),
                              std::to_string(large.points.size()), std::to_string(members)});
    }
  w.table("temperature_boundary", points);
  w.table("temperature_nesting", nesting);
  CsvTable plot{{"rtilde_1", "alpha", "rtilde_2"}, {}};
  for (const auto& row : points.rows) plot.rows.push_back({row[2], "alpha=" + row[0], row[3]});
  w.plot("temperatures", plot, {PlotKind::line, "rtilde_1", {"rtilde_2"}, "alpha", "Reward set boundaries", "r~(arm 1)", "r~(arm 2)"});
  return w.finish({{"nesting_exceptions", exceptions}});
}

ExperimentOutput run_fig10(const RunOptions& options) {
  const auto& c = options.config;
  Fig10Config cfg;
  cfg.seed = setting<std::uint64_t>(c, "seed", options.seed);
  cfg.num_problems = setting(c, "num_problems", cfg.num_problems);
  cfg.arms = setting(c, "arms", cfg.arms);
  cfg.ensemble_size = setting(c, "ensemble_size", cfg.ensemble_size);
  cfg.shift = setting(c, "shift", cfg.shift);
  cfg.rounds = setting(c, "rounds", cfg.rounds);
  cfg.jobs = options.jobs;
  const auto shifts = setting(c, "sensitivity_shifts", std::vector<double>{0.1, 0.5, 1.0});
  json resolved{{"experiment", "fig10"},       {"seed", cfg.seed},   {"num_problems", cfg.num_problems},
                {"arms", cfg.arms},             {"ensemble_size", cfg.ensemble_size},
                {"shift", cfg.shift},           {"rounds", cfg.rounds}, {"sensitivity_shifts", shifts}};
  Writer w(options, resolved);
  const auto result = fig10_experiment(cfg);
  CsvTable table{{"problem_id", "method", "normalized_minimax", "raw_minimax", "oracle_value", "iterations"}, {}};
  for (const auto& row : result.rows)
    table.rows.push_back({std::to_string(row.problem_id), row.method, format_number(row.normalized_minimax),
                          format_number(row.raw_minimax), format_number(row.oracle_value),
                          std::to_string(row.iterations)});
  json means = json::object();
  for (const auto& method : fig10_methods()) {
    double raw = 0, oracle = 0, iters = 0;
    int n = 0;
    for (const auto& row : result.rows)
      if (row.method == method) {
        raw += row.raw_minimax;
        oracle += row.oracle_value;
        iters += row.iterations;
        ++n;
      }
    means[method] = result.mean(method);
    table.rows.push_back({"mean", method, format_number(result.mean(method)), format_number(raw / n),
                          format_number(oracle / n), format_number(iters / n)});
  }
  json sensitivity = json::object();
  for (const double shift : shifts) {
    Fig10Config alt = cfg;
    alt.shift = shift;
    const auto r = fig10_experiment(alt);
    json m = json::object();
    for (const auto& method : fig10_methods()) m[method] = r.mean(method);
    sensitivity[format_number(shift)] = m;
  }
  double worst_exploitability = 0;
  for (const auto& o : result.oracles) worst_exploitability = std::max(worst_exploitability, o.exploitability);
  w.table("fig10", table, {{"means", means}, {"shift_sensitivity", sensitivity},
                           {"oracle_max_exploitability", worst_exploitability}});
  w.plot("fig10", table, {PlotKind::bar, "problem_id", {"normalized_minimax"}, "method",
                          "Normalized minimax reward per problem", "problem", "normalized minimax"});
  return w.finish({{"means", means}, {"oracle_max_exploitability", worst_exploitability}});
}

ExperimentOutput run_gridworld(const RunOptions& options) {
  const auto& c = options.config;
  json resolved{{"experiment", "gridworld"},
                {"seed", setting<std::uint64_t>(c, "seed", options.seed)},
                {"layouts", setting(c, "layouts", 5)},
                {"alphas", setting(c, "alphas", std::vector<double>{1e-3, 1e-1, 1})}};
  Writer w(options, resolved);
  const auto alphas = resolved["alphas"].get<std::vector<double>>();
  const auto study = gridworld_study(resolved["seed"], resolved["layouts"], alphas, options.jobs);
  CsvTable worst{{"layout", "policy", "alpha", "worst_case_return", "argmin_perturbation", "nominal_return",
                  "nominal_success_prob", "nominal_lava_prob"},
                 {}};
  CsvTable suite{{"layout", "policy", "alpha", "perturbation_id", "description", "return", "success_prob", "lava_prob"},
                 {}};
  int soft_beats_greedy = 0, monotone = 0;
  for (std::size_t l = 0; l < study.size(); ++l) {
    const auto& r = study[l];
    auto add = [&](const std::string& policy, const std::string& alpha, const WorstCase& wc) {
      const auto& nominal = wc.table.front().evaluation;
      worst.rows.push_back({std::to_string(l), policy, alpha, format_number(wc.min_return),
                            wc.table[static_cast<std::size_t>(wc.argmin)].description,
                            format_number(nominal.expected_return), format_number(nominal.success_prob),
                            format_number(nominal.lava_prob)});
      for (const auto& row : wc.table)
        suite.rows.push_back({std::to_string(l), policy, alpha, std::to_string(row.perturbation_id), row.description,
                              format_number(row.evaluation.expected_return), format_number(row.evaluation.success_prob),
                              format_number(row.evaluation.lava_prob)});
    };
    add("greedy", "0", r.greedy);
    bool mono = true;
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      add("soft", format_number(alphas[a]), r.soft[a]);
      if (a > 0 && r.soft[a].min_return < r.soft[a - 1].min_return) mono = false;
      if (alphas[a] == 1.0 && r.soft[a].min_return > r.greedy.min_return) ++soft_beats_greedy;
    }
    monotone += mono;
  }
  w.table("gridworld_worst_case", worst);
  w.table("gridworld_suite", suite);
  return w.finish({{"soft_alpha1_beats_greedy", soft_beats_greedy}, {"monotone_in_alpha", monotone},
                   {"layouts", study.size()}});
}

TabularMDP positive_reward_mdp(Rng& rng, int S, int A, int T) {
  RandomMdpOptions o;
  o.reward_low = 0.1;
  o.reward_high = 1.0;
  o.min_transition = 1e-3;
  return random_mdp(rng, S, A, T, o);
}

ExperimentOutput run_theorem_audit(const RunOptions& options) {
  const auto& c = options.config;
  json resolved{{"experiment", "theorem-audit"},
                {"seed", setting<std::uint64_t>(c, "seed", options.seed)},
                {"instances", setting(c, "instances", 20)},
                {"epsilons", setting(c, "epsilons", std::vector<double>{0, 0.5, 1})},
                {"kernel_samples", setting(c, "kernel_samples", 100)},
                {"search_iterations", setting(c, "search_iterations", 2000)}};
  Writer w(options, resolved);
  const std::uint64_t seed = resolved["seed"];
  const int instances = resolved["instances"];
  CsvTable reward{{"instance", "epsilon", "maxent_value", "analytic_value", "searched_value", "searched_constraint",
                   "target"},
                  {}};
  CsvTable dynamics{{"instance", "min_proof_chain_gap", "uniform_divergence", "uniform_epsilon_budget",
                     "entropy_witness", "divergence_floor"},
                    {}};
  std::vector<std::vector<std::string>> reward_rows(static_cast<std::size_t>(std::max(0, instances)) * 3);
  std::vector<std::vector<std::string>> dynamics_rows(static_cast<std::size_t>(std::max(0, instances)));
  auto audit = [&](int i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::uniform_int_distribution<int> sd(1, 6), ad(1, 4), td(1, 5);
    const int S = sd(rng), A = ad(rng), T = td(rng);
    const TabularMDP mdp = positive_reward_mdp(rng, S, A, T);
    const StochasticPolicy policy = random_policy(rng, S, A, T);
    const double J = maxent_objective(mdp, policy, 1.0);
    RewardSearchOptions so;
    so.iterations = resolved["search_iterations"];
    const auto eps_list = resolved["epsilons"].get<std::vector<double>>();
    for (std::size_t e = 0; e < eps_list.size() && e < 3; ++e) {
      const double eps = eps_list[e];
      const auto analytic = worst_case_reward(mdp, policy, eps);
      const auto searched = adversary_search_reward(mdp, policy, eps, so);
      reward_rows[static_cast<std::size_t>(i) * 3 + e] = {
          std::to_string(i), format_number(eps), format_number(J),
          format_number(adversarial_return(mdp, policy, analytic.rtilde)), format_number(searched.value),
          format_number(searched.constraint_value), format_number(J - eps)};
    }
    double min_gap = std::numeric_limits<double>::infinity();
    const int samples = resolved["kernel_samples"];
    for (int k = 0; k < samples; ++k) {
      std::uniform_real_distribution<double> strength(0.0, 1.0);
      const Kernels pt(random_kernel_perturbation(rng, mdp, strength(rng)));
      min_gap = std::min(min_gap, proof_chain_audit(mdp, policy, pt).gap);
    }
    const auto adv = optimal_dynamics_adversary(mdp, policy);
    const auto budget = epsilon_budget(mdp, policy, adv.ptilde);
    dynamics_rows[static_cast<std::size_t>(i)] = {
        std::to_string(i), format_number(min_gap), format_number(adv.divergence_expectation),
        format_number(budget.value), format_number(budget.entropy_witness),
        format_number(dynamics_divergence(mdp, policy, minimum_divergence_kernel(mdp)))};
  };
  const int jobs = std::max(1, options.jobs);
  {
    std::vector<std::jthread> workers;
    for (int j = 0; j < std::min(jobs, std::max(1, instances)); ++j)
      workers.emplace_back([&, j] {
        for (int i = j; i < instances; i += jobs) audit(i);
      });
  }
  for (auto& row : reward_rows)
    if (!row.empty()) reward.rows.push_back(std::move(row));
  for (auto& row : dynamics_rows)
    if (!row.empty()) dynamics.rows.push_back(std::move(row));

  // Uniform 2x2 instance with r = 1 and T = 2.
  const TabularMDP m1(VectorXd::Constant(2, 0.5), TransitionKernel<double>(2, MatrixXd::Constant(2, 2, 0.5)),
                      MatrixXd::Ones(2, 2), 2);
  const auto m1_audit = proof_chain_audit(m1, StochasticPolicy::uniform(2, 2), m1.transitions());
  w.table("theorem_audit_reward", reward);
  w.table("theorem_audit_dynamics", dynamics, {{"m1", to_json(m1_audit)}});
  return w.finish({{"m1", to_json(m1_audit)}});
}

using Runner = std::function<ExperimentOutput(const RunOptions&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table{
      {"fig2", run_fig2},       {"worked-examples", run_worked_examples}, {"temperatures", run_temperatures},
      {"fig10", run_fig10},     {"gridworld", run_gridworld},             {"theorem-audit", run_theorem_audit}};
  return table;
}

// ---- verify ----

struct Tolerances {
  std::map<std::string, double> values{
      {"occupancy_mass", 1e-12},     {"occupancy_marginals", 1e-12}, {"soft_value", 1e-9},
      {"soft_dominance", 1e-9},      {"maxent_return", 1e-12},       {"analytic_constraint", 1e-10},
      {"analytic_value", 1e-10},     {"sampled_lower_bound", 1e-9},  {"fenchel_gap", 1e-12},
      {"proof_chain", 1e-9},         {"budget_witness", 1e-12},      {"divergence_floor", 1e-12},
      {"fictitious_play_interval", 1e-12}, {"subproblem_feasibility", 1e-8}, {"lower_bound_validity", 1e-8},
      {"temperature_nesting", 1e-12}, {"identity_perturbation", 0.0}, {"grid_rows", 1e-12}};

  double at(const std::string& name) const { return values.at(name); }
};

Tolerances parse_tolerances(const json& config) {
  Tolerances t;
  if (!config.contains("tolerances")) return t;
  const auto& j = config.at("tolerances");
  if (j.is_number()) {
    for (auto& [name, value] : t.values) value = j.get<double>();
    return t;
  }
  if (!j.is_object()) throw PreconditionError("config field 'tolerances': expected a number or an object");
  for (const auto& [name, value] : j.items()) {
    if (!t.values.count(name)) throw PreconditionError(fmt::format("config field 'tolerances.{}': unknown tolerance", name));
    if (!value.is_number()) throw PreconditionError(fmt::format("config field 'tolerances.{}': expected a number", name));
    t.values[name] = value.get<double>();
  }
  return t;
}

class Checker {
 public:
  Checker(const Tolerances& tol, std::uint64_t seed) : tol_(tol), seed_(seed) {}

  /// Records a violation when residual exceeds the named tolerance.
  void check(const std::string& module, const std::string& invariant, double residual) {
    ++checks_;
    if (!(residual <= tol_.at(invariant))) violations_.push_back({module, invariant, seed_, residual});
  }

  long checks() const { return checks_; }
  std::vector<VerifyViolation>& violations() { return violations_; }

 private:
  const Tolerances& tol_;
  std::uint64_t seed_;
  long checks_ = 0;
  std::vector<VerifyViolation> violations_;
};

void verify_instance(Checker& c, Rng& rng, int max_s, int max_a, int max_t, int samples) {
  std::uniform_int_distribution<int> sd(1, max_s), ad(1, max_a), td(1, max_t);
  const int S = sd(rng), A = ad(rng), T = td(rng);
  const TabularMDP mdp = random_mdp(rng, S, A, T);
  const StochasticPolicy policy = random_policy(rng, S, A, T);
  const auto occ = occupancy(mdp, policy);

  for (int t = 0; t <= T; ++t) c.check("mdp_core", "occupancy_mass", std::abs(occ.states[static_cast<std::size_t>(t)].sum() - 1));
  for (int t = 0; t < T; ++t) {
    const auto st = static_cast<std::size_t>(t);
    c.check("mdp_core", "occupancy_marginals",
            (occ.state_actions[st].rowwise().sum() - occ.states[st]).cwiseAbs().maxCoeff());
    VectorXd next = VectorXd::Zero(S);
    for (int a = 0; a < A; ++a) next += occ.joint[st][static_cast<std::size_t>(a)].colwise().sum().transpose();
    c.check("mdp_core", "occupancy_marginals", (next - occ.states[st + 1]).cwiseAbs().maxCoeff());
  }
  c.check("mdp_core", "maxent_return", std::abs(maxent_objective(mdp, policy, 0.0) - expected_return(mdp, policy)));

  std::uniform_real_distribution<double> alpha_dist(0.05, 2.0);
  const double alpha = alpha_dist(rng);
  const auto soft = soft_value_iteration(mdp, alpha);
  const double soft_value = maxent_objective(mdp, soft.policy, alpha);
  c.check("maxent_solver", "soft_value", std::abs(soft.initial_value(mdp.initial_dist()) - soft_value));
  for (int k = 0; k < samples; ++k) {
    const auto other = random_policy(rng, S, A, T);
    c.check("maxent_solver", "soft_dominance", std::max(0.0, maxent_objective(mdp, other, alpha) - soft_value));
  }

  const double J = maxent_objective(mdp, policy, 1.0);
  for (const double eps : {0.0, 0.5, 1.0}) {
    const auto adv = worst_case_reward(mdp, policy, eps);
    c.check("reward_robustness", "analytic_constraint",
            std::abs(reward_constraint_expected(occ, mdp.rewards(), adv.rtilde) - eps));
    c.check("reward_robustness", "analytic_value", std::abs(adversarial_return(mdp, policy, adv.rtilde) - (J - eps)));
    for (int k = 0; k < samples; ++k) {
      const auto rt = sample_feasible_reward(rng, mdp, occ, eps);
      c.check("reward_robustness", "sampled_lower_bound",
              std::max(0.0, (J - eps) - adversarial_return(mdp, policy, rt)));
    }
  }
  for (int k = 0; k < samples; ++k) {
    const VectorXd p = random_distribution(rng, A);
    std::normal_distribution<double> normal(0.0, 2.0);
    VectorXd f(A);
    for (int a = 0; a < A; ++a) f(a) = normal(rng);
    c.check("reward_robustness", "fenchel_gap", std::max(0.0, -fenchel_gap(p, f)));
  }

  RandomMdpOptions positive;
  positive.reward_low = 0.1;
  positive.reward_high = 1.0;
  positive.min_transition = 1e-3;
  const TabularMDP pmdp = random_mdp(rng, S, A, T, positive);
  const double floor = dynamics_divergence(pmdp, policy, minimum_divergence_kernel(pmdp));
  for (int k = 0; k < samples; ++k) {
    std::uniform_real_distribution<double> strength(0.0, 1.0);
    const Kernels pt(random_kernel_perturbation(rng, pmdp, strength(rng)));
    const auto audit = proof_chain_audit(pmdp, policy, pt);
    c.check("dynamics_robustness", "proof_chain", std::max(0.0, -audit.gap));
    c.check("dynamics_robustness", "budget_witness", std::max(0.0, audit.entropy_witness - audit.epsilon_budget));
    c.check("dynamics_robustness", "divergence_floor", std::max(0.0, floor - audit.divergence));
  }

  std::uniform_int_distribution<int> arms(1, 5), fns(1, 5);
  const RewardEnsemble m = fig10_ensemble(rng(), arms(rng), fns(rng), 0.1);
  const auto fp = fictitious_play(m, 20000, 1e-3);
  c.check("robust_reward_solver", "fictitious_play_interval",
          std::max({0.0, robust_value(m, fp.policy) - fp.lower, fp.lower - fp.upper - 1e-15}));
  const auto lb = lower_bound_maxent(m, fp.value, 5);
  const auto sub = reward_subproblem(m, lb.policy);
  c.check("robust_reward_solver", "subproblem_feasibility", std::max(0.0, sub.max_constraint - 1));
  const VectorXd pi = softmax(lb.reward);
  c.check("robust_reward_solver", "lower_bound_validity",
          std::max(0.0, pi.dot(lb.reward) + entropy(pi) - robust_value(m, pi)));

  std::uniform_real_distribution<double> alpha_small(0.1, 2.0);
  const double a1 = alpha_small(rng);
  const double a2 = a1 * (1 + alpha_small(rng));
  MatrixXd r(1, 2);
  r << 2, 1;
  for (int k = 0; k < samples; ++k) {
    const VectorXd mass = random_distribution(rng, 2);
    std::uniform_real_distribution<double> slack(0.0, 1.0);
    MatrixXd u(1, 2);
    u << -std::log(mass(0)) + slack(rng), -std::log(mass(1));
    c.check("temperatures", "temperature_nesting",
            std::max(0.0, -temperature_membership(r, r + a2 * u, a1, 1e-12).worst_slack));
  }

  GridSpec spec;
  spec.width = sd(rng) + 1;
  spec.height = sd(rng);
  spec.goal = {spec.width - 1, spec.height - 1};
  spec.horizon = T;
  const GridWorld base = build_gridworld(spec);
  const GridWorld same = apply_perturbation(spec, Perturbation::identity());
  double diff = (base.mdp.rewards() - same.mdp.rewards()).cwiseAbs().maxCoeff();
  for (int a = 0; a < kNumMoves; ++a)
    diff = std::max(diff, (base.mdp.transition(0, a) - same.mdp.transition(0, a)).cwiseAbs().maxCoeff());
  c.check("envs", "identity_perturbation", diff);
  for (int a = 0; a < kNumMoves; ++a)
    c.check("envs", "grid_rows", (base.mdp.transition(0, a).rowwise().sum().array() - 1).abs().maxCoeff());
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, run] : runners()) out.push_back(name);
    return out;
  }();
  return names;
}

ExperimentOutput run_experiment(const std::string& name, const RunOptions& options) {
  const auto it = runners().find(name);
  if (it == runners().end())
    throw PreconditionError(fmt::format("unknown experiment '{}'; expected one of: {}", name,
                                        fmt::join(experiment_names(), ", ")));
  if (!options.config.is_object()) throw PreconditionError("config must be a JSON object");
  return it->second(options);
}

VerifyReport run_verify(const json& config, int jobs) {
  if (!config.is_object()) throw PreconditionError("config must be a JSON object");
  VerifyReport report;
  const auto seed = setting<std::uint64_t>(config, "seed", 0);
  const int instances = setting(config, "instances", 100);
  const int samples = setting(config, "samples", 10);
  json sizes = config.value("sizes", json::object());
  const int max_s = setting(sizes, "states", 6);
  const int max_a = setting(sizes, "actions", 4);
  const int max_t = setting(sizes, "horizon", 5);
  if (instances < 0 || samples < 0 || max_s < 1 || max_a < 1 || max_t < 1)
    throw PreconditionError("config: instances and samples must be nonnegative and sizes positive");
  const Tolerances tol = parse_tolerances(config);
  report.config = {{"seed", seed},
                   {"instances", instances},
                   {"samples", samples},
                   {"sizes", {{"states", max_s}, {"actions", max_a}, {"horizon", max_t}}},
                   {"tolerances", tol.values}};

  std::vector<long> checks(static_cast<std::size_t>(instances));
  std::vector<std::vector<VerifyViolation>> found(static_cast<std::size_t>(instances));
  const int workers_wanted = std::max(1, jobs);
  {
    std::vector<std::jthread> workers;
    for (int w = 0; w < std::min(workers_wanted, std::max(1, instances)); ++w)
      workers.emplace_back([&, w] {
        for (int i = w; i < instances; i += workers_wanted) {
          const std::uint64_t instance_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
          Rng rng(instance_seed);
          Checker checker(tol, instance_seed);
          verify_instance(checker, rng, max_s, max_a, max_t, samples);
          checks[static_cast<std::size_t>(i)] = checker.checks();
          found[static_cast<std::size_t>(i)] = std::move(checker.violations());
        }
      });
  }
  for (int i = 0; i < instances; ++i) {
    report.checks += checks[static_cast<std::size_t>(i)];
    auto& v = found[static_cast<std::size_t>(i)];
    report.violations.insert(report.violations.end(), v.begin(), v.end());
  }
  return report;
}

void write_verify_report(const VerifyReport& report, const std::filesystem::path& out, OutputFormat format) {
  std::filesystem::create_directories(out);
  CsvTable table{{"module", "invariant", "seed", "residual"}, {}};
  for (const auto& v : report.violations)
    table.rows.push_back({v.module, v.invariant, std::to_string(v.seed), format_number(v.residual)});
  const auto path = out / (format == OutputFormat::json ? "verify_violations.json" : "verify_violations.csv");
  atomic_write(path, format == OutputFormat::json ? table_to_json(table).dump(2) + "\n" : to_csv(table));
  write_metadata(path, report.config);
  atomic_write(out / "verify.json",
               json{{"checks", report.checks}, {"violations", report.violations.size()}, {"config", report.config}}
                       .dump(2) +
                   "\n");
}

}  // namespace maxent

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

#include "maxent/gridworld.hpp"

#include "maxent/random_instances.hpp"
#include "maxent/solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>

namespace maxent {
namespace {

bool contains(const std::vector<Cell>& cells, const Cell& c) {
  return std::find(cells.begin(), cells.end(), c) != cells.end();
}

void check_inside(const GridSpec& spec, const Cell& c, const char* what) {
  if (!spec.inside(c))
    throw PreconditionError(fmt::format("{} cell ({}, {}) is outside the {}x{} grid", what, c.x, c.y, spec.width,
                                        spec.height));
}

// Breadth-first distances (in moves) from `from`, -1 where unreachable.
std::vector<int> bfs(const GridSpec& spec, const Cell& from) {
  std::vector<int> dist(static_cast<std::size_t>(spec.num_states()), -1);
  std::deque<Cell> queue{from};
  dist[static_cast<std::size_t>(spec.index(from))] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (int m = 0; m < kNumMoves; ++m) {
      const Cell d = move_offset(static_cast<Move>(m));
      const Cell n{c.x + d.x, c.y + d.y};
      if (!spec.inside(n) || spec.is_wall(n) || dist[static_cast<std::size_t>(spec.index(n))] >= 0) continue;
      dist[static_cast<std::size_t>(spec.index(n))] = dist[static_cast<std::size_t>(spec.index(c))] + 1;
      queue.push_back(n);
    }
  }
  return dist;
}

bool goal_reachable(const GridSpec& spec) {
  const auto dist = bfs(spec, spec.goal);
  return std::all_of(spec.start.begin(), spec.start.end(),
                     [&](const Cell& s) { return dist[static_cast<std::size_t>(spec.index(s))] >= 0; });
}

Cell step(const GridSpec& spec, const Cell& c, int dx, int dy) {
  const Cell n{c.x + dx, c.y + dy};
  return spec.inside(n) && !spec.is_wall(n) ? n : c;
}

nlohmann::json cells_to_json(const std::vector<Cell>& cells) {
  auto out = nlohmann::json::array();
  for (const auto& c : cells) out.push_back({c.x, c.y});
  return out;
}

std::vector<Cell> cells_from_json(const nlohmann::json& j) {
  std::vector<Cell> out;
  for (const auto& c : j) out.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  return out;
}

}  // namespace

Cell move_offset(Move move) {
  switch (move) {
    case Move::right: return {1, 0};
    case Move::up: return {0, 1};
    case Move::left: return {-1, 0};
    case Move::down: return {0, -1};
  }
  return {0, 0};
}

bool GridSpec::is_wall(const Cell& c) const { return contains(walls, c); }
bool GridSpec::is_lava(const Cell& c) const { return contains(lava, c); }

void validate(const GridSpec& spec) {
  if (spec.width < 1 || spec.height < 1) throw ShapeError("grid dimensions must be positive");
  if (spec.horizon < 1) throw PreconditionError("grid horizon must be positive");
  if (!(spec.slip >= 0 && spec.slip <= 0.5)) throw PreconditionError("slip must lie in [0, 0.5]");
  if (spec.start.empty()) throw PreconditionError("at least one start cell is required");
  for (const auto& c : spec.start) check_inside(spec, c, "start");
  check_inside(spec, spec.goal, "goal");
  for (const auto& c : spec.lava) check_inside(spec, c, "lava");
  for (const auto& c : spec.walls) check_inside(spec, c, "wall");
}

nlohmann::json to_json(const GridSpec& spec) {
  return {{"width", spec.width},
          {"height", spec.height},
          {"start", cells_to_json(spec.start)},
          {"goal", {spec.goal.x, spec.goal.y}},
          {"lava", cells_to_json(spec.lava)},
          {"walls", cells_to_json(spec.walls)},
          {"slip", spec.slip},
          {"horizon", spec.horizon},
          {"lava_penalty", spec.lava_penalty},
          {"reward_offset", spec.reward_offset},
          {"positive_distance_reward", spec.positive_distance_reward}};
}

GridSpec grid_spec_from_json(const nlohmann::json& j) {
  GridSpec spec;
  spec.width = j.at("width").get<int>();
  spec.height = j.at("height").get<int>();
  if (j.contains("start")) {
    const auto& s = j.at("start");
    spec.start = !s.empty() && s.at(0).is_array() ? cells_from_json(s) : std::vector<Cell>{{s.at(0), s.at(1)}};
  }
  spec.goal = {j.at("goal").at(0).get<int>(), j.at("goal").at(1).get<int>()};
  spec.lava = cells_from_json(j.value("lava", nlohmann::json::array()));
  spec.walls = cells_from_json(j.value("walls", nlohmann::json::array()));
  spec.slip = j.value("slip", spec.slip);
  spec.horizon = j.value("horizon", spec.horizon);
  spec.lava_penalty = j.value("lava_penalty", spec.lava_penalty);
  spec.reward_offset = j.value("reward_offset", spec.reward_offset);
  spec.positive_distance_reward = j.value("positive_distance_reward", spec.positive_distance_reward);
  validate(spec);
  return spec;
}

GridWorld build_gridworld(const GridSpec& spec) {
  validate(spec);
  const int S = spec.num_states();
  const int goal = spec.index(spec.goal);
  TransitionKernel<double> kernel(kNumMoves, MatrixXd::Zero(S, S));
  MatrixXd rewards(S, kNumMoves);
  for (int s = 0; s < S; ++s) {
    const Cell c = spec.cell(s);
    const double distance = std::hypot(c.x - spec.goal.x, c.y - spec.goal.y);
    const double shaping = spec.positive_distance_reward ? distance : -distance;
    rewards.row(s).setConstant(shaping - (spec.is_lava(c) ? spec.lava_penalty : 0.0) + spec.reward_offset);
    for (int a = 0; a < kNumMoves; ++a) {
      auto& p = kernel[static_cast<std::size_t>(a)];
      if (s == goal || spec.is_wall(c)) {
        p(s, s) = 1;
        continue;
      }
      for (int m = 0; m < kNumMoves; ++m) {
        const double w = (m == a ? 1 - spec.slip : 0.0) + spec.slip / kNumMoves;
        if (w == 0) continue;
        const Cell d = move_offset(static_cast<Move>(m));
        p(s, spec.index(step(spec, c, d.x, d.y))) += w;
      }
    }
  }
  VectorXd initial = VectorXd::Zero(S);
  for (const auto& c : spec.start) initial(spec.index(c)) += 1.0 / static_cast<double>(spec.start.size());

  GridWorld world{spec, TabularMDP(initial, std::move(kernel), rewards, spec.horizon), {goal}, {}};
  for (const auto& c : spec.lava) world.lava_states.push_back(spec.index(c));
  validate(world.mdp);
  return world;
}

Perturbation Perturbation::identity() { return obstacle({}, "identity"); }

Perturbation Perturbation::obstacle(std::vector<Cell> cells, std::string description) {
  Perturbation p;
  p.kind = PerturbationKind::add_obstacle;
  p.cells = std::move(cells);
  p.description = std::move(description);
  return p;
}

Perturbation Perturbation::goal_shift(Cell offset, std::string description) {
  Perturbation p;
  p.kind = PerturbationKind::move_goal;
  p.offset = offset;
  p.description = std::move(description);
  return p;
}

Perturbation Perturbation::push(int step, std::vector<Displacement> displacement, std::string description) {
  Perturbation p;
  p.kind = PerturbationKind::mid_episode_push;
  p.push_step = step;
  p.displacement = std::move(displacement);
  p.description = std::move(description);
  return p;
}

std::string to_string(PerturbationKind kind) {
  switch (kind) {
    case PerturbationKind::add_obstacle: return "add_obstacle";
    case PerturbationKind::move_goal: return "move_goal";
    case PerturbationKind::mid_episode_push: return "mid_episode_push";
  }
  return "unknown";
}

nlohmann::json to_json(const Perturbation& p) {
  nlohmann::json j{{"kind", to_string(p.kind)}, {"description", p.description}};
  switch (p.kind) {
    case PerturbationKind::add_obstacle: j["cells"] = cells_to_json(p.cells); break;
    case PerturbationKind::move_goal: j["offset"] = {p.offset.x, p.offset.y}; break;
    case PerturbationKind::mid_episode_push: {
      j["step"] = p.push_step;
      auto d = nlohmann::json::array();
      for (const auto& x : p.displacement) d.push_back({{"dx", x.dx}, {"dy", x.dy}, {"prob", x.prob}});
      j["displacement"] = d;
      break;
    }
  }
  return j;
}

Perturbation perturbation_from_json(const nlohmann::json& j) {
  const auto kind = j.at("kind").get<std::string>();
  const auto description = j.value("description", std::string{});
  if (kind == "add_obstacle") return Perturbation::obstacle(cells_from_json(j.at("cells")), description);
  if (kind == "move_goal")
    return Perturbation::goal_shift({j.at("offset").at(0).get<int>(), j.at("offset").at(1).get<int>()}, description);
  if (kind == "mid_episode_push") {
    std::vector<Displacement> d;
    for (const auto& x : j.at("displacement"))
      d.push_back({x.at("dx").get<int>(), x.at("dy").get<int>(), x.at("prob").get<double>()});
    return Perturbation::push(j.at("step").get<int>(), std::move(d), description);
  }
  throw PreconditionError(fmt::format("unknown perturbation kind '{}'", kind));
}

GridWorld apply_perturbation(const GridSpec& spec, const Perturbation& perturbation) {
  GridSpec perturbed = spec;
  switch (perturbation.kind) {
    case PerturbationKind::add_obstacle:
      for (const auto& c : perturbation.cells) {
        check_inside(spec, c, "obstacle");
        if (!perturbed.is_wall(c)) perturbed.walls.push_back(c);
      }
      return build_gridworld(perturbed);
    case PerturbationKind::move_goal:
      perturbed.goal = {spec.goal.x + perturbation.offset.x, spec.goal.y + perturbation.offset.y};
      check_inside(spec, perturbed.goal, "moved goal");
      return build_gridworld(perturbed);
    case PerturbationKind::mid_episode_push: break;
  }

  if (perturbation.push_step < 0 || perturbation.push_step >= spec.horizon)
    throw PreconditionError(fmt::format("push step {} is outside 0..{}", perturbation.push_step, spec.horizon - 1));
  double mass = 0;
  for (const auto& d : perturbation.displacement) {
    if (d.prob < 0) throw PreconditionError("push probabilities must be nonnegative");
    mass += d.prob;
  }
  if (mass > 1 + 1e-12) throw PreconditionError("push probabilities must sum to at most 1");

  GridWorld world = build_gridworld(spec);
  const int S = spec.num_states();
  MatrixXd push = MatrixXd::Zero(S, S);
  for (int s = 0; s < S; ++s) {
    const Cell c = spec.cell(s);
    if (s == world.goal_states.front() || spec.is_wall(c)) {
      push(s, s) = 1;
      continue;
    }
    push(s, s) += 1 - mass;
    for (const auto& d : perturbation.displacement) push(s, spec.index(step(spec, c, d.dx, d.dy))) += d.prob;
  }
  const auto& base = world.mdp.kernel(0);
  std::vector<TransitionKernel<double>> kernels(static_cast<std::size_t>(spec.horizon), base);
  for (auto& m : kernels[static_cast<std::size_t>(perturbation.push_step)]) m = m * push;
  world.mdp = world.mdp.with_transitions(PerStep<TransitionKernel<double>>(std::move(kernels)));
  validate(world.mdp);
  return world;
}

double visit_probability(const TabularMDP& mdp, const StochasticPolicy& policy, const std::vector<int>& targets) {
  check_policy_shape(mdp, policy);
  // Mass that has not yet visited a target; the flag state is implicit.
  VectorXd free = mdp.initial_dist();
  double hit = 0;
  auto absorb = [&] {
    for (const int s : targets) {
      hit += free(s);
      free(s) = 0;
    }
  };
  absorb();
  for (int t = 0; t < mdp.horizon(); ++t) {
    VectorXd next = VectorXd::Zero(mdp.num_states());
    for (int a = 0; a < mdp.num_actions(); ++a)
      next += mdp.transition(t, a).transpose() * free.cwiseProduct(policy.at(t).col(a));
    free = std::move(next);
    absorb();
  }
  return hit;
}

GridEvaluation exact_evaluate(const GridWorld& world, const StochasticPolicy& policy) {
  return {expected_return(world.mdp, policy), visit_probability(world.mdp, policy, world.goal_states),
          visit_probability(world.mdp, policy, world.lava_states)};
}

WorstCase worst_case_over_perturbations(const GridSpec& spec, const StochasticPolicy& policy,
                                        const std::vector<Perturbation>& suite, int jobs) {
  if (suite.empty()) throw PreconditionError("worst_case_over_perturbations: the suite is empty");
  WorstCase out;
  out.table.resize(suite.size());
  auto evaluate = [&](std::size_t i) {
    const GridWorld world = apply_perturbation(spec, suite[i]);
    out.table[i] = {static_cast<int>(i), suite[i].description, exact_evaluate(world, policy)};
  };
  const auto workers_wanted = static_cast<std::size_t>(std::max(1, jobs));
  if (workers_wanted == 1) {
    for (std::size_t i = 0; i < suite.size(); ++i) evaluate(i);
  } else {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < std::min(workers_wanted, suite.size()); ++w)
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < suite.size(); i += workers_wanted) evaluate(i);
      });
  }
  out.min_return = out.table.front().evaluation.expected_return;
  for (const auto& row : out.table)
    if (row.evaluation.expected_return < out.min_return) {
      out.min_return = row.evaluation.expected_return;
      out.argmin = row.perturbation_id;
    }
  return out;
}

GridSpec gridworld_layout(std::uint64_t seed) {
  Rng rng(seed);
  GridSpec spec;
  std::uniform_int_distribution<int> xs(0, spec.width - 1), ys(0, spec.height - 1);
  while (true) {
    spec.lava.clear();
    while (spec.lava.size() < 5) {
      const Cell c{xs(rng), ys(rng)};
      const bool near_start = std::abs(c.x) + std::abs(c.y) <= 1;
      if (near_start || c == spec.goal || spec.is_lava(c)) continue;
      spec.lava.push_back(c);
    }
    // Lava is passable, so reachability is checked with the lava cells blocked.
    GridSpec blocked = spec;
    blocked.walls = spec.lava;
    if (goal_reachable(blocked)) return spec;
  }
}

std::vector<Perturbation> standard_suite(const GridSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  // Cells on some shortest start-goal path.
  const auto from_start = bfs(spec, spec.start.front());
  const auto from_goal = bfs(spec, spec.goal);
  const int length = from_goal[static_cast<std::size_t>(spec.index(spec.start.front()))];
  std::vector<Cell> on_path;
  for (int s = 0; s < spec.num_states(); ++s) {
    const Cell c = spec.cell(s);
    const auto i = static_cast<std::size_t>(s);
    if (c == spec.goal || contains(spec.start, c) || spec.is_lava(c)) continue;
    if (from_start[i] >= 0 && from_goal[i] >= 0 && from_start[i] + from_goal[i] == length) on_path.push_back(c);
  }
  std::shuffle(on_path.begin(), on_path.end(), rng);

  auto keeps_goal_reachable = [&](const std::vector<Cell>& cells) {
    GridSpec blocked = spec;
    blocked.walls.insert(blocked.walls.end(), cells.begin(), cells.end());
    return goal_reachable(blocked);
  };

  std::vector<Perturbation> suite{Perturbation::identity()};
  for (const auto& c : on_path) {
    if (suite.size() >= 7) break;
    if (keeps_goal_reachable({c})) suite.push_back(Perturbation::obstacle({c}, fmt::format("block ({}, {})", c.x, c.y)));
  }
  for (std::size_t k = 0; suite.size() < 13 && k < 8 * on_path.size(); ++k) {
    const Cell corner = on_path[k % on_path.size()];
    // The arms open toward the start, so the corner faces arriving agents.
    int o = 0;
    double closest = std::numeric_limits<double>::infinity();
    for (int cand = 0; cand < kNumMoves; ++cand) {
      const Cell a = move_offset(static_cast<Move>(cand));
      const Cell b = move_offset(static_cast<Move>((cand + 1) % kNumMoves));
      const Cell s0 = spec.start.front();
      const double d = std::hypot(corner.x + a.x - s0.x, corner.y + a.y - s0.y) +
                       std::hypot(corner.x + b.x - s0.x, corner.y + b.y - s0.y);
      if (d < closest) {
        closest = d;
        o = cand;
      }
    }
    const Cell d1 = move_offset(static_cast<Move>(o));
    const Cell d2 = move_offset(static_cast<Move>((o + 1) % kNumMoves));
    std::vector<Cell> cells;
    for (const Cell c : {corner, Cell{corner.x + d1.x, corner.y + d1.y}, Cell{corner.x + d2.x, corner.y + d2.y}})
      if (spec.inside(c) && !(c == spec.goal) && !contains(spec.start, c) && !spec.is_lava(c)) cells.push_back(c);
    if (cells.size() != 3 || !keeps_goal_reachable(cells)) continue;
    suite.push_back(Perturbation::obstacle(
        cells, fmt::format("L at ({}, {}) facing {}", corner.x, corner.y, o)));
  }
  for (const Cell offset : {Cell{-1, 0}, Cell{0, -1}, Cell{-1, -1}, Cell{1, 0}, Cell{0, 1}, Cell{1, 1}, Cell{-2, 0}}) {
    if (suite.size() >= 16) break;
    const Cell g{spec.goal.x + offset.x, spec.goal.y + offset.y};
    if (!spec.inside(g) || spec.is_lava(g) || spec.is_wall(g)) continue;
    suite.push_back(Perturbation::goal_shift(offset, fmt::format("goal moved by ({}, {})", offset.x, offset.y)));
  }
  const int early = spec.horizon / 5;
  const int late = (2 * spec.horizon) / 5;
  suite.push_back(Perturbation::push(early, {{0, -1, 1.0}}, fmt::format("push down at t={}", early)));
  suite.push_back(Perturbation::push(early, {{-1, 0, 1.0}}, fmt::format("push left at t={}", early)));
  suite.push_back(Perturbation::push(late, {{0, 1, 0.5}, {0, -1, 0.5}}, fmt::format("vertical jitter at t={}", late)));
  suite.push_back(Perturbation::push(late, {{-2, 0, 1.0}}, fmt::format("push two left at t={}", late)));
  while (suite.size() < 20) suite.push_back(Perturbation::push(late, {{1, 0, 0.5}}, "push right half the time"));
  return suite;
}

std::vector<GridworldLayoutResult> gridworld_study(std::uint64_t seed, int layouts, const std::vector<double>& alphas,
                                                   int jobs) {
  std::vector<GridworldLayoutResult> out;
  for (int i = 0; i < layouts; ++i) {
    GridworldLayoutResult r;
    r.layout_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    r.spec = gridworld_layout(r.layout_seed);
    const auto suite = standard_suite(r.spec, r.layout_seed);
    const GridWorld world = build_gridworld(r.spec);
    r.greedy = worst_case_over_perturbations(r.spec, greedy_value_iteration(world.mdp).policy, suite, jobs);
    for (const double alpha : alphas)
      r.soft.push_back(worst_case_over_perturbations(r.spec, soft_value_iteration(world.mdp, alpha).policy, suite, jobs));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace maxent

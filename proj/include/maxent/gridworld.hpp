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

// Perturbable gridworlds with exact evaluation.

#pragma once

#include "maxent/mdp.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace maxent {

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Actions in index order.
enum class Move { right = 0, up = 1, left = 2, down = 3 };
inline constexpr int kNumMoves = 4;
Cell move_offset(Move move);

struct GridSpec {
  int width = 9;
  int height = 5;
  std::vector<Cell> start{{0, 0}};  ///< uniform start distribution over these cells
  Cell goal{8, 4};
  std::vector<Cell> lava;
  std::vector<Cell> walls;
  /// With probability slip the move is replaced by a uniformly random move.
  double slip = 0.1;
  int horizon = 20;
  double lava_penalty = 10;
  /// Constant added to every reward (used to make rewards positive).
  double reward_offset = 0;
  /// Use +distance to the goal instead of -distance.
  bool positive_distance_reward = false;

  bool inside(const Cell& c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  int index(const Cell& c) const { return c.y * width + c.x; }
  Cell cell(int index) const { return {index % width, index / width}; }
  int num_states() const { return width * height; }
  bool is_wall(const Cell& c) const;
  bool is_lava(const Cell& c) const;
};

void validate(const GridSpec& spec);
nlohmann::json to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

struct GridWorld {
  GridSpec spec;
  TabularMDP mdp;
  std::vector<int> goal_states;
  std::vector<int> lava_states;
};

/// Row-major cells; moves into walls or off the grid stay put; the goal absorbs.
/// r(s, a) = -||cell - goal|| - lava_penalty [cell is lava] + reward_offset.
GridWorld build_gridworld(const GridSpec& spec);

struct Displacement {
  int dx = 0;
  int dy = 0;
  double prob = 0;
};

enum class PerturbationKind { add_obstacle, move_goal, mid_episode_push };

struct Perturbation {
  PerturbationKind kind = PerturbationKind::add_obstacle;
  std::vector<Cell> cells;              ///< add_obstacle
  Cell offset;                          ///< move_goal
  int push_step = 0;                    ///< mid_episode_push: the transition out of step push_step
  std::vector<Displacement> displacement;  ///< mid_episode_push; leftover mass stays put
  std::string description;

  static Perturbation identity();
  static Perturbation obstacle(std::vector<Cell> cells, std::string description = {});
  static Perturbation goal_shift(Cell offset, std::string description = {});
  static Perturbation push(int step, std::vector<Displacement> displacement, std::string description = {});
};

std::string to_string(PerturbationKind kind);
nlohmann::json to_json(const Perturbation& p);
Perturbation perturbation_from_json(const nlohmann::json& j);

/// Pushes compile to time-indexed dynamics; the other kinds rewrite the spec.
GridWorld apply_perturbation(const GridSpec& spec, const Perturbation& perturbation);

struct GridEvaluation {
  double expected_return = 0;
  double success_prob = 0;  ///< the goal is visited at some step 1..T+1
  double lava_prob = 0;     ///< some lava cell is visited at some step 1..T+1
};

/// Probability that a state in `targets` is visited along the trajectory.
double visit_probability(const TabularMDP& mdp, const StochasticPolicy& policy, const std::vector<int>& targets);

GridEvaluation exact_evaluate(const GridWorld& world, const StochasticPolicy& policy);

struct SuiteRow {
  int perturbation_id = 0;
  std::string description;
  GridEvaluation evaluation;
};

struct WorstCase {
  double min_return = 0;
  int argmin = 0;
  std::vector<SuiteRow> table;
};

WorstCase worst_case_over_perturbations(const GridSpec& spec, const StochasticPolicy& policy,
                                        const std::vector<Perturbation>& suite, int jobs = 1);

/// 9x5 grid with the goal at (8, 4), start (0, 0) and seeded lava cells that
/// leave a start-goal path open.
GridSpec gridworld_layout(std::uint64_t seed);

/// 20 perturbations built from the layout geometry and the seed: identity,
/// single blocks and L-shaped obstacles, goal moves and mid-episode pushes.
std::vector<Perturbation> standard_suite(const GridSpec& spec, std::uint64_t seed);

struct GridworldLayoutResult {
  std::uint64_t layout_seed = 0;
  GridSpec spec;
  WorstCase greedy;
  /// One entry per temperature, in the order given.
  std::vector<WorstCase> soft;
};

/// For each layout derive_seed(seed, i): greedy and soft value-iteration
/// policies on the unperturbed grid, evaluated over standard_suite.
std::vector<GridworldLayoutResult> gridworld_study(std::uint64_t seed, int layouts, const std::vector<double>& alphas,
                                                   int jobs = 1);

}  // namespace maxent

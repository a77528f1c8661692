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

#pragma once

#include "maxent/mdp.hpp"
#include "maxent/solver.hpp"

#include <json.hpp>

#include <string>

namespace maxent {

/// Rows whose sum is off by less than this are renormalized on load; larger defects are rejected.
inline constexpr double kLoadRenormalizeTolerance = 1e-9;

/// {"num_states", "num_actions", "horizon", "initial_dist", "transitions": [s][a][s'], "rewards": [s][a]}.
/// Time-indexed dynamics are written as "transitions": [t][s][a][s'] with "time_indexed": true.
nlohmann::json mdp_to_json(const TabularMDP& mdp);
TabularMDP mdp_from_json(const nlohmann::json& doc);

TabularMDP load_mdp(const std::string& path);
void save_mdp(const TabularMDP& mdp, const std::string& path);

nlohmann::json policy_to_json(const StochasticPolicy& policy);
nlohmann::json solution_to_json(const SoftSolution& solution);

}  // namespace maxent

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

// Seeded samplers for random tabular instances.

#pragma once

#include "maxent/mdp.hpp"

#include <cstdint>
#include <random>

namespace maxent {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for the index-th independent stream derived from a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Dirichlet(concentration) draw; entries are then mixed with the uniform
/// distribution so that none falls below min_prob.
VectorXd random_distribution(Rng& rng, int n, double concentration = 1.0, double min_prob = 0.0);

struct RandomMdpOptions {
  double reward_low = -1.0;
  double reward_high = 1.0;
  double concentration = 1.0;
  /// Lower bound on every transition probability (0 allows near-sparse rows).
  double min_transition = 0.0;
};

TabularMDP random_mdp(Rng& rng, int num_states, int num_actions, int horizon,
                      const RandomMdpOptions& options = {});

/// Time-indexed policy whose entries are all at least min_prob.
StochasticPolicy random_policy(Rng& rng, int num_states, int num_actions, int horizon, double min_prob = 1e-3,
                               double concentration = 1.0);

/// Random transition kernel with the same shape as `mdp` that is positive
/// wherever `mdp`'s dynamics are (rows mix the original with a Dirichlet draw).
TransitionKernel<double> random_kernel_perturbation(Rng& rng, const TabularMDP& mdp, double strength);

}  // namespace maxent

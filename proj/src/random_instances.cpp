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

#include "maxent/random_instances.hpp"

namespace maxent {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return mix64(base ^ mix64(index)); }

VectorXd random_distribution(Rng& rng, int n, double concentration, double min_prob) {
  if (n < 1) throw ShapeError("random_distribution: n must be positive");
  if (min_prob * n > 1.0) throw PreconditionError("random_distribution: min_prob * n exceeds 1");
  std::gamma_distribution<double> gamma(concentration, 1.0);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = gamma(rng);
  if (v.sum() <= 0) v.setOnes();
  v /= v.sum();
  // Convex mix with the uniform distribution keeps the total at one.
  const double lambda = min_prob * n;
  return ((1.0 - lambda) * v.array() + min_prob).matrix();
}

TabularMDP random_mdp(Rng& rng, int num_states, int num_actions, int horizon, const RandomMdpOptions& options) {
  std::uniform_real_distribution<double> reward(options.reward_low, options.reward_high);
  TransitionKernel<double> kernel(static_cast<std::size_t>(num_actions), MatrixXd(num_states, num_states));
  for (int a = 0; a < num_actions; ++a)
    for (int s = 0; s < num_states; ++s)
      kernel[static_cast<std::size_t>(a)].row(s) =
          random_distribution(rng, num_states, options.concentration, options.min_transition).transpose();
  MatrixXd r(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) r(s, a) = reward(rng);
  VectorXd p1 = random_distribution(rng, num_states, options.concentration);
  return TabularMDP(std::move(p1), std::move(kernel), std::move(r), horizon);
}

StochasticPolicy random_policy(Rng& rng, int num_states, int num_actions, int horizon, double min_prob,
                               double concentration) {
  std::vector<MatrixXd> tables;
  for (int t = 0; t < horizon; ++t) {
    MatrixXd pi(num_states, num_actions);
    for (int s = 0; s < num_states; ++s)
      pi.row(s) = random_distribution(rng, num_actions, concentration, min_prob).transpose();
    tables.push_back(std::move(pi));
  }
  return StochasticPolicy(std::move(tables));
}

TransitionKernel<double> random_kernel_perturbation(Rng& rng, const TabularMDP& mdp, double strength) {
  if (mdp.time_indexed_dynamics())
    throw PreconditionError("random_kernel_perturbation: stationary dynamics expected");
  const int S = mdp.num_states();
  TransitionKernel<double> out = mdp.kernel(0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& m : out)
    for (int s = 0; s < S; ++s) {
      const double w = strength * unit(rng);
      const VectorXd q = random_distribution(rng, S, 1.0);
      m.row(s) = (1.0 - w) * m.row(s) + w * q.transpose();
      m.row(s) /= m.row(s).sum();
    }
  return out;
}

}  // namespace maxent

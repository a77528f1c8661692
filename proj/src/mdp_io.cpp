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

#include "maxent/mdp_io.hpp"

#include <fstream>
#include <limits>

namespace maxent {
namespace {

using nlohmann::json;

json matrix_rows(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json kernel_to_json(const TransitionKernel<double>& kernel, int S, int A) {
  json out = json::array();
  for (int s = 0; s < S; ++s) {
    json per_action = json::array();
    for (int a = 0; a < A; ++a) {
      json row = json::array();
      for (int sp = 0; sp < S; ++sp) row.push_back(kernel[static_cast<std::size_t>(a)](s, sp));
      per_action.push_back(std::move(row));
    }
    out.push_back(std::move(per_action));
  }
  return out;
}

VectorXd load_distribution(const json& values, const std::string& where) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i].get<double>();
  if (v.size() > 0 && v.minCoeff() < 0) throw PreconditionError(where + ": negative probability");
  const double residual = 1.0 - v.sum();
  if (std::abs(residual) >= kLoadRenormalizeTolerance)
    throw PreconditionError(fmt::format("{}: row sums to {} (residual {:.3e})", where, v.sum(), residual));
  // Rows already within rounding of 1 are kept bit-exact.
  if (std::abs(residual) <= 8 * std::numeric_limits<double>::epsilon()) return v;
  return v / v.sum();
}

TransitionKernel<double> kernel_from_json(const json& doc, int S, int A, const std::string& where) {
  if (!doc.is_array() || static_cast<int>(doc.size()) != S)
    throw ShapeError(where + ": expected one entry per state");
  TransitionKernel<double> kernel(static_cast<std::size_t>(A), MatrixXd::Zero(S, S));
  for (int s = 0; s < S; ++s) {
    if (static_cast<int>(doc[static_cast<std::size_t>(s)].size()) != A)
      throw ShapeError(fmt::format("{}[{}]: expected {} actions", where, s, A));
    for (int a = 0; a < A; ++a) {
      const auto& row = doc[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
      if (static_cast<int>(row.size()) != S)
        throw ShapeError(fmt::format("{}[{}][{}]: expected {} next states", where, s, a, S));
      kernel[static_cast<std::size_t>(a)].row(s) =
          load_distribution(row, fmt::format("{}[{}][{}]", where, s, a)).transpose();
    }
  }
  return kernel;
}

}  // namespace

json mdp_to_json(const TabularMDP& mdp) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  json doc;
  doc["num_states"] = S;
  doc["num_actions"] = A;
  doc["horizon"] = mdp.horizon();
  doc["initial_dist"] = std::vector<double>(mdp.initial_dist().data(), mdp.initial_dist().data() + S);
  if (mdp.time_indexed_dynamics()) {
    doc["time_indexed"] = true;
    json steps = json::array();
    for (const auto& kernel : mdp.transitions().items()) steps.push_back(kernel_to_json(kernel, S, A));
    doc["transitions"] = std::move(steps);
  } else {
    doc["transitions"] = kernel_to_json(mdp.kernel(0), S, A);
  }
  doc["rewards"] = matrix_rows(mdp.rewards());
  return doc;
}

TabularMDP mdp_from_json(const json& doc) {
  const int S = doc.at("num_states").get<int>();
  const int A = doc.at("num_actions").get<int>();
  const int T = doc.at("horizon").get<int>();
  if (S < 1 || A < 1 || T < 1) throw ShapeError("num_states, num_actions and horizon must be positive");
  const auto& init = doc.at("initial_dist");
  if (static_cast<int>(init.size()) != S) throw ShapeError("initial_dist: expected one entry per state");
  VectorXd p1 = load_distribution(init, "initial_dist");

  const auto& r = doc.at("rewards");
  if (static_cast<int>(r.size()) != S) throw ShapeError("rewards: expected one row per state");
  MatrixXd rewards(S, A);
  for (int s = 0; s < S; ++s) {
    if (static_cast<int>(r[static_cast<std::size_t>(s)].size()) != A)
      throw ShapeError(fmt::format("rewards[{}]: expected {} actions", s, A));
    for (int a = 0; a < A; ++a)
      rewards(s, a) = r[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)].get<double>();
  }

  const auto& tr = doc.at("transitions");
  if (doc.value("time_indexed", false)) {
    std::vector<TransitionKernel<double>> steps;
    for (std::size_t t = 0; t < tr.size(); ++t)
      steps.push_back(kernel_from_json(tr[t], S, A, fmt::format("transitions[{}]", t)));
    return TabularMDP(std::move(p1), PerStep<TransitionKernel<double>>(std::move(steps)), std::move(rewards), T);
  }
  return TabularMDP(std::move(p1), kernel_from_json(tr, S, A, "transitions"), std::move(rewards), T);
}

TabularMDP load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return mdp_from_json(json::parse(in));
}

void save_mdp(const TabularMDP& mdp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << mdp_to_json(mdp).dump(2) << '\n';
}

json policy_to_json(const StochasticPolicy& policy) {
  json doc;
  doc["stationary"] = policy.stationary();
  json tables = json::array();
  for (const auto& m : policy.tables()) tables.push_back(matrix_rows(m));
  doc["tables"] = std::move(tables);
  return doc;
}

json solution_to_json(const SoftSolution& solution) {
  json doc;
  doc["alpha"] = solution.alpha;
  doc["ties"] = solution.ties;
  json values = json::array();
  for (const auto& v : solution.values) values.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  doc["values"] = std::move(values);
  json qs = json::array();
  for (const auto& q : solution.q_values) qs.push_back(matrix_rows(q));
  doc["q_values"] = std::move(qs);
  doc["policy"] = policy_to_json(solution.policy);
  return doc;
}

}  // namespace maxent

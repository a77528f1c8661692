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

// Experiment runners behind the command-line tool, and the randomized
// property sweep used by `verify`.

#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace maxent {

enum class OutputFormat { csv, json };

struct RunOptions {
  std::filesystem::path out = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  OutputFormat format = OutputFormat::csv;
  /// Experiment-specific settings; missing keys take defaults.
  nlohmann::json config = nlohmann::json::object();
};

struct ExperimentOutput {
  std::vector<std::filesystem::path> files;
  nlohmann::json summary;
};

const std::vector<std::string>& experiment_names();

/// Writes the resolved config.json, the result tables and any SVG plots under options.out.
/// Throws PreconditionError for unknown names or malformed settings.
ExperimentOutput run_experiment(const std::string& name, const RunOptions& options);

struct VerifyViolation {
  std::string module;
  std::string invariant;
  std::uint64_t seed = 0;
  double residual = 0;
};

struct VerifyReport {
  long checks = 0;
  std::vector<VerifyViolation> violations;
  nlohmann::json config;
};

/// Keys: seed, instances, sizes {states, actions, horizon}, samples, and
/// tolerances (an object of named tolerances, or one number for all of them).
VerifyReport run_verify(const nlohmann::json& config, int jobs = 1);

/// Writes verify.csv (one row per violation) and verify.json under `out`.
void write_verify_report(const VerifyReport& report, const std::filesystem::path& out, OutputFormat format);

}  // namespace maxent

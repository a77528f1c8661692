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

// maxent_lab: property sweeps, experiment runs and plot rendering.
//
//   maxent_lab verify [--config c.json] [--out dir] [--seed n] [--jobs n]
//   maxent_lab run <experiment> [--config c.json] [--out dir] [--seed n] [--jobs n] [--format csv|json]
//   maxent_lab plot <table.csv> --spec plot.json [--out plot.svg]
//
// Exit status: 0 on success, 1 when verify finds violations, 2 on usage or config errors.

#include "maxent/experiments.hpp"
#include "maxent/report.hpp"
#include "maxent/types.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kUsageError = 2;

nlohmann::json load_config(const std::string& path) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw maxent::PreconditionError(fmt::format("cannot open config '{}'", path));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw maxent::PreconditionError(fmt::format("config '{}': {}", path, e.what()));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MaxEnt robustness laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string format = "csv";
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "base seed (overrides the config)");
    cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--format", format, "table format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* verify = app.add_subcommand("verify", "run the randomized property suites");
  add_common(verify);

  std::string experiment;
  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("name", experiment, "experiment name")
      ->required()
      ->check(CLI::IsMember(maxent::experiment_names()));
  add_common(run);

  std::string csv_path, spec_path, svg_path;
  auto* plot = app.add_subcommand("plot", "render a CSV table as SVG");
  plot->add_option("csv", csv_path, "input CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--spec", spec_path, "JSON plot spec {kind, x, y, group, title, x_label, y_label}")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("--out", svg_path, "output SVG (defaults to the CSV path with .svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    const auto table_format = format == "json" ? maxent::OutputFormat::json : maxent::OutputFormat::csv;
    if (*verify) {
      auto config = load_config(config_path);
      if (seed) config["seed"] = *seed;
      const auto report = maxent::run_verify(config, jobs);
      maxent::write_verify_report(report, out_dir, table_format);
      for (const auto& v : report.violations)
        fmt::print("violation module={} invariant={} seed={} residual={}\n", v.module, v.invariant, v.seed,
                   v.residual);
      fmt::print("{} checks, {} violations\n", report.checks, report.violations.size());
      return report.violations.empty() ? 0 : 1;
    }
    if (*run) {
      maxent::RunOptions options;
      options.out = out_dir;
      options.jobs = jobs;
      options.format = table_format;
      options.config = load_config(config_path);
      if (seed) options.config["seed"] = *seed;
      options.seed = options.config.value("seed", std::uint64_t{0});
      const auto output = maxent::run_experiment(experiment, options);
      for (const auto& f : output.files) fmt::print("wrote {}\n", f.string());
      if (!output.summary.empty()) fmt::print("{}\n", output.summary.dump());
      return 0;
    }
    if (*plot) {
      std::ifstream in(spec_path);
      nlohmann::json spec_json;
      try {
        spec_json = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw maxent::PreconditionError(fmt::format("plot spec '{}': {}", spec_path, e.what()));
      }
      const auto spec = maxent::plot_spec_from_json(spec_json);
      if (svg_path.empty()) svg_path = std::filesystem::path(csv_path).replace_extension(".svg").string();
      maxent::emit_plot(csv_path, spec, svg_path);
      fmt::print("wrote {}\n", svg_path);
      return 0;
    }
  } catch (const std::logic_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsageError;
  } catch (const std::runtime_error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsageError;
  }
  return kUsageError;
}

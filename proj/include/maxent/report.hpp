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

// CSV tables, metadata sidecars and SVG plots.

#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace maxent {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  /// Index of a column; throws when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

/// Shortest round-trip decimal form.
std::string format_number(double value);

std::string to_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it into place.
void atomic_write(const std::filesystem::path& path, const std::string& content);

void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// Version from `git describe` at configure time.
std::string version_string();

/// FNV-1a 64 of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Writes <path>.meta.json with the version, config hash and any extra fields.
void write_metadata(const std::filesystem::path& csv_path, const nlohmann::json& config,
                    const nlohmann::json& extra = nlohmann::json::object());

enum class PlotKind { line, bar };

struct PlotSpec {
  PlotKind kind = PlotKind::line;
  std::string x;
  std::vector<std::string> y;
  /// Optional long-format column that splits rows into series.
  std::string group;
  std::string title;
  std::string x_label;
  std::string y_label;
};

PlotSpec plot_spec_from_json(const nlohmann::json& j);

/// 800x500 SVG. Bars group rows by the x column (categorical); lines need numeric x.
std::string render_svg(const CsvTable& table, const PlotSpec& spec);

void emit_plot(const std::filesystem::path& csv_path, const PlotSpec& spec, const std::filesystem::path& svg_path);

}  // namespace maxent

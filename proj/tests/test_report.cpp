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

#include "maxent/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace maxent;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "maxent_report_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvTable sample() {
  CsvTable t;
  t.columns = {"x", "y", "label"};
  t.rows = {{"0", "1.5", "a"}, {"1", "2.25", "b, quoted"}, {"2", "-0.5", "say \"hi\""}};
  return t;
}

}  // namespace

TEST_CASE("CSV round trip") {
  const auto t = sample();
  const auto text = to_csv(t);
  CHECK(text.rfind("x,y,label\n", 0) == 0);
  const auto back = parse_csv(text);
  CHECK(back.columns == t.columns);
  CHECK(back.rows == t.rows);
  CHECK(back.column("label") == 2);
  CHECK(back.has_column("y"));
  CHECK_FALSE(back.has_column("z"));
  CHECK_THROWS(back.column("z"));
  CHECK_THROWS(parse_csv("a,b\n1,2,3\n"));
}

TEST_CASE("numbers format to round-trip precision") {
  for (const double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.125, 0.0}) CHECK(std::stod(format_number(v)) == v);
}

TEST_CASE("files, metadata and versions") {
  const auto dir = scratch("files");
  write_csv(dir / "t.csv", sample());
  CHECK(read_csv(dir / "t.csv").rows == sample().rows);
  const nlohmann::json config{{"seed", 3}, {"n", 2}};
  write_metadata(dir / "t.csv", config, {{"note", "x"}});
  const auto meta = nlohmann::json::parse(slurp(dir / "t.csv.meta.json"));
  CHECK(meta.at("version").get<std::string>() == version_string());
  CHECK(meta.at("config_hash").get<std::string>() == config_hash(config));
  CHECK(meta.at("note") == "x");
  CHECK(config_hash(config) == config_hash(nlohmann::json{{"n", 2}, {"seed", 3}}));
  CHECK(config_hash(config) != config_hash(nlohmann::json{{"seed", 4}, {"n", 2}}));
  CHECK(version_string().rfind("0.1.0", 0) == 0);
  atomic_write(dir / "t.csv", "x\n");
  CHECK(slurp(dir / "t.csv") == "x\n");
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    CHECK(entry.path().extension() != ".tmp");
  CHECK_THROWS(read_csv(dir / "missing.csv"));
}

TEST_CASE("SVG rendering") {
  PlotSpec spec;
  spec.x = "x";
  spec.y = {"y"};
  spec.title = "t";
  const auto svg = render_svg(sample(), spec);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("width=\"800\"") != std::string::npos);
  CHECK(svg.find("height=\"500\"") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(render_svg(sample(), spec) == svg);

  spec.y = {"missing"};
  CHECK_THROWS(render_svg(sample(), spec));

  CsvTable empty;
  empty.columns = {"x", "y"};
  spec.y = {"y"};
  const auto axes = render_svg(empty, spec);
  CHECK(axes.find("<polyline") == std::string::npos);
  CHECK(axes.find("<line") != std::string::npos);

  CsvTable bars;
  bars.columns = {"problem_id", "method", "normalized_minimax"};
  bars.rows = {{"0", "a", "1"}, {"0", "b", "0.5"}, {"1", "a", "0.9"}, {"1", "b", "0.4"}};
  const auto bar_spec = plot_spec_from_json(
      nlohmann::json{{"kind", "bar"}, {"x", "problem_id"}, {"y", {"normalized_minimax"}}, {"group", "method"}});
  CHECK(bar_spec.kind == PlotKind::bar);
  const auto grouped = render_svg(bars, bar_spec);
  std::size_t rects = 0;
  for (auto pos = grouped.find("<rect"); pos != std::string::npos; pos = grouped.find("<rect", pos + 1)) ++rects;
  CHECK(rects >= 4);

  // Re-rendering from the written CSV is byte-stable.
  const auto dir = scratch("svg");
  write_csv(dir / "bars.csv", bars);
  emit_plot(dir / "bars.csv", bar_spec, dir / "a.svg");
  emit_plot(dir / "bars.csv", bar_spec, dir / "b.svg");
  CHECK(slurp(dir / "a.svg") == slurp(dir / "b.svg"));
  CHECK(slurp(dir / "a.svg") == grouped);
}

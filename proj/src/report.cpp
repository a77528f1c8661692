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

#include "maxent/types.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#ifndef MAXENT_VERSION
#define MAXENT_VERSION "0.1.0"
#endif

namespace maxent {
namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (const char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double parse_double(const std::string& s, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError(fmt::format("column '{}' has a non-numeric value '{}'", column, s));
  }
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 60;

struct Axis {
  double lo = 0, hi = 1;
  double to_y(double v) const { return kTop + (kHeight - kTop - kBottom) * (hi - v) / (hi - lo); }
};

Axis make_axis(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) return {};
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void draw_frame(std::ostringstream& svg, const PlotSpec& spec, const Axis& y) {
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kTop, y1 = kHeight - kBottom;
  svg << fmt::format(R"(<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#000"/>)", x0, y0, x1 - x0,
                     y1 - y0)
      << "\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = y.lo + (y.hi - y.lo) * i / 4;
    const double py = y.to_y(v);
    svg << fmt::format(R"(<line x1="{}" y1="{:.2f}" x2="{}" y2="{:.2f}" stroke="#ddd"/>)", x0, py, x1, py) << "\n";
    svg << fmt::format(R"(<text x="{}" y="{:.2f}" font-size="11" text-anchor="end">{:.3g}</text>)", x0 - 6, py + 4, v)
        << "\n";
  }
  svg << fmt::format(R"(<text x="{}" y="24" font-size="15" text-anchor="middle">{}</text>)", (x0 + x1) / 2,
                     escape_xml(spec.title))
      << "\n";
  svg << fmt::format(R"(<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>)", (x0 + x1) / 2,
                     kHeight - 15, escape_xml(spec.x_label.empty() ? spec.x : spec.x_label))
      << "\n";
  svg << fmt::format(R"svg(<text x="16" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>)svg",
                     (y0 + y1) / 2, (y0 + y1) / 2, escape_xml(spec.y_label))
      << "\n";
}

void draw_legend(std::ostringstream& svg, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double py = kTop + 10 + 18 * static_cast<double>(i);
    svg << fmt::format(R"(<rect x="{}" y="{:.0f}" width="12" height="12" fill="{}"/>)", kWidth - kRight + 12, py,
                       kPalette[i % kPalette.size()])
        << "\n";
    svg << fmt::format(R"(<text x="{}" y="{:.0f}" font-size="11">{}</text>)", kWidth - kRight + 30, py + 10,
                       escape_xml(names[i]))
        << "\n";
  }
}

// Series name -> (x, y) points, in order of first appearance.
struct Series {
  std::vector<std::string> names;
  std::map<std::string, std::vector<std::pair<std::string, double>>> points;
};

Series collect(const CsvTable& table, const PlotSpec& spec) {
  if (!table.has_column(spec.x)) throw PreconditionError(fmt::format("missing column '{}'", spec.x));
  if (spec.y.empty()) throw PreconditionError("plot spec needs at least one y column");
  for (const auto& y : spec.y)
    if (!table.has_column(y)) throw PreconditionError(fmt::format("missing column '{}'", y));
  if (!spec.group.empty() && !table.has_column(spec.group))
    throw PreconditionError(fmt::format("missing column '{}'", spec.group));
  Series out;
  const std::size_t xi = table.column(spec.x);
  for (const auto& row : table.rows)
    for (const auto& y : spec.y) {
      std::string name = spec.group.empty() ? y : row[table.column(spec.group)];
      if (!spec.group.empty() && spec.y.size() > 1) name += ":" + y;
      if (!out.points.count(name)) out.names.push_back(name);
      out.points[name].emplace_back(row[xi], parse_double(row[table.column(y)], y));
    }
  return out;
}

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw PreconditionError(fmt::format("missing column '{}'", name));
  return static_cast<std::size_t>(it - columns.begin());
}

bool CsvTable::has_column(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::string format_number(double value) { return fmt::format("{}", value); }

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + quote(fields[i]);
    out += "\n";
  };
  line(table.columns);
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw ShapeError(fmt::format("CSV row has {} fields for {} columns", row.size(), table.columns.size()));
    line(row);
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_record(line);
    if (header) {
      table.columns = std::move(fields);
      header = false;
    } else {
      if (fields.size() != table.columns.size())
        throw ShapeError(fmt::format("CSV row has {} fields for {} columns", fields.size(), table.columns.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw PreconditionError(fmt::format("cannot write '{}'", tmp.string()));
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { atomic_write(path, to_csv(table)); }

std::string version_string() { return MAXENT_VERSION; }

std::string config_hash(const nlohmann::json& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

void write_metadata(const std::filesystem::path& csv_path, const nlohmann::json& config, const nlohmann::json& extra) {
  nlohmann::json meta = extra;
  meta["version"] = version_string();
  meta["config_hash"] = config_hash(config);
  meta["config"] = config;
  meta["file"] = csv_path.filename().string();
  atomic_write(csv_path.string() + ".meta.json", meta.dump(2) + "\n");
}

PlotSpec plot_spec_from_json(const nlohmann::json& j) {
  PlotSpec spec;
  const auto kind = j.value("kind", std::string("line"));
  if (kind != "line" && kind != "bar") throw PreconditionError(fmt::format("unknown plot kind '{}'", kind));
  spec.kind = kind == "bar" ? PlotKind::bar : PlotKind::line;
  spec.x = j.at("x").get<std::string>();
  const auto& y = j.at("y");
  spec.y = y.is_array() ? y.get<std::vector<std::string>>() : std::vector<std::string>{y.get<std::string>()};
  spec.group = j.value("group", std::string{});
  spec.title = j.value("title", std::string{});
  spec.x_label = j.value("x_label", std::string{});
  spec.y_label = j.value("y_label", std::string{});
  return spec;
}

std::string render_svg(const CsvTable& table, const PlotSpec& spec) {
  const Series series = collect(table, spec);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& [name, pts] : series.points)
    for (const auto& [x, y] : pts) {
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
  if (spec.kind == PlotKind::bar && std::isfinite(lo)) {
    lo = std::min(lo, 0.0);
    hi = std::max(hi, 0.0);
  }
  const Axis y = make_axis(lo, hi);

  std::ostringstream svg;
  svg << fmt::format(R"(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">)", kWidth,
                     kHeight, kWidth, kHeight)
      << "\n";
  svg << R"(<rect width="100%" height="100%" fill="#fff"/>)" << "\n";
  draw_frame(svg, spec, y);
  const double x0 = kLeft, x1 = kWidth - kRight;

  if (spec.kind == PlotKind::bar) {
    std::vector<std::string> categories;
    for (const auto& name : series.names)
      for (const auto& [x, v] : series.points.at(name))
        if (std::find(categories.begin(), categories.end(), x) == categories.end()) categories.push_back(x);
    const double slot = categories.empty() ? 0 : (x1 - x0) / static_cast<double>(categories.size());
    const double bar = series.names.empty() ? 0 : 0.8 * slot / static_cast<double>(series.names.size());
    for (std::size_t c = 0; c < categories.size(); ++c) {
      const double cx = x0 + slot * (static_cast<double>(c) + 0.5);
      svg << fmt::format(R"(<text x="{:.2f}" y="{}" font-size="11" text-anchor="middle">{}</text>)", cx,
                         kHeight - kBottom + 16, escape_xml(categories[c]))
          << "\n";
    }
    const double zero = y.to_y(0);
    for (std::size_t s = 0; s < series.names.size(); ++s)
      for (const auto& [x, v] : series.points.at(series.names[s])) {
        const auto c = static_cast<double>(std::find(categories.begin(), categories.end(), x) - categories.begin());
        const double left = x0 + slot * c + 0.1 * slot + bar * static_cast<double>(s);
        const double top = std::min(zero, y.to_y(v));
        svg << fmt::format(R"(<rect x="{:.2f}" y="{:.2f}" width="{:.2f}" height="{:.2f}" fill="{}"/>)", left, top, bar,
                           std::abs(y.to_y(v) - zero), kPalette[s % kPalette.size()])
            << "\n";
      }
  } else {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    for (const auto& [name, pts] : series.points)
      for (const auto& [x, v] : pts) {
        const double xv = parse_double(x, spec.x);
        xlo = std::min(xlo, xv);
        xhi = std::max(xhi, xv);
      }
    const Axis xa = make_axis(xlo, xhi);
    auto to_x = [&](double v) { return x0 + (x1 - x0) * (v - xa.lo) / (xa.hi - xa.lo); };
    for (int i = 0; i <= 4; ++i) {
      const double v = xa.lo + (xa.hi - xa.lo) * i / 4;
      svg << fmt::format(R"(<text x="{:.2f}" y="{}" font-size="11" text-anchor="middle">{:.3g}</text>)", to_x(v),
                         kHeight - kBottom + 16, v)
          << "\n";
    }
    for (std::size_t s = 0; s < series.names.size(); ++s) {
      std::string path;
      for (const auto& [x, v] : series.points.at(series.names[s]))
        path += fmt::format("{}{:.2f},{:.2f}", path.empty() ? "" : " ", to_x(parse_double(x, spec.x)), y.to_y(v));
      svg << fmt::format(R"(<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>)", path,
                         kPalette[s % kPalette.size()])
          << "\n";
    }
  }
  draw_legend(svg, series.names);
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const std::filesystem::path& csv_path, const PlotSpec& spec, const std::filesystem::path& svg_path) {
  atomic_write(svg_path, render_svg(read_csv(csv_path), spec));
}

}  // namespace maxent

// src/eval/report.cpp

// Copyright 2026  The slmforge Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "slmforge/eval/report.hpp"

#include <algorithm>
#include <cstdio>

#include "slmforge/common/error.hpp"
#include "slmforge/common/text.hpp"

namespace slmforge::eval {
namespace {

std::size_t DisplayWidth(const std::string& s) { return DecodeUtf8(s).size(); }

std::string Pad(const std::string& s, std::size_t width, bool left) {
  const std::size_t w = DisplayWidth(s);
  const std::string fill(width > w ? width - w : 0, ' ');
  return left ? s + fill : fill + s;
}

std::string DirectionName(Direction d) {
  switch (d) {
    case Direction::kLower: return "lower";
    case Direction::kHigher: return "higher";
    default: return "none";
  }
}

Direction ParseDirection(const std::string& s) {
  if (s == "lower") return Direction::kLower;
  if (s == "higher") return Direction::kHigher;
  if (s == "none" || s.empty()) return Direction::kNone;
  throw ConfigError("unknown column direction '" + s + "'");
}

}  // namespace

std::string ColumnHeader(const Column& column) {
  switch (column.direction) {
    case Direction::kLower: return column.title + " (↓)";
    case Direction::kHigher: return column.title + " (↑)";
    default: return column.title;
  }
}

std::string FormatCell(const Column& column, const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", column.precision, std::get<double>(cell));
  return buf;
}

std::string RenderText(const Report& report) {
  const std::size_t ncol = report.columns.size() + 1;
  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header{report.name_title};
  for (const auto& c : report.columns) header.push_back(ColumnHeader(c));
  grid.push_back(header);
  for (const auto& row : report.rows) {
    std::vector<std::string> line{row.name};
    for (const auto& c : report.columns) {
      auto it = row.cells.find(c.key);
      line.push_back(it == row.cells.end() ? "-" : FormatCell(c, it->second));
    }
    grid.push_back(line);
  }
  std::vector<std::size_t> width(ncol, 0);
  for (const auto& line : grid)
    for (std::size_t i = 0; i < ncol; ++i) width[i] = std::max(width[i], DisplayWidth(line[i]));

  std::string out;
  if (!report.title.empty()) out += report.title + "\n";
  std::size_t total = 0;
  for (std::size_t i = 0; i < ncol; ++i) total += width[i] + (i ? 2 : 0);
  for (std::size_t r = 0; r < grid.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < ncol; ++i) {
      if (i) line += "  ";
      line += Pad(grid[r][i], width[i], i == 0);
    }
    out += line + "\n";
    if (r == 0) out += std::string(total, '-') + "\n";
  }
  return out;
}

std::string RenderJson(const Report& report) {
  nlohmann::json j;
  j["title"] = report.title;
  j["name_title"] = report.name_title;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : report.columns) {
    j["columns"].push_back({{"key", c.key},
                            {"title", c.title},
                            {"direction", DirectionName(c.direction)},
                            {"precision", c.precision}});
  }
  j["rows"] = nlohmann::json::array();
  for (const auto& row : report.rows) {
    nlohmann::json cells = nlohmann::json::object();
    for (const auto& c : report.columns) {
      auto it = row.cells.find(c.key);
      if (it == row.cells.end()) continue;
      if (const auto* s = std::get_if<std::string>(&it->second)) {
        cells[c.key] = *s;
      } else {
        cells[c.key] = {{"value", std::get<double>(it->second)}, {"display", FormatCell(c, it->second)}};
      }
    }
    j["rows"].push_back({{"name", row.name}, {"cells", cells}});
  }
  return j.dump(2) + "\n";
}

Report ReportFromJson(const nlohmann::json& j) {
  Report r;
  r.title = j.value("title", "");
  r.name_title = j.value("name_title", r.name_title);
  for (const auto& c : j.at("columns")) {
    r.columns.push_back(Column{c.at("key").get<std::string>(), c.at("title").get<std::string>(),
                               ParseDirection(c.value("direction", "none")), c.value("precision", 2)});
  }
  for (const auto& row : j.at("rows")) {
    ReportRow out;
    out.name = row.at("name").get<std::string>();
    for (const auto& [key, v] : row.at("cells").items()) {
      if (v.is_string()) {
        out.cells[key] = v.get<std::string>();
      } else if (v.is_number()) {
        out.cells[key] = v.get<double>();
      } else if (v.is_object() && v.contains("value")) {
        out.cells[key] = v.at("value").get<double>();
      } else {
        throw ConfigError("report cell '" + key + "' must be a number or string");
      }
    }
    r.rows.push_back(std::move(out));
  }
  return r;
}

Report BuildMetricReport(const std::string& title, const std::vector<SystemScores>& systems,
                         const std::vector<std::string>& metrics) {
  Report r;
  r.title = title;
  for (const auto& m : metrics) {
    if (m == "wer") r.columns.push_back({"wer", "WER", Direction::kLower, 2});
    else if (m == "cer") r.columns.push_back({"cer", "CER", Direction::kLower, 2});
    else if (m == "chrf") r.columns.push_back({"chrf", "ChRF", Direction::kHigher, 2});
    else if (m == "bs_f1") r.columns.push_back({"bs_f1", "BS-F1", Direction::kHigher, 2});
    else r.columns.push_back({m, m, Direction::kNone, 2});
  }
  r.columns.push_back({"utterances", "Utts", Direction::kNone, 0});
  r.columns.push_back({"ref_words", "RefWords", Direction::kNone, 0});
  for (const auto& s : systems) {
    ReportRow row;
    row.name = s.name;
    for (const auto& m : metrics) {
      auto it = s.metrics.find(m);
      if (it == s.metrics.end()) continue;
      row.cells[m] = (m == "wer" || m == "cer") ? 100.0 * it->second : it->second;
    }
    row.cells["utterances"] = static_cast<double>(s.utterances);
    row.cells["ref_words"] = static_cast<double>(s.ref_words);
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace slmforge::eval

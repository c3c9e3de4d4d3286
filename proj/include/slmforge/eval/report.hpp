// include/slmforge/eval/report.hpp

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

#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace slmforge::eval {

enum class Direction { kNone, kLower, kHigher };

struct Column {
  std::string key;
  std::string title;
  Direction direction = Direction::kNone;
  int precision = 2;
};

using Cell = std::variant<double, std::string>;

struct ReportRow {
  std::string name;
  std::map<std::string, Cell> cells;
};

struct Report {
  std::string title;
  std::string name_title = "System";
  std::vector<Column> columns;
  std::vector<ReportRow> rows;
};

// "WER (↓)" style header.
std::string ColumnHeader(const Column& column);
std::string FormatCell(const Column& column, const Cell& cell);

// Left-aligned name column, right-aligned value columns, a rule under the
// header. Missing cells render as "-". No rows gives the header alone.
std::string RenderText(const Report& report);
std::string RenderJson(const Report& report);
Report ReportFromJson(const nlohmann::json& j);

struct SystemScores {
  std::string name;
  std::size_t utterances = 0;
  std::size_t ref_words = 0;
  std::map<std::string, double> metrics;  // wer/cer as fractions, chrf 0..100, extras as given
};

// Rates are shown as percentages. Columns follow `metrics` order; known keys
// are wer, cer, chrf and bs_f1.
Report BuildMetricReport(const std::string& title, const std::vector<SystemScores>& systems,
                         const std::vector<std::string>& metrics);

}  // namespace slmforge::eval

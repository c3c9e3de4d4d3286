// src/curate/pipeline.cpp

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

#include "slmforge/curate/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "slmforge/audio/wav.hpp"
#include "slmforge/common/hash.hpp"
#include "slmforge/common/log.hpp"
#include "slmforge/common/parallel.hpp"
#include "slmforge/common/text.hpp"
#include "slmforge/curate/diarize.hpp"
#include "slmforge/curate/separation.hpp"
#include "slmforge/curate/vad.hpp"

namespace slmforge::curate {

std::string ConfigHash(const nlohmann::json& config) { return HashHex(config.dump()); }

std::vector<Span> SplitLongSpans(const std::vector<Span>& spans, double max_s) {
  std::vector<Span> out;
  for (const auto& s : spans) {
    double start = s.start_s;
    while (s.end_s - start > max_s) {
      out.push_back(Span{start, start + max_s, s.speaker});
      start += max_s;
    }
    if (s.end_s > start) out.push_back(Span{start, s.end_s, s.speaker});
  }
  return out;
}

std::vector<SegmentRecord> SegmentBuffer(const audio::AudioBuffer& buf, const std::string& source_path,
                                         const PipelineConfig& cfg) {
  const audio::AudioBuffer clean = SeparateSources(buf, cfg);
  const std::vector<Span> vad = VadSegments(clean, cfg.vad);
  const std::vector<Span> speakers = Diarize(clean, vad, cfg.diarize);
  const std::string stem = std::filesystem::path(source_path).stem().string();
  std::vector<SegmentRecord> records;
  for (const auto& s : speakers) {
    // Pieces carry max_dur_s itself, not a difference of offsets.
    std::vector<std::pair<double, double>> pieces;
    double start = s.start_s;
    while (s.end_s - start > cfg.max_dur_s) {
      pieces.emplace_back(start, cfg.max_dur_s);
      start += cfg.max_dur_s;
    }
    if (s.end_s > start) pieces.emplace_back(start, s.end_s - start);
    for (const auto& [offset, duration] : pieces) {
      SegmentRecord r;
      char id[32];
      std::snprintf(id, sizeof id, "_%04zu", records.size());
      r.id = stem + id;
      r.source_path = source_path;
      r.offset_s = offset;
      r.duration_s = duration;
      r.speaker = s.speaker;
      r.sample_rate = clean.sample_rate;
      r.quality_score = QualityScore(clean.Slice(offset, duration), cfg);
      records.push_back(std::move(r));
    }
  }
  return records;
}

Manifest RunPipeline(const std::vector<std::string>& input_paths, const PipelineConfig& cfg) {
  cfg.Validate();
  struct FileResult {
    std::vector<SegmentRecord> candidates;
    std::string warning;
  };
  std::vector<FileResult> results(input_paths.size());
  ParallelFor(input_paths.size(), cfg.jobs, [&](std::size_t i) {
    audio::AudioBuffer buf;
    try {
      buf = audio::ReadWav(input_paths[i]);
    } catch (const audio::WavError& e) {
      results[i].warning = input_paths[i] + ": " + e.what();
      return;
    }
    buf = audio::Resample(buf, cfg.sample_rate);
    results[i].candidates = SegmentBuffer(buf, input_paths[i], cfg);
  });

  Manifest m;
  m.header.config = cfg;
  m.header.config_hash = ConfigHash(m.header.config);
  m.header.inputs = input_paths.size();
  for (const char* reason : {"too_short", "too_long", "low_quality"}) m.header.rejected[reason] = 0;
  double seconds = 0.0;
  for (auto& r : results) {
    if (!r.warning.empty()) {
      LogWarn("curate: ", r.warning);
      m.header.warnings.push_back(r.warning);
      continue;
    }
    m.header.candidates += r.candidates.size();
    FilterResult f = FilterSegments(r.candidates, cfg);
    for (auto& k : f.kept) {
      seconds += k.duration_s;
      m.records.push_back(std::move(k));
    }
    for (auto& [rec, why] : f.rejected) {
      ++m.header.rejected[RejectReasonName(why)];
      m.rejected.emplace_back(std::move(rec), why);
    }
  }
  m.header.total_records = m.records.size();
  m.header.total_hours = seconds / 3600.0;
  return m;
}

std::string SerializeManifest(const Manifest& manifest) {
  const ManifestHeader& h = manifest.header;
  nlohmann::json header{{"__header__", true},
                        {"pipeline_version", h.pipeline_version},
                        {"config_hash", h.config_hash},
                        {"config", h.config},
                        {"inputs", h.inputs},
                        {"candidates", h.candidates},
                        {"total_records", h.total_records},
                        {"total_hours", h.total_hours},
                        {"rejected", h.rejected},
                        {"warnings", h.warnings}};
  std::string out = header.dump() + "\n";
  for (const auto& r : manifest.records) out += nlohmann::json(r).dump() + "\n";
  return out;
}

void WriteManifest(const std::string& path, const Manifest& manifest) {
  WriteFile(path, SerializeManifest(manifest));
}

Manifest ParseManifest(std::string_view contents) {
  Manifest m;
  bool first = true;
  std::size_t line_no = 0;
  for (const auto& line : SplitString(contents, '\n')) {
    ++line_no;
    if (Trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("manifest line " + std::to_string(line_no) + " is not JSON: " + e.what());
    }
    if (first && j.value("__header__", false)) {
      ManifestHeader& h = m.header;
      h.pipeline_version = j.value("pipeline_version", "");
      h.config_hash = j.value("config_hash", "");
      h.config = j.value("config", nlohmann::json::object());
      h.inputs = j.value("inputs", std::size_t{0});
      h.candidates = j.value("candidates", std::size_t{0});
      h.total_records = j.value("total_records", std::size_t{0});
      h.total_hours = j.value("total_hours", 0.0);
      h.rejected = j.value("rejected", std::map<std::string, std::size_t>{});
      h.warnings = j.value("warnings", std::vector<std::string>{});
    } else {
      try {
        m.records.push_back(j.get<SegmentRecord>());
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("manifest line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    first = false;
  }
  return m;
}

Manifest ReadManifest(const std::string& path) { return ParseManifest(ReadFile(path)); }

}  // namespace slmforge::curate

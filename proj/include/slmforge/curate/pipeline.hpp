// include/slmforge/curate/pipeline.hpp

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
#include <vector>

#include <json.hpp>

#include "slmforge/audio/audio.hpp"
#include "slmforge/curate/quality.hpp"
#include "slmforge/curate/types.hpp"

namespace slmforge::curate {

inline constexpr const char* kPipelineVersion = "1";

struct ManifestHeader {
  std::string pipeline_version = kPipelineVersion;
  std::string config_hash;
  nlohmann::json config;
  std::size_t inputs = 0;
  std::size_t candidates = 0;
  std::size_t total_records = 0;
  double total_hours = 0.0;
  std::map<std::string, std::size_t> rejected;  // reason -> count
  std::vector<std::string> warnings;
};

struct Manifest {
  ManifestHeader header;
  std::vector<SegmentRecord> records;
  std::vector<std::pair<SegmentRecord, RejectReason>> rejected;
};

// FNV-1a of the config serialized as sorted-key JSON.
std::string ConfigHash(const nlohmann::json& config);

// Spans longer than max_s become consecutive pieces of max_s plus a
// remainder.
std::vector<Span> SplitLongSpans(const std::vector<Span>& spans, double max_s);

// Candidate segments of one buffer (already at the pipeline rate), before
// filtering. Ids are <stem>_<nnnn> in span order.
std::vector<SegmentRecord> SegmentBuffer(const audio::AudioBuffer& buf, const std::string& source_path,
                                         const PipelineConfig& cfg);

// read -> resample -> separate -> VAD -> diarize -> split -> score -> filter.
// Files are processed by cfg.jobs workers and merged in input order.
Manifest RunPipeline(const std::vector<std::string>& input_paths, const PipelineConfig& cfg);

// Header line with "__header__": true, then one kept record per line.
std::string SerializeManifest(const Manifest& manifest);
void WriteManifest(const std::string& path, const Manifest& manifest);
Manifest ParseManifest(std::string_view contents);
Manifest ReadManifest(const std::string& path);

}  // namespace slmforge::curate

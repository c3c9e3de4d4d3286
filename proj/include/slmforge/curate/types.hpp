// include/slmforge/curate/types.hpp

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

#include <optional>
#include <string>

#include <json.hpp>

#include "slmforge/common/error.hpp"

namespace slmforge::curate {

// A stage (separation, scoring, ...) failed; external tools report their
// exit code and a stderr excerpt.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& message, int exit_code = 0,
             std::string stderr_excerpt = "");
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }
  const std::string& stderr_excerpt() const { return stderr_; }

 private:
  std::string stage_;
  int exit_code_;
  std::string stderr_;
};

struct Span {
  double start_s = 0.0;
  double end_s = 0.0;
  std::optional<std::string> speaker;
  double duration_s() const { return end_s - start_s; }
};

enum class Split { kTrain, kTest, kUnsplit };

std::string SplitName(Split s);
Split ParseSplit(const std::string& s);

struct SegmentRecord {
  std::string id;
  std::string source_path;
  double offset_s = 0.0;
  double duration_s = 0.0;
  std::optional<std::string> speaker;
  double quality_score = 1.0;
  int sample_rate = 16000;
  std::optional<std::string> transcript;
  std::optional<std::string> translation;
  Split split = Split::kUnsplit;
};

void to_json(nlohmann::json& j, const SegmentRecord& r);
void from_json(const nlohmann::json& j, SegmentRecord& r);

struct VadConfig {
  double energy_threshold_db = 12.0;
  double hangover_ms = 300.0;
  double min_speech_ms = 250.0;
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  void Validate() const;
};

struct DiarizeConfig {
  double window_s = 1.0;
  double cluster_distance_threshold = 0.5;
  void Validate() const;
};

struct PipelineConfig {
  double min_dur_s = 3.0;
  double max_dur_s = 30.0;
  double quality_threshold = 3.2;
  int sample_rate = 16000;
  VadConfig vad;
  DiarizeConfig diarize;
  std::string separator = "passthrough";  // passthrough | spectral-gate | external
  std::string separator_command;
  std::string scorer = "snr-proxy";  // snr-proxy | external
  std::string scorer_command;
  int jobs = 1;
  void Validate() const;
};

void to_json(nlohmann::json& j, const PipelineConfig& c);
void from_json(const nlohmann::json& j, PipelineConfig& c);

}  // namespace slmforge::curate

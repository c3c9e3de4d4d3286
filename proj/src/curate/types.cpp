// src/curate/types.cpp

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

#include "slmforge/curate/types.hpp"

namespace slmforge::curate {

StageError::StageError(const std::string& stage, const std::string& message, int exit_code,
                       std::string stderr_excerpt)
    : Error(stage + ": " + message +
            (stderr_excerpt.empty() ? "" : " (stderr: " + stderr_excerpt + ")")),
      stage_(stage),
      exit_code_(exit_code),
      stderr_(std::move(stderr_excerpt)) {}

std::string SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kTest: return "test";
    default: return "unsplit";
  }
}

Split ParseSplit(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  if (s == "unsplit" || s.empty()) return Split::kUnsplit;
  throw ConfigError("unknown split '" + s + "'");
}

namespace {

nlohmann::json Optional(const std::optional<std::string>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<std::string> ReadOptional(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

void to_json(nlohmann::json& j, const SegmentRecord& r) {
  j = nlohmann::json{{"id", r.id},
                     {"source_path", r.source_path},
                     {"offset_s", r.offset_s},
                     {"duration_s", r.duration_s},
                     {"speaker", Optional(r.speaker)},
                     {"quality_score", r.quality_score},
                     {"sample_rate", r.sample_rate},
                     {"transcript", Optional(r.transcript)},
                     {"translation", Optional(r.translation)},
                     {"split", SplitName(r.split)}};
}

void from_json(const nlohmann::json& j, SegmentRecord& r) {
  r.id = j.at("id").get<std::string>();
  r.source_path = j.at("source_path").get<std::string>();
  r.offset_s = j.value("offset_s", 0.0);
  r.duration_s = j.at("duration_s").get<double>();
  r.speaker = ReadOptional(j, "speaker");
  r.quality_score = j.value("quality_score", 1.0);
  r.sample_rate = j.value("sample_rate", 16000);
  r.transcript = ReadOptional(j, "transcript");
  r.translation = ReadOptional(j, "translation");
  r.split = ParseSplit(j.value("split", "unsplit"));
}

void VadConfig::Validate() const {
  if (!(frame_ms > 0 && hop_ms > 0)) throw ConfigError("VAD frame and hop must be positive");
  if (hangover_ms < 0 || min_speech_ms < 0) throw ConfigError("VAD durations must be >= 0");
}

void DiarizeConfig::Validate() const {
  if (!(window_s > 0)) throw ConfigError("diarization window_s must be positive");
  if (cluster_distance_threshold < 0) throw ConfigError("cluster distance threshold must be >= 0");
}

void PipelineConfig::Validate() const {
  if (!(min_dur_s < max_dur_s)) throw ConfigError("min_dur_s must be below max_dur_s");
  if (min_dur_s < 0) throw ConfigError("min_dur_s must be >= 0");
  if (quality_threshold < 1.0 || quality_threshold > 5.0) {
    throw ConfigError("quality_threshold must lie in [1, 5]");
  }
  if (sample_rate <= 0) throw ConfigError("sample_rate must be positive");
  if (separator != "passthrough" && separator != "spectral-gate" && separator != "external") {
    throw ConfigError("unknown separator '" + separator + "'");
  }
  if (separator == "external" && separator_command.empty()) {
    throw ConfigError("external separator needs separator_command");
  }
  if (scorer != "snr-proxy" && scorer != "external") throw ConfigError("unknown scorer '" + scorer + "'");
  if (scorer == "external" && scorer_command.empty()) {
    throw ConfigError("external scorer needs scorer_command");
  }
  vad.Validate();
  diarize.Validate();
}

void to_json(nlohmann::json& j, const PipelineConfig& c) {
  j = nlohmann::json{
      {"min_dur_s", c.min_dur_s},
      {"max_dur_s", c.max_dur_s},
      {"quality_threshold", c.quality_threshold},
      {"sample_rate", c.sample_rate},
      {"vad",
       {{"energy_threshold_db", c.vad.energy_threshold_db},
        {"hangover_ms", c.vad.hangover_ms},
        {"min_speech_ms", c.vad.min_speech_ms},
        {"frame_ms", c.vad.frame_ms},
        {"hop_ms", c.vad.hop_ms}}},
      {"diarize",
       {{"window_s", c.diarize.window_s},
        {"cluster_distance_threshold", c.diarize.cluster_distance_threshold}}},
      {"separator", c.separator},
      {"separator_command", c.separator_command},
      {"scorer", c.scorer},
      {"scorer_command", c.scorer_command}};
}

void from_json(const nlohmann::json& j, PipelineConfig& c) {
  PipelineConfig d;
  c.min_dur_s = j.value("min_dur_s", d.min_dur_s);
  c.max_dur_s = j.value("max_dur_s", d.max_dur_s);
  c.quality_threshold = j.value("quality_threshold", d.quality_threshold);
  c.sample_rate = j.value("sample_rate", d.sample_rate);
  if (j.contains("vad")) {
    const auto& v = j.at("vad");
    c.vad.energy_threshold_db = v.value("energy_threshold_db", d.vad.energy_threshold_db);
    c.vad.hangover_ms = v.value("hangover_ms", d.vad.hangover_ms);
    c.vad.min_speech_ms = v.value("min_speech_ms", d.vad.min_speech_ms);
    c.vad.frame_ms = v.value("frame_ms", d.vad.frame_ms);
    c.vad.hop_ms = v.value("hop_ms", d.vad.hop_ms);
  }
  if (j.contains("diarize")) {
    const auto& v = j.at("diarize");
    c.diarize.window_s = v.value("window_s", d.diarize.window_s);
    c.diarize.cluster_distance_threshold =
        v.value("cluster_distance_threshold", d.diarize.cluster_distance_threshold);
  }
  c.separator = j.value("separator", d.separator);
  c.separator_command = j.value("separator_command", d.separator_command);
  c.scorer = j.value("scorer", d.scorer);
  c.scorer_command = j.value("scorer_command", d.scorer_command);
}

}  // namespace slmforge::curate

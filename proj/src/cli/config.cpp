// src/cli/config.cpp

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

#include "slmforge/cli/config.hpp"

#include <cstdlib>

#include "slmforge/common/hash.hpp"
#include "slmforge/common/text.hpp"

namespace slmforge::cli {

nlohmann::json RunConfig::Section(const std::string& name) const {
  if (file.contains(name)) {
    if (!file.at(name).is_object()) throw ConfigError("config section '" + name + "' must be an object");
    return file.at(name);
  }
  return nlohmann::json::object();
}

namespace {

std::uint64_t ParseSeed(const std::string& text, const std::string& origin) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(origin + " value '" + text + "' is not a non-negative integer");
  }
}

}  // namespace

RunConfig ResolveRunConfig(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
                           std::optional<int> jobs_flag, bool deterministic,
                           std::optional<int> sample_rate_flag) {
  RunConfig rc;
  rc.config_path = config_path;
  if (!config_path.empty()) {
    try {
      rc.file = nlohmann::json::parse(ReadFile(config_path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config " + config_path + " is not valid JSON: " + e.what());
    }
    if (!rc.file.is_object()) throw ConfigError("config " + config_path + " must hold a JSON object");
  }
  if (seed_flag) {
    rc.seed = *seed_flag;
  } else if (const char* env = std::getenv(kSeedEnv); env && *env) {
    rc.seed = ParseSeed(env, kSeedEnv);
  } else {
    rc.seed = rc.file.value("seed", std::uint64_t{0});
  }
  rc.jobs = jobs_flag.value_or(rc.file.value("jobs", 1));
  if (rc.jobs < 1) throw UsageError("--jobs must be at least 1");
  rc.deterministic = deterministic || rc.file.value("deterministic", false);
  if (rc.deterministic) rc.jobs = 1;
  rc.sample_rate = sample_rate_flag.value_or(rc.file.value("sample_rate", 16000));
  if (rc.sample_rate <= 0) throw UsageError("--sample-rate must be positive");
  return rc;
}

ResolvedConfig Resolve(const std::string& command, const RunConfig& run,
                       const nlohmann::json& effective) {
  ResolvedConfig r;
  r.json = nlohmann::json{{"command", command},
                          {"run",
                           {{"seed", run.seed},
                            {"jobs", run.jobs},
                            {"deterministic", run.deterministic},
                            {"sample_rate", run.sample_rate}}},
                          {"config", effective}};
  // Worker count never changes results, so it stays out of the hash.
  nlohmann::json hashed = r.json;
  hashed["run"].erase("jobs");
  r.hash = HashHex(hashed.dump());
  return r;
}

audio::SpectralConfig SpectralFromJson(const nlohmann::json& j) {
  audio::SpectralConfig d;
  audio::SpectralConfig c;
  c.frame_len_ms = j.value("frame_len_ms", d.frame_len_ms);
  c.hop_ms = j.value("hop_ms", d.hop_ms);
  c.fft_size = j.value("fft_size", d.fft_size);
  c.n_mels = j.value("n_mels", d.n_mels);
  c.n_mfcc = j.value("n_mfcc", d.n_mfcc);
  c.fmin_hz = j.value("fmin_hz", d.fmin_hz);
  c.fmax_hz = j.value("fmax_hz", d.fmax_hz);
  c.log_floor = j.value("log_floor", d.log_floor);
  return c;
}

nlohmann::json SpectralToJson(const audio::SpectralConfig& c) {
  return nlohmann::json{{"frame_len_ms", c.frame_len_ms}, {"hop_ms", c.hop_ms},
                        {"fft_size", c.fft_size},         {"n_mels", c.n_mels},
                        {"n_mfcc", c.n_mfcc},             {"fmin_hz", c.fmin_hz},
                        {"fmax_hz", c.fmax_hz},           {"log_floor", c.log_floor}};
}

}  // namespace slmforge::cli

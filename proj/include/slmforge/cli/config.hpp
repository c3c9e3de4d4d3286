// include/slmforge/cli/config.hpp

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

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "slmforge/audio/spectral.hpp"
#include "slmforge/common/error.hpp"

namespace slmforge::cli {

// Bad flags or flag combinations; reported with exit code 1.
class UsageError : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kSeedEnv = "SLMFORGE_SEED";

struct RunConfig {
  nlohmann::json file = nlohmann::json::object();
  std::string config_path;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool deterministic = false;
  int sample_rate = 16000;

  // file[name], or an empty object.
  nlohmann::json Section(const std::string& name) const;
};

// Seed precedence: --seed, then SLMFORGE_SEED, then the config file's
// "seed", then 0. --deterministic forces one job.
RunConfig ResolveRunConfig(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
                           std::optional<int> jobs_flag, bool deterministic,
                           std::optional<int> sample_rate_flag);

// {"command", "run": {...}, "config": effective} and its hash.
struct ResolvedConfig {
  nlohmann::json json;
  std::string hash;
};
ResolvedConfig Resolve(const std::string& command, const RunConfig& run,
                       const nlohmann::json& effective);

audio::SpectralConfig SpectralFromJson(const nlohmann::json& j);
nlohmann::json SpectralToJson(const audio::SpectralConfig& c);

}  // namespace slmforge::cli

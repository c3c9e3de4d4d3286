// include/slmforge/nn/checkpoint.hpp

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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "slmforge/nn/module.hpp"

namespace slmforge::nn {

class CheckpointError : public Error {
 public:
  using Error::Error;
};

// Byte layout (all integers little-endian):
//
//   "SLMF"                       magic, 4 bytes
//   u32 version                  currently 1
//   u32 n_meta
//   n_meta x { u32 len, key bytes, u32 len, value bytes }
//   u32 n_tensors
//   n_tensors x { u32 len, name bytes, u8 dtype, u32 rank, u64 dims[rank],
//                 u64 payload_offset, u64 payload_bytes }
//   payloads                     raw values, offsets from file start
//
// dtype 1 = float64, 2 = float32. Tensors are always written as float64 so a
// save/load round trip is bit-exact.
inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class DType : std::uint8_t { kFloat64 = 1, kFloat32 = 2 };

struct CheckpointTensor {
  std::string name;
  Shape shape;
  std::vector<double> values;
};

struct Checkpoint {
  std::map<std::string, std::string> metadata;
  std::vector<CheckpointTensor> tensors;

  const CheckpointTensor* Find(const std::string& name) const;
  std::string Meta(const std::string& key, const std::string& fallback = "") const;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
Checkpoint ParseCheckpoint(std::string_view bytes);
void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint ReadCheckpoint(const std::string& path);

// Appends every parameter of `tree` under `prefix`.
void AppendModule(Checkpoint& ckpt, const Module& tree, const std::string& prefix = "");

enum class LoadMode { kStrict, kPermissive };

// Copies tensors named `prefix` + parameter name into `tree`. Strict mode
// requires the prefixed tensors and the parameters to match one to one with
// equal shapes; permissive mode skips (and logs) anything that does not.
// Only values are restored: there is no optimizer state in a checkpoint.
void LoadModule(const Checkpoint& ckpt, Module& tree, LoadMode mode,
                const std::string& prefix = "");

void SaveCheckpoint(const Module& tree, const std::string& path,
                    const std::map<std::string, std::string>& metadata = {});
void LoadCheckpoint(const std::string& path, Module& tree, LoadMode mode = LoadMode::kStrict);

}  // namespace slmforge::nn

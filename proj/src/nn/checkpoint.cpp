// src/nn/checkpoint.cpp

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

#include "slmforge/nn/checkpoint.hpp"

#include <cstring>
#include <set>

#include "slmforge/common/log.hpp"
#include "slmforge/common/text.hpp"

namespace slmforge::nn {
namespace {

void PutU32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void PutU64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) s += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void PutString(std::string& s, const std::string& v) {
  PutU32(s, static_cast<std::uint32_t>(v.size()));
  s += v;
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  const unsigned char* Take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw CheckpointError("checkpoint truncated");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes_.data()) + pos_;
    pos_ += n;
    return p;
  }
  std::uint8_t U8() { return *Take(1); }
  std::uint32_t U32() {
    const auto* p = Take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  std::uint64_t U64() {
    const auto* p = Take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }
  std::string String() {
    const std::uint32_t n = U32();
    const auto* p = Take(n);
    return {reinterpret_cast<const char*>(p), n};
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

const CheckpointTensor* Checkpoint::Find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

std::string Checkpoint::Meta(const std::string& key, const std::string& fallback) const {
  auto it = metadata.find(key);
  return it == metadata.end() ? fallback : it->second;
}

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  std::string header;
  header += "SLMF";
  PutU32(header, kCheckpointVersion);
  PutU32(header, static_cast<std::uint32_t>(ckpt.metadata.size()));
  for (const auto& [k, v] : ckpt.metadata) {
    PutString(header, k);
    PutString(header, v);
  }
  PutU32(header, static_cast<std::uint32_t>(ckpt.tensors.size()));

  std::size_t dir_bytes = 0;
  for (const auto& t : ckpt.tensors) dir_bytes += 4 + t.name.size() + 1 + 4 + 8 * t.shape.size() + 16;
  std::uint64_t offset = header.size() + dir_bytes;

  std::string dir;
  for (const auto& t : ckpt.tensors) {
    if (t.values.size() != NumElements(t.shape)) {
      throw CheckpointError("tensor '" + t.name + "' has inconsistent shape");
    }
    PutString(dir, t.name);
    dir += static_cast<char>(DType::kFloat64);
    PutU32(dir, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) PutU64(dir, d);
    const std::uint64_t bytes = 8 * t.values.size();
    PutU64(dir, offset);
    PutU64(dir, bytes);
    offset += bytes;
  }

  std::string out = header + dir;
  out.reserve(offset);
  for (const auto& t : ckpt.tensors) {
    for (double v : t.values) {
      std::uint64_t raw;
      std::memcpy(&raw, &v, 8);
      PutU64(out, raw);
    }
  }
  return out;
}

Checkpoint ParseCheckpoint(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "SLMF", 4) != 0) {
    throw CheckpointError("bad magic: not an SLMF checkpoint");
  }
  r.Take(4);
  const std::uint32_t version = r.U32();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  const std::uint32_t n_meta = r.U32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = r.String();
    ckpt.metadata[k] = r.String();
  }
  const std::uint32_t n = r.U32();
  struct Entry {
    std::uint8_t dtype;
    std::uint64_t offset, bytes;
  };
  std::vector<Entry> entries;
  for (std::uint32_t i = 0; i < n; ++i) {
    CheckpointTensor t;
    t.name = r.String();
    Entry e{};
    e.dtype = r.U8();
    const std::uint32_t rank = r.U32();
    for (std::uint32_t k = 0; k < rank; ++k) t.shape.push_back(r.U64());
    e.offset = r.U64();
    e.bytes = r.U64();
    const std::size_t width = e.dtype == static_cast<std::uint8_t>(DType::kFloat64) ? 8
                              : e.dtype == static_cast<std::uint8_t>(DType::kFloat32) ? 4 : 0;
    if (width == 0) throw CheckpointError("tensor '" + t.name + "' has unknown dtype");
    if (e.bytes != width * NumElements(t.shape) || e.offset + e.bytes > bytes.size()) {
      throw CheckpointError("tensor '" + t.name + "' payload out of bounds");
    }
    ckpt.tensors.push_back(std::move(t));
    entries.push_back(e);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    auto& t = ckpt.tensors[i];
    const auto& e = entries[i];
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data()) + e.offset;
    const std::size_t count = NumElements(t.shape);
    t.values.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      if (e.dtype == static_cast<std::uint8_t>(DType::kFloat64)) {
        std::uint64_t raw = 0;
        for (int b = 7; b >= 0; --b) raw = (raw << 8) | p[8 * k + b];
        std::memcpy(&t.values[k], &raw, 8);
      } else {
        std::uint32_t raw = 0;
        for (int b = 3; b >= 0; --b) raw = (raw << 8) | p[4 * k + b];
        float f;
        std::memcpy(&f, &raw, 4);
        t.values[k] = f;
      }
    }
  }
  return ckpt;
}

void WriteCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  WriteFile(path, SerializeCheckpoint(ckpt));
}

Checkpoint ReadCheckpoint(const std::string& path) {
  std::string bytes;
  try {
    bytes = ReadFile(path);
  } catch (const IoError& e) {
    throw CheckpointError(e.what());
  }
  return ParseCheckpoint(bytes);
}

void AppendModule(Checkpoint& ckpt, const Module& tree, const std::string& prefix) {
  for (const auto& p : tree.Parameters()) {
    const auto v = p.tensor.values();
    ckpt.tensors.push_back({prefix + p.name, p.tensor.shape(), {v.begin(), v.end()}});
  }
}

void LoadModule(const Checkpoint& ckpt, Module& tree, LoadMode mode, const std::string& prefix) {
  const bool strict = mode == LoadMode::kStrict;
  std::set<std::string> used;
  for (auto& p : tree.Parameters()) {
    const std::string key = prefix + p.name;
    const CheckpointTensor* t = ckpt.Find(key);
    if (!t) {
      if (strict) throw CheckpointError("checkpoint has no tensor for parameter '" + key + "'");
      LogWarn("checkpoint load: parameter '", key, "' not in checkpoint, keeping current value");
      continue;
    }
    used.insert(key);
    if (t->shape != p.tensor.shape()) {
      const std::string msg = "shape mismatch for parameter '" + key + "': checkpoint " +
                              ShapeString(t->shape) + " vs model " + ShapeString(p.tensor.shape());
      if (strict) throw CheckpointError(msg);
      LogWarn("checkpoint load: skipping ", msg);
      continue;
    }
    auto dst = p.tensor.mutable_values();
    std::copy(t->values.begin(), t->values.end(), dst.begin());
    p.tensor.ClearGrad();
  }
  for (const auto& t : ckpt.tensors) {
    if (t.name.compare(0, prefix.size(), prefix) != 0 || used.count(t.name)) continue;
    if (strict) throw CheckpointError("checkpoint tensor '" + t.name + "' matches no parameter");
    LogWarn("checkpoint load: ignoring unmatched tensor '", t.name, "'");
  }
}

void SaveCheckpoint(const Module& tree, const std::string& path,
                    const std::map<std::string, std::string>& metadata) {
  Checkpoint ckpt;
  ckpt.metadata = metadata;
  AppendModule(ckpt, tree);
  WriteCheckpoint(path, ckpt);
}

void LoadCheckpoint(const std::string& path, Module& tree, LoadMode mode) {
  LoadModule(ReadCheckpoint(path), tree, mode);
}

}  // namespace slmforge::nn

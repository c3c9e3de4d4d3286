// src/audio/wav.cpp

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

#include "slmforge/audio/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace slmforge::audio {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t U16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t U32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::string& s, std::uint16_t v) {
  s += static_cast<char>(v & 0xFF);
  s += static_cast<char>(v >> 8);
}

void PutU32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s += static_cast<char>((v >> (8 * i)) & 0xFF);
}

}  // namespace

AudioBuffer DecodeWav(std::string_view bytes) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();
  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0) {
    throw WavError(WavErrorKind::kMalformedHeader, "not a RIFF/WAVE stream");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= n) {
    const unsigned char* chunk = p + pos;
    const std::uint32_t size = U32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > n) {
        throw WavError(WavErrorKind::kMalformedHeader, "fmt chunk too short");
      }
      format = U16(p + body);
      channels = U16(p + body + 2);
      rate = U32(p + body + 4);
      bits = U16(p + body + 14);
      if (format == kFormatExtensible && size >= 26) format = U16(p + body + 24);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw WavError(WavErrorKind::kMalformedHeader, "data chunk before fmt");
      if (channels == 0 || rate == 0) {
        throw WavError(WavErrorKind::kMalformedHeader, "zero channels or sample rate");
      }
      const bool pcm16 = format == kFormatPcm && bits == 16;
      const bool f32 = format == kFormatFloat && bits == 32;
      if (!pcm16 && !f32) {
        throw WavError(WavErrorKind::kUnsupportedEncoding,
                       "unsupported encoding: format " + std::to_string(format) + ", " +
                           std::to_string(bits) + " bits");
      }
      if (body + size > n) {
        throw WavError(WavErrorKind::kTruncatedData,
                       "data chunk declares " + std::to_string(size) + " bytes, only " +
                           std::to_string(n - body) + " present");
      }
      const std::size_t width = bits / 8;
      const std::size_t count = size / width;
      std::vector<double> interleaved(count);
      const unsigned char* d = p + body;
      for (std::size_t i = 0; i < count; ++i) {
        if (pcm16) {
          interleaved[i] = static_cast<std::int16_t>(U16(d + 2 * i)) / 32768.0;
        } else {
          const std::uint32_t raw = U32(d + 4 * i);
          float f;
          std::memcpy(&f, &raw, 4);
          interleaved[i] = std::clamp(static_cast<double>(f), -1.0, 1.0);
        }
      }
      AudioBuffer buf;
      buf.sample_rate = static_cast<int>(rate);
      buf.samples = Downmix(interleaved, channels);
      buf.Validate();
      return buf;
    }
    pos = body + size + (size & 1);
  }
  throw WavError(WavErrorKind::kMalformedHeader, have_fmt ? "no data chunk" : "no fmt chunk");
}

AudioBuffer ReadWav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError(WavErrorKind::kMissingFile, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return DecodeWav(ss.str());
  } catch (const WavError& e) {
    throw WavError(e.kind(), path + ": " + e.what());
  }
}

std::string EncodeWav(const AudioBuffer& buf, WavEncoding encoding) {
  const bool pcm16 = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm16 ? 16 : 32;
  const auto data_bytes = static_cast<std::uint32_t>(buf.samples.size() * (bits / 8));
  std::string s;
  s.reserve(44 + data_bytes);
  s += "RIFF";
  PutU32(s, 36 + data_bytes);
  s += "WAVE";
  s += "fmt ";
  PutU32(s, 16);
  PutU16(s, pcm16 ? kFormatPcm : kFormatFloat);
  PutU16(s, 1);
  PutU32(s, static_cast<std::uint32_t>(buf.sample_rate));
  PutU32(s, static_cast<std::uint32_t>(buf.sample_rate) * (bits / 8));
  PutU16(s, bits / 8);
  PutU16(s, bits);
  s += "data";
  PutU32(s, data_bytes);
  for (double x : buf.samples) {
    if (pcm16) {
      const double v = std::clamp(std::round(x * 32768.0), -32768.0, 32767.0);
      PutU16(s, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
    } else {
      const auto f = static_cast<float>(x);
      std::uint32_t raw;
      std::memcpy(&raw, &f, 4);
      PutU32(s, raw);
    }
  }
  return s;
}

void WriteWav(const std::string& path, const AudioBuffer& buf, WavEncoding encoding) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  const std::string bytes = EncodeWav(buf, encoding);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace slmforge::audio

// include/slmforge/common/text.hpp

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

#include <string>
#include <string_view>
#include <vector>

namespace slmforge {

// UTF-8 helpers. Invalid bytes decode to U+FFFD one byte at a time.
std::vector<char32_t> DecodeUtf8(std::string_view text);
std::string EncodeUtf8(char32_t cp);
std::string EncodeUtf8(const std::vector<char32_t>& cps);

// Splits on runs of ASCII whitespace; no empty tokens.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Collapses whitespace runs to one space and trims both ends.
std::string CollapseWhitespace(std::string_view text);

std::string Trim(std::string_view text);

std::vector<std::string> SplitString(std::string_view text, char sep);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

}  // namespace slmforge

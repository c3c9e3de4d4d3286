// include/slmforge/common/subprocess.hpp

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

namespace slmforge {

struct ProcessResult {
  int exit_code = 0;
  std::string stdout_data;
  std::string stderr_data;
};

// Runs `command` through /bin/sh -c, feeding stdin_data on its standard input
// and capturing both output streams. A process killed by a signal reports
// 128 + signal number.
ProcessResult RunProcess(const std::string& command, std::string_view stdin_data);

}  // namespace slmforge

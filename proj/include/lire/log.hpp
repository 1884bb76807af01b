// Copyright 2026-present the lire project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

namespace lire {

enum class LogLevel { error = 0, warn = 1, info = 2 };

LogLevel log_level();
void set_log_level(LogLevel level);

// Writes "[lire] <level>: <msg>" to stderr when <level> passes the threshold.
void log_error(const std::string& msg);
void log_warn(const std::string& msg);
void log_info(const std::string& msg);

}  // namespace lire

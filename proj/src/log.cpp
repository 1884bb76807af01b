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

#include "lire/log.hpp"

#include <atomic>
#include <iostream>

namespace lire {

namespace {
std::atomic<LogLevel> g_level{LogLevel::info};

void emit(LogLevel level, const char* tag, const std::string& msg) {
    if (static_cast<int>(level) > static_cast<int>(g_level.load())) return;
    std::cerr << "[lire] " << tag << ": " << msg << '\n';
}
}  // namespace

LogLevel log_level() { return g_level.load(); }
void set_log_level(LogLevel level) { g_level.store(level); }

void log_error(const std::string& msg) { emit(LogLevel::error, "error", msg); }
void log_warn(const std::string& msg) { emit(LogLevel::warn, "warn", msg); }
void log_info(const std::string& msg) { emit(LogLevel::info, "info", msg); }

}  // namespace lire

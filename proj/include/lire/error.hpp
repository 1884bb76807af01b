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

#include <stdexcept>
#include <string>

namespace lire {

enum class ErrorKind {
    io_failure,
    malformed_header,
    truncated_file,
    dimension_mismatch,
    non_unit_norm,
    malformed_input,
    malformed_line,
    malformed_index,
    insufficient_sample,
    corrupt_code,
    empty_corpus,
    empty_input,
    empty_intersection,
    length_mismatch,
    invalid_argument,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::io_failure: return "io_failure";
        case ErrorKind::malformed_header: return "malformed_header";
        case ErrorKind::truncated_file: return "truncated_file";
        case ErrorKind::dimension_mismatch: return "dimension_mismatch";
        case ErrorKind::non_unit_norm: return "non_unit_norm";
        case ErrorKind::malformed_input: return "malformed_input";
        case ErrorKind::malformed_line: return "malformed_line";
        case ErrorKind::malformed_index: return "malformed_index";
        case ErrorKind::insufficient_sample: return "insufficient_sample";
        case ErrorKind::corrupt_code: return "corrupt_code";
        case ErrorKind::empty_corpus: return "empty_corpus";
        case ErrorKind::empty_input: return "empty_input";
        case ErrorKind::empty_intersection: return "empty_intersection";
        case ErrorKind::length_mismatch: return "length_mismatch";
        case ErrorKind::invalid_argument: return "invalid_argument";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) fail(kind, msg);
}

}  // namespace lire

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

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "lire/error.hpp"

namespace lire {

// Little-endian binary file access. Encoding is byte-explicit so files parse
// identically on any host.

class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        require(out_.good(), ErrorKind::io_failure, "cannot open for writing: " + path);
    }

    void u8(uint8_t v) { raw(&v, 1); }

    void u16(uint16_t v) {
        uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
        raw(b, 2);
    }

    void u32(uint32_t v) {
        uint8_t b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
        raw(b, 4);
    }

    void u64(uint64_t v) {
        uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
        raw(b, 8);
    }

    void f32(float v) { u32(std::bit_cast<uint32_t>(v)); }

    void f32_array(const float* data, size_t n) {
        buf_.resize(n * 4);
        for (size_t i = 0; i < n; ++i) {
            const uint32_t v = std::bit_cast<uint32_t>(data[i]);
            buf_[i * 4 + 0] = static_cast<uint8_t>(v);
            buf_[i * 4 + 1] = static_cast<uint8_t>(v >> 8);
            buf_[i * 4 + 2] = static_cast<uint8_t>(v >> 16);
            buf_[i * 4 + 3] = static_cast<uint8_t>(v >> 24);
        }
        raw(buf_.data(), buf_.size());
    }

    void bytes(const uint8_t* data, size_t n) { raw(data, n); }

    void finish() {
        out_.flush();
        require(out_.good(), ErrorKind::io_failure, "write failed: " + path_);
    }

private:
    void raw(const void* data, size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        require(out_.good(), ErrorKind::io_failure, "write failed: " + path_);
    }

    std::string path_;
    std::ofstream out_;
    std::vector<uint8_t> buf_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::string& path)
        : path_(path), in_(path, std::ios::binary) {
        require(in_.good(), ErrorKind::io_failure, "cannot open for reading: " + path);
    }

    uint8_t u8() {
        uint8_t v;
        raw(&v, 1);
        return v;
    }

    uint16_t u16() {
        uint8_t b[2];
        raw(b, 2);
        return static_cast<uint16_t>(b[0] | (b[1] << 8));
    }

    uint32_t u32() {
        uint8_t b[4];
        raw(b, 4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
        return v;
    }

    uint64_t u64() {
        uint8_t b[8];
        raw(b, 8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
        return v;
    }

    float f32() { return std::bit_cast<float>(u32()); }

    void f32_array(float* dst, size_t n) {
        buf_.resize(n * 4);
        raw(buf_.data(), buf_.size());
        for (size_t i = 0; i < n; ++i) {
            uint32_t v = 0;
            for (int j = 0; j < 4; ++j) v |= static_cast<uint32_t>(buf_[i * 4 + j]) << (8 * j);
            dst[i] = std::bit_cast<float>(v);
        }
    }

    void bytes(uint8_t* dst, size_t n) { raw(dst, n); }

    bool at_eof() {
        in_.peek();
        return in_.eof();
    }

    const std::string& path() const { return path_; }

private:
    void raw(void* dst, size_t n) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in_.gcount()) != n) {
            fail(ErrorKind::truncated_file, path_ + ": unexpected end of file");
        }
    }

    std::string path_;
    std::ifstream in_;
    std::vector<uint8_t> buf_;
};

}  // namespace lire

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

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lire/error.hpp"

namespace lire {

// Deterministic random source. std::mt19937_64 output is specified bit-for-bit
// by the standard; the derived draws below are hand-rolled because the
// std::*_distribution classes are implementation-defined and would break
// reproducibility across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Unbiased draw in [0, n).
    uint64_t below(uint64_t n) {
        require(n > 0, ErrorKind::invalid_argument, "Rng::below(0)");
        const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    // First m entries of a Fisher-Yates pass over [0, n), in draw order.
    std::vector<uint64_t> sample_without_replacement(uint64_t n, uint64_t m) {
        require(m <= n, ErrorKind::invalid_argument, "sample larger than population");
        std::vector<uint64_t> pool(n);
        for (uint64_t i = 0; i < n; ++i) pool[i] = i;
        for (uint64_t i = 0; i < m; ++i) {
            const uint64_t j = i + below(n - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(m);
        return pool;
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lire

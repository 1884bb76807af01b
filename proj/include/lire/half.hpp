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

namespace lire {

// IEEE 754 binary16 <-> binary32, round-to-nearest-even on narrowing.

inline uint16_t float_to_half(float value) {
    const uint32_t bits = std::bit_cast<uint32_t>(value);
    const uint32_t sign = (bits >> 16) & 0x8000u;
    const uint32_t exp = (bits >> 23) & 0xFFu;
    uint32_t mant = bits & 0x7FFFFFu;

    if (exp == 0xFF) {  // inf / nan
        return static_cast<uint16_t>(sign | 0x7C00u | (mant ? 0x200u : 0u));
    }
    const int32_t half_exp = static_cast<int32_t>(exp) - 127 + 15;
    if (half_exp >= 0x1F) {  // overflow -> inf
        return static_cast<uint16_t>(sign | 0x7C00u);
    }
    if (half_exp <= 0) {  // subnormal or zero
        if (half_exp < -10) return static_cast<uint16_t>(sign);
        mant |= 0x800000u;  // implicit leading 1
        const int shift = 14 - half_exp;
        uint32_t half_mant = mant >> shift;
        const uint32_t rem = mant & ((1u << shift) - 1);
        const uint32_t halfway = 1u << (shift - 1);
        if (rem > halfway || (rem == halfway && (half_mant & 1u))) half_mant++;
        return static_cast<uint16_t>(sign | half_mant);
    }
    uint32_t half_mant = mant >> 13;
    const uint32_t rem = mant & 0x1FFFu;
    if (rem > 0x1000u || (rem == 0x1000u && (half_mant & 1u))) {
        half_mant++;
        if (half_mant == 0x400u) {  // mantissa carry bumps the exponent
            half_mant = 0;
            if (half_exp + 1 >= 0x1F) return static_cast<uint16_t>(sign | 0x7C00u);
            return static_cast<uint16_t>(sign | ((half_exp + 1) << 10));
        }
    }
    return static_cast<uint16_t>(sign | (half_exp << 10) | half_mant);
}

inline float half_to_float(uint16_t value) {
    const uint32_t sign = (static_cast<uint32_t>(value) & 0x8000u) << 16;
    const uint32_t exp = (value >> 10) & 0x1Fu;
    uint32_t mant = value & 0x3FFu;

    uint32_t bits;
    if (exp == 0) {
        if (mant == 0) {
            bits = sign;  // signed zero
        } else {
            // normalize the subnormal
            int e = -1;
            do {
                e++;
                mant <<= 1;
            } while ((mant & 0x400u) == 0);
            bits = sign | ((127 - 15 - e) << 23) | ((mant & 0x3FFu) << 13);
        }
    } else if (exp == 0x1F) {
        bits = sign | 0x7F800000u | (mant << 13);
    } else {
        bits = sign | ((exp - 15 + 127) << 23) | (mant << 13);
    }
    return std::bit_cast<float>(bits);
}

}  // namespace lire

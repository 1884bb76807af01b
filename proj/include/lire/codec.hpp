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

#include <cstdint>
#include <string>
#include <vector>

namespace lire {

// Residual compression dictionary: a centroid codebook plus one global b-bit
// scalar quantizer for residual components. A vector is stored as the id of
// its nearest centroid and b bits per dimension locating the residual
// component in a bucket; decoding adds the bucket weight back onto the
// centroid.
struct Codec {
    uint32_t dim = 0;
    uint32_t bits = 0;                // 1 or 2
    uint64_t n_centroids = 0;         // power of two, <= 2^32
    std::vector<float> centroids;     // n_centroids * dim, row-major
    std::vector<float> cutoffs;       // (1 << bits) - 1, ascending
    std::vector<float> weights;       // 1 << bits, one reconstruction value per bucket

    size_t residual_bytes() const { return (static_cast<size_t>(bits) * dim + 7) / 8; }

    // Bucket index of a scalar residual: the number of cutoffs <= r.
    uint32_t bucket_of(float r) const;

    // argmin_t ||v - C_t||^2, ties to the lowest index.
    uint32_t nearest_centroid(const float* v) const;

    // Writes the centroid id and ceil(bits*dim/8) packed residual bytes.
    // Dimension j occupies bits [bits*j, bits*(j+1)) of the byte stream,
    // LSB-first within each byte.
    void encode_to(const float* v, uint32_t* code_out, uint8_t* residual_out) const;

    // Reconstructs C_t + weight(bucket_j) per dimension. No renormalization.
    void decode_to(uint32_t code, const uint8_t* residual, float* out) const;

    void validate() const;
};

struct CompressedVector {
    uint32_t centroid_id = 0;
    std::vector<uint8_t> residual_code;
};

CompressedVector encode(const Codec& codec, const std::vector<float>& v);
std::vector<float> decode(const Codec& codec, const CompressedVector& cv);

// Codebook size rule: the power of two below 16*sqrt(n_embeddings), clamped
// to [16, 2^32] and to the largest power of two <= n_embeddings. Exact
// integer arithmetic (largest e with 4^e <= 256*n), no floating log.
uint64_t select_num_centroids(uint64_t n_embeddings);

// Lloyd iterations with k-means++ seeding. Deterministic for a fixed seed.
// Empty clusters are reseeded to the point currently farthest from its
// assigned centroid. If objective_trace is non-null it receives the
// assignment objective (sum of squared distances) once per iteration.
std::vector<float> train_kmeans(const float* sample, size_t n, uint32_t dim, uint64_t k,
                                uint32_t iters, uint64_t seed,
                                std::vector<double>* objective_trace = nullptr,
                                int threads = 1);

struct BucketFit {
    std::vector<float> cutoffs;
    std::vector<float> weights;
    bool degenerate = false;  // all sample values identical
};

// Cutoffs are the (i/2^b)-quantiles (linear interpolation) of the sample;
// weights are per-bucket means. An empty interior bucket falls back to the
// midpoint of its cutoff interval; empty outer buckets to cutoff -/+ the
// sample standard deviation.
BucketFit fit_buckets(const std::vector<float>& residual_sample, uint32_t bits);

// Full training pass: k-means over the sample, then bucket fitting on the
// residual components of that same sample.
Codec train_codec(const float* sample, size_t n, uint32_t dim, uint64_t k, uint32_t bits,
                  uint64_t seed, int threads = 1);

// codec.bin: magic "LICDC1\0\0" | u32 dim | u32 bits | u64 n_centroids
// | centroids fp32 row-major | cutoffs fp32 | weights fp32.
void save_codec(const Codec& codec, const std::string& path);
Codec load_codec(const std::string& path);

constexpr uint32_t kKmeansIters = 20;

}  // namespace lire

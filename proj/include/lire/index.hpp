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
#include <utility>
#include <vector>

#include "lire/codec.hpp"
#include "lire/types.hpp"

namespace lire {

// On-disk compressed corpus: per-embedding centroid codes and packed
// residuals, plus the passage bookkeeping needed to map embedding ids back
// to passages.
struct CompressedIndex {
    Codec codec;
    uint64_t n_passages = 0;
    uint64_t n_embeddings = 0;
    uint64_t seed = 0;
    std::vector<uint64_t> passage_ids;
    std::vector<uint32_t> doclens;
    std::vector<uint64_t> offsets;   // n_passages + 1 prefix sums
    std::vector<uint32_t> codes;     // one per embedding
    std::vector<uint8_t> residuals;  // residual_bytes() per embedding

    // Decodes all rows of passage p into out (doclens[p] * dim floats).
    void decode_passage(size_t p, float* out) const;
    // Decodes a single embedding.
    void decode_embedding(uint64_t e, float* out) const;

    void validate() const;
};

// Centroid -> ascending embedding ids, CSR layout.
struct InvertedLists {
    std::vector<uint64_t> list_offsets;  // n_centroids + 1
    std::vector<uint32_t> postings;

    const uint32_t* list_begin(uint64_t c) const { return postings.data() + list_offsets[c]; }
    const uint32_t* list_end(uint64_t c) const { return postings.data() + list_offsets[c + 1]; }
};

struct BuildParams {
    uint32_t bits = 2;
    uint64_t seed = 0;
    uint32_t chunk_size = 1024;     // passages per encoding chunk
    double sample_mult = 1.0;       // sample ceil(mult * sqrt(n_passages)) passages
    int threads = 1;
};

// Three stages: codebook training on a sqrt-sized passage sample, chunked
// passage encoding, index inversion. Deterministic for a fixed seed, and
// the output is independent of chunk_size.
std::pair<CompressedIndex, InvertedLists> build_index(const EmbeddingSet& embeddings,
                                                      const BuildParams& params);

// Index directory: meta.json, codec.bin, doclens.bin, pids.bin, codes.bin,
// residuals.bin, ivf.bin. load re-validates every structural invariant and
// reports the failing file.
void save_index(const CompressedIndex& index, const InvertedLists& ivf, const std::string& dir);
std::pair<CompressedIndex, InvertedLists> load_index(const std::string& dir);

struct IndexStats {
    uint32_t dim = 0;
    uint32_t bits = 0;
    uint64_t n_passages = 0;
    uint64_t n_embeddings = 0;
    uint64_t n_centroids = 0;
    uint64_t bytes_codes = 0;
    uint64_t bytes_residuals = 0;
    uint64_t bytes_centroids = 0;
    uint64_t bytes_buckets = 0;
    uint64_t bytes_doclens = 0;
    uint64_t bytes_pids = 0;
    uint64_t bytes_ivf = 0;
    uint64_t bytes_total = 0;
    double bytes_per_vector_core = 0.0;   // 4 + ceil(bits*dim/8)
    double bytes_per_vector_total = 0.0;  // includes amortized metadata
    double ratio_core = 0.0;              // vs the 2*dim-byte fp16 baseline
    double ratio_total = 0.0;

    std::string to_string() const;
};

IndexStats index_stats(const CompressedIndex& index, const InvertedLists& ivf);

}  // namespace lire

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
#include <vector>

#include "lire/index.hpp"
#include "lire/types.hpp"

namespace lire {

struct SearchParams {
    uint32_t nprobe = 2;        // centroids probed per query vector
    uint32_t ncandidates = 2 * 4096;  // passages advancing to exact rescoring
    uint32_t k = 10;            // results returned

    // Enforces k <= ncandidates and nprobe <= n_centroids.
    void validate(uint64_t n_centroids) const;
};

// Late-interaction score, Eq.-style: sum over query rows of the max dot
// product against all passage rows. Double accumulation in fixed order.
double maxsim(const float* queries, size_t n_query_rows, const float* docs, size_t n_doc_rows,
              uint32_t dim);

struct Candidate {
    uint32_t passage = 0;   // passage ordinal, not external id
    double approx = 0.0;    // sum over rows of max(0, subset max dot)
};

// Two-stage retrieval over a loaded index.
class Searcher {
public:
    Searcher(const CompressedIndex& index, const InvertedLists& ivf);

    // Stage 1: probe the nprobe nearest centroids per query row (dot
    // product, ties to the lower centroid id), decode the gathered
    // embeddings and max-reduce per (row, passage). Per-row maxima clamp at
    // zero, so every approximate score lower-bounds the equally clamped
    // decoded MaxSim. Returns candidates ordered by passage ordinal.
    std::vector<Candidate> generate_candidates(const float* query_rows, size_t n_rows,
                                               uint32_t nprobe) const;

    // Stage 2: keep the top ncandidates by (approx desc, passage asc),
    // rescore each one exactly over its decoded embeddings, return top k.
    QueryResult search(const float* query_rows, size_t n_rows, uint64_t query_id,
                       const SearchParams& params) const;

    RankedResults search_batch(const EmbeddingSet& queries, const SearchParams& params,
                               int threads = 1) const;

    const CompressedIndex& index() const { return index_; }

private:
    const CompressedIndex& index_;
    const InvertedLists& ivf_;
    std::vector<uint32_t> emb2passage_;
};

}  // namespace lire

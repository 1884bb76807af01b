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
#include <map>
#include <set>
#include <vector>

#include "lire/error.hpp"

namespace lire {

enum class Precision : uint8_t { f32 = 0, f16 = 1 };

// A set of token-embedding matrices, one per passage (or per query).
// Rows are unit-norm d-dimensional vectors; fp16 payloads are widened to
// fp32 at the I/O boundary, so in memory everything is fp32.
struct EmbeddingSet {
    uint32_t dim = 0;
    Precision precision = Precision::f32;
    std::vector<uint64_t> passage_ids;  // strictly increasing
    std::vector<uint32_t> doclens;      // rows per passage, >= 1
    std::vector<uint64_t> offsets{0};   // prefix sums over doclens
    std::vector<float> data;            // row-major, passages concatenated

    size_t n_passages() const { return passage_ids.size(); }
    uint64_t n_vectors() const { return offsets.back(); }

    const float* row(uint64_t e) const { return data.data() + e * dim; }
    const float* passage_rows(size_t p) const { return data.data() + offsets[p] * dim; }
    uint32_t passage_len(size_t p) const { return doclens[p]; }

    void append_passage(uint64_t passage_id, const float* rows, uint32_t m) {
        passage_ids.push_back(passage_id);
        doclens.push_back(m);
        offsets.push_back(offsets.back() + m);
        data.insert(data.end(), rows, rows + static_cast<size_t>(m) * dim);
    }

    // Enforces the structural and unit-norm invariants; throws on violation.
    void validate() const;
};

using Qrels = std::map<uint64_t, std::set<uint64_t>>;

struct ScoredPassage {
    uint64_t passage_id = 0;
    double score = 0.0;
};

struct QueryResult {
    uint64_t query_id = 0;
    std::vector<ScoredPassage> hits;  // (score desc, passage_id asc)
};

using RankedResults = std::vector<QueryResult>;

// Shared ordering rule: score descending, ties by ascending passage id.
inline bool ranks_before(const ScoredPassage& a, const ScoredPassage& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.passage_id < b.passage_id;
}

}  // namespace lire

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

#include "lire/types.hpp"

namespace lire {

enum class SynthProfile { clustered, random };

struct SynthParams {
    SynthProfile profile = SynthProfile::clustered;
    uint64_t n_passages = 100;
    uint32_t tokens_per_passage = 16;
    uint32_t dim = 32;
    uint32_t n_clusters = 64;   // vocabulary size; one unit direction per token
    double noise = 0.1;         // in [0, 1)
    uint64_t seed = 0;
    uint64_t n_queries = 16;
    uint32_t query_tokens = 4;  // rows sampled per query, <= tokens_per_passage
};

struct SynthData {
    EmbeddingSet corpus;
    EmbeddingSet queries;
    Qrels qrels;                     // query -> its source passage
    std::vector<uint32_t> token_ids;  // per corpus embedding
};

// Deterministic test-corpus generator. Each token id owns a random unit
// direction; a clustered passage row is normalize(direction + noise * u +
// jitter * w_passage) with u a fresh unit vector and w_passage a small fixed
// per-passage perturbation that keeps rows distinct across passages (so a
// query always scores its source passage strictly highest). The random
// profile draws rows as fully random unit vectors but keeps the token
// labels. Query rows are copies of rows sampled from one source passage,
// perturbed by the same noise (bit-exact copies at noise = 0).
SynthData synth(const SynthParams& params);

// Writes corpus/queries/qrels (and optionally the token sidecar TSV) using
// the interchange formats.
void synth_to_files(const SynthParams& params, const std::string& embeddings_path,
                    const std::string& queries_path, const std::string& qrels_path,
                    const std::string& tokens_path = "");

}  // namespace lire

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

#include "lire/oracle.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace lire {

namespace {

// Exhaustive Eq.-1 scoring over one passage, written independently of the
// searcher's kernels.
double score_passage(const float* query_rows, size_t n_rows, const float* doc_rows,
                     size_t n_docs, uint32_t dim, bool clamp_rows) {
    double total = 0.0;
    for (size_t i = 0; i < n_rows; ++i) {
        const float* q = query_rows + i * dim;
        double best = -std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < n_docs; ++j) {
            const float* d = doc_rows + j * dim;
            double s = 0.0;
            for (uint32_t c = 0; c < dim; ++c) s += static_cast<double>(q[c]) * d[c];
            if (s > best) best = s;
        }
        if (clamp_rows && best < 0.0) best = 0.0;
        total += best;
    }
    return total;
}

RankedResults rank_all(const EmbeddingSet& queries, uint32_t k, size_t n_passages,
                       const std::function<void(size_t, std::vector<ScoredPassage>&)>& scorer) {
    RankedResults results(queries.n_passages());
    std::vector<ScoredPassage> scored;
    for (size_t q = 0; q < queries.n_passages(); ++q) {
        scored.clear();
        scored.reserve(n_passages);
        scorer(q, scored);
        std::sort(scored.begin(), scored.end(), ranks_before);
        if (scored.size() > k) scored.resize(k);
        results[q] = QueryResult{queries.passage_ids[q], scored};
    }
    return results;
}

}  // namespace

RankedResults brute_force_search(const EmbeddingSet& queries, const EmbeddingSet& corpus,
                                 uint32_t k) {
    require(queries.dim == corpus.dim, ErrorKind::dimension_mismatch,
            "query dim " + std::to_string(queries.dim) + " vs corpus dim " +
                std::to_string(corpus.dim));
    require(k >= 1, ErrorKind::invalid_argument, "k must be positive");

    return rank_all(queries, k, corpus.n_passages(),
                    [&](size_t q, std::vector<ScoredPassage>& scored) {
                        const float* query_rows = queries.passage_rows(q);
                        const size_t n_rows = queries.doclens[q];
                        for (size_t p = 0; p < corpus.n_passages(); ++p) {
                            const double s =
                                score_passage(query_rows, n_rows, corpus.passage_rows(p),
                                              corpus.doclens[p], corpus.dim, false);
                            scored.push_back(ScoredPassage{corpus.passage_ids[p], s});
                        }
                    });
}

RankedResults brute_force_decoded(const EmbeddingSet& queries, const CompressedIndex& index,
                                  uint32_t k, bool clamp_rows) {
    require(queries.dim == index.codec.dim, ErrorKind::dimension_mismatch,
            "query dim " + std::to_string(queries.dim) + " vs index dim " +
                std::to_string(index.codec.dim));
    require(k >= 1, ErrorKind::invalid_argument, "k must be positive");

    const uint32_t dim = index.codec.dim;
    std::vector<float> decoded;
    return rank_all(queries, k, index.n_passages,
                    [&](size_t q, std::vector<ScoredPassage>& scored) {
                        const float* query_rows = queries.passage_rows(q);
                        const size_t n_rows = queries.doclens[q];
                        for (size_t p = 0; p < index.n_passages; ++p) {
                            const uint32_t m = index.doclens[p];
                            decoded.resize(static_cast<size_t>(m) * dim);
                            index.decode_passage(p, decoded.data());
                            const double s = score_passage(query_rows, n_rows, decoded.data(),
                                                           m, dim, clamp_rows);
                            scored.push_back(ScoredPassage{index.passage_ids[p], s});
                        }
                    });
}

}  // namespace lire

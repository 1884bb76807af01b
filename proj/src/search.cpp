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

#include "lire/search.hpp"

#include <algorithm>
#include <limits>

#include "lire/parallel.hpp"

namespace lire {

namespace {

double dot(const float* a, const float* b, uint32_t dim) {
    double s = 0.0;
    for (uint32_t j = 0; j < dim; ++j) s += static_cast<double>(a[j]) * b[j];
    return s;
}

}  // namespace

void SearchParams::validate(uint64_t n_centroids) const {
    require(nprobe >= 1 && ncandidates >= 1 && k >= 1, ErrorKind::invalid_argument,
            "search params must be positive");
    require(k <= ncandidates, ErrorKind::invalid_argument,
            "k=" + std::to_string(k) + " exceeds ncandidates=" + std::to_string(ncandidates));
    require(nprobe <= n_centroids, ErrorKind::invalid_argument,
            "nprobe=" + std::to_string(nprobe) + " exceeds centroid count " +
                std::to_string(n_centroids));
}

double maxsim(const float* queries, size_t n_query_rows, const float* docs, size_t n_doc_rows,
              uint32_t dim) {
    require(n_query_rows >= 1 && n_doc_rows >= 1, ErrorKind::invalid_argument,
            "maxsim needs at least one row on each side");
    double total = 0.0;
    for (size_t i = 0; i < n_query_rows; ++i) {
        const float* q = queries + i * dim;
        double best = -std::numeric_limits<double>::infinity();
        for (size_t j = 0; j < n_doc_rows; ++j) {
            best = std::max(best, dot(q, docs + j * dim, dim));
        }
        total += best;
    }
    return total;
}

Searcher::Searcher(const CompressedIndex& index, const InvertedLists& ivf)
    : index_(index), ivf_(ivf) {
    emb2passage_.resize(index.n_embeddings);
    for (uint64_t p = 0; p < index.n_passages; ++p) {
        for (uint64_t e = index.offsets[p]; e < index.offsets[p + 1]; ++e) {
            emb2passage_[e] = static_cast<uint32_t>(p);
        }
    }
}

std::vector<Candidate> Searcher::generate_candidates(const float* query_rows, size_t n_rows,
                                                     uint32_t nprobe) const {
    const Codec& codec = index_.codec;
    const uint32_t dim = codec.dim;
    const uint64_t n_centroids = codec.n_centroids;
    const size_t rb = codec.residual_bytes();

    std::vector<double> centroid_dots(n_centroids);
    std::vector<uint32_t> centroid_order(n_centroids);
    std::vector<float> decoded(dim);

    // Per-passage accumulators, reset via the touched lists.
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> row_max(index_.n_passages, neg_inf);
    std::vector<double> approx(index_.n_passages, 0.0);
    std::vector<uint32_t> row_touched;
    std::vector<uint32_t> all_touched;
    std::vector<char> in_all(index_.n_passages, 0);

    for (size_t i = 0; i < n_rows; ++i) {
        const float* q = query_rows + i * dim;
        for (uint64_t c = 0; c < n_centroids; ++c) {
            centroid_dots[c] = dot(q, codec.centroids.data() + c * dim, dim);
            centroid_order[c] = static_cast<uint32_t>(c);
        }
        const size_t probe = std::min<size_t>(nprobe, n_centroids);
        std::partial_sort(centroid_order.begin(), centroid_order.begin() + probe,
                          centroid_order.end(), [&](uint32_t a, uint32_t b) {
                              if (centroid_dots[a] != centroid_dots[b]) {
                                  return centroid_dots[a] > centroid_dots[b];
                              }
                              return a < b;
                          });

        row_touched.clear();
        for (size_t pi = 0; pi < probe; ++pi) {
            const uint32_t c = centroid_order[pi];
            const uint32_t* it = ivf_.list_begin(c);
            const uint32_t* end = ivf_.list_end(c);
            for (; it != end; ++it) {
                const uint32_t e = *it;
                codec.decode_to(index_.codes[e], index_.residuals.data() + e * rb,
                                decoded.data());
                const double score = dot(q, decoded.data(), dim);
                const uint32_t p = emb2passage_[e];
                if (row_max[p] == neg_inf) row_touched.push_back(p);
                if (score > row_max[p]) row_max[p] = score;
            }
        }
        for (const uint32_t p : row_touched) {
            approx[p] += std::max(0.0, row_max[p]);
            row_max[p] = neg_inf;
            if (!in_all[p]) {
                in_all[p] = 1;
                all_touched.push_back(p);
            }
        }
    }

    std::sort(all_touched.begin(), all_touched.end());
    std::vector<Candidate> candidates;
    candidates.reserve(all_touched.size());
    for (const uint32_t p : all_touched) {
        candidates.push_back(Candidate{p, approx[p]});
    }
    return candidates;
}

QueryResult Searcher::search(const float* query_rows, size_t n_rows, uint64_t query_id,
                             const SearchParams& params) const {
    params.validate(index_.codec.n_centroids);

    std::vector<Candidate> candidates = generate_candidates(query_rows, n_rows, params.nprobe);
    if (candidates.size() > params.ncandidates) {
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& a,
                                                           const Candidate& b) {
            if (a.approx != b.approx) return a.approx > b.approx;
            return a.passage < b.passage;
        });
        candidates.resize(params.ncandidates);
    }

    const uint32_t dim = index_.codec.dim;
    std::vector<float> decoded;
    QueryResult result;
    result.query_id = query_id;
    result.hits.reserve(candidates.size());
    for (const Candidate& cand : candidates) {
        const uint32_t m = index_.doclens[cand.passage];
        decoded.resize(static_cast<size_t>(m) * dim);
        index_.decode_passage(cand.passage, decoded.data());
        const double score = maxsim(query_rows, n_rows, decoded.data(), m, dim);
        result.hits.push_back(ScoredPassage{index_.passage_ids[cand.passage], score});
    }
    std::sort(result.hits.begin(), result.hits.end(), ranks_before);
    if (result.hits.size() > params.k) result.hits.resize(params.k);
    return result;
}

RankedResults Searcher::search_batch(const EmbeddingSet& queries, const SearchParams& params,
                                     int threads) const {
    require(queries.dim == index_.codec.dim, ErrorKind::dimension_mismatch,
            "query dim " + std::to_string(queries.dim) + " vs index dim " +
                std::to_string(index_.codec.dim));
    params.validate(index_.codec.n_centroids);

    RankedResults results(queries.n_passages());
    parallel_for(queries.n_passages(), threads, [&](size_t begin, size_t end) {
        for (size_t q = begin; q < end; ++q) {
            results[q] = search(queries.passage_rows(q), queries.doclens[q],
                                queries.passage_ids[q], params);
        }
    });
    return results;
}

}  // namespace lire

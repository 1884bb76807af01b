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
#include <string>
#include <vector>

namespace lire {

// Sidecar token labels for the embeddings of an index: token_ids[e] is the
// vocabulary id of embedding e. Strings are optional.
struct TokenAnnotation {
    std::vector<uint32_t> token_ids;
    std::map<uint32_t, std::string> vocab;
};

// TSV "embedding_offset<TAB>token_id"; offsets must cover [0, n_embeddings)
// exactly once.
TokenAnnotation read_token_annotations(const std::string& path, uint64_t n_embeddings);
// TSV "token_id<TAB>string".
void read_vocab(const std::string& path, TokenAnnotation& annot);

struct ClusterTokenStats {
    // Distinct non-stopword tokens per non-empty cluster.
    std::vector<uint32_t> tokens_per_cluster;
    // (token_id, distinct clusters it appears in), non-stopword tokens only.
    std::vector<std::pair<uint32_t, uint32_t>> clusters_per_token;
    // Tokens designated stopwords: the top 1% by distinct-cluster count.
    std::vector<uint32_t> stopwords;
};

// Distinct-count statistics of the (cluster, token) incidence, excluding
// stopwords on both sides. Cluster assignments come from the index codes.
ClusterTokenStats cluster_token_stats(const std::vector<uint32_t>& codes,
                                      const TokenAnnotation& annot, uint64_t n_clusters);

// Empirical CDF of a histogram of counts: ascending (value, cumulative
// fraction) pairs, one per distinct value, ending at 1.0.
std::vector<std::pair<uint32_t, double>> ecdf(const std::vector<uint32_t>& values);

// Reclusters random unit embeddings (same count and token labels as the real
// data) with k-means and returns the same statistics. Deterministic per seed.
ClusterTokenStats random_baseline(const TokenAnnotation& annot, uint32_t dim, uint64_t k,
                                  uint64_t seed, int threads = 1);

// Top tokens per cluster by occurrence count: (cluster, total embeddings,
// the top_m most frequent token ids).
struct ClusterExemplar {
    uint32_t cluster = 0;
    uint64_t n_embeddings = 0;
    std::vector<std::pair<uint32_t, uint64_t>> top_tokens;  // (token_id, count)
};
std::vector<ClusterExemplar> cluster_exemplars(const std::vector<uint32_t>& codes,
                                               const TokenAnnotation& annot,
                                               uint64_t n_clusters, size_t top_m);

void write_ecdf_tsv(const std::vector<std::pair<uint32_t, double>>& points,
                    const std::string& path);

}  // namespace lire

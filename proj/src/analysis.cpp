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

#include "lire/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "lire/codec.hpp"
#include "lire/error.hpp"
#include "lire/rng.hpp"

namespace lire {

namespace {

uint64_t parse_field_u64(const std::string& field, const std::string& path, size_t line_no) {
    uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(ErrorKind::malformed_line,
             path + ": line " + std::to_string(line_no) + ": expected integer, got '" + field +
                 "'");
    }
    return value;
}

bool skip_line(const std::string& line) {
    const size_t pos = line.find_first_not_of(" \t\r");
    return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

TokenAnnotation read_token_annotations(const std::string& path, uint64_t n_embeddings) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io_failure, "cannot open for reading: " + path);

    TokenAnnotation annot;
    annot.token_ids.assign(n_embeddings, 0);
    std::vector<char> seen(n_embeddings, 0);
    uint64_t n_seen = 0;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skip_line(line)) continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            fail(ErrorKind::malformed_line,
                 path + ": line " + std::to_string(line_no) + ": expected 2 fields");
        }
        const uint64_t offset = parse_field_u64(line.substr(0, tab), path, line_no);
        const uint64_t token = parse_field_u64(line.substr(tab + 1), path, line_no);
        require(offset < n_embeddings, ErrorKind::length_mismatch,
                path + ": line " + std::to_string(line_no) + ": embedding offset " +
                    std::to_string(offset) + " out of range");
        require(!seen[offset], ErrorKind::malformed_line,
                path + ": line " + std::to_string(line_no) + ": duplicate embedding offset");
        seen[offset] = 1;
        n_seen++;
        annot.token_ids[offset] = static_cast<uint32_t>(token);
    }
    require(n_seen == n_embeddings, ErrorKind::length_mismatch,
            path + ": " + std::to_string(n_seen) + " annotations for " +
                std::to_string(n_embeddings) + " embeddings");
    return annot;
}

void read_vocab(const std::string& path, TokenAnnotation& annot) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io_failure, "cannot open for reading: " + path);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skip_line(line)) continue;
        const size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            fail(ErrorKind::malformed_line,
                 path + ": line " + std::to_string(line_no) + ": expected 2 fields");
        }
        const uint64_t token = parse_field_u64(line.substr(0, tab), path, line_no);
        annot.vocab[static_cast<uint32_t>(token)] = line.substr(tab + 1);
    }
}

ClusterTokenStats cluster_token_stats(const std::vector<uint32_t>& codes,
                                      const TokenAnnotation& annot, uint64_t n_clusters) {
    require(codes.size() == annot.token_ids.size(), ErrorKind::length_mismatch,
            std::to_string(codes.size()) + " codes vs " + std::to_string(annot.token_ids.size()) +
                " token annotations");
    require(!codes.empty(), ErrorKind::empty_input, "no embeddings to analyze");

    // Distinct (token, cluster) incidence.
    std::unordered_map<uint32_t, std::set<uint32_t>> token_clusters;
    for (size_t e = 0; e < codes.size(); ++e) {
        require(codes[e] < n_clusters, ErrorKind::length_mismatch, "code out of cluster range");
        token_clusters[annot.token_ids[e]].insert(codes[e]);
    }

    // Stopwords: rank by distinct-cluster count (desc, token id asc) and take
    // the top 1% of the vocabulary.
    std::vector<std::pair<uint32_t, uint32_t>> spread;  // (token, clusters)
    spread.reserve(token_clusters.size());
    for (const auto& [token, clusters] : token_clusters) {
        spread.emplace_back(token, static_cast<uint32_t>(clusters.size()));
    }
    std::sort(spread.begin(), spread.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    const size_t n_stop = spread.size() / 100;

    ClusterTokenStats stats;
    std::unordered_set<uint32_t> stop_set;
    for (size_t i = 0; i < n_stop; ++i) {
        stats.stopwords.push_back(spread[i].first);
        stop_set.insert(spread[i].first);
    }

    std::unordered_map<uint32_t, std::set<uint32_t>> cluster_tokens;
    for (size_t e = 0; e < codes.size(); ++e) {
        if (stop_set.count(annot.token_ids[e])) continue;
        cluster_tokens[codes[e]].insert(annot.token_ids[e]);
    }
    // Also count clusters that contain only stopword tokens: they are
    // non-empty clusters with zero distinct non-stopword tokens.
    std::unordered_set<uint32_t> nonempty;
    for (const uint32_t c : codes) nonempty.insert(c);

    std::vector<uint32_t> cluster_list(nonempty.begin(), nonempty.end());
    std::sort(cluster_list.begin(), cluster_list.end());
    for (const uint32_t c : cluster_list) {
        const auto it = cluster_tokens.find(c);
        stats.tokens_per_cluster.push_back(
            it == cluster_tokens.end() ? 0 : static_cast<uint32_t>(it->second.size()));
    }

    for (const auto& [token, count] : spread) {
        if (stop_set.count(token)) continue;
        stats.clusters_per_token.emplace_back(token, count);
    }
    std::sort(stats.clusters_per_token.begin(), stats.clusters_per_token.end());
    return stats;
}

std::vector<std::pair<uint32_t, double>> ecdf(const std::vector<uint32_t>& values) {
    require(!values.empty(), ErrorKind::empty_input, "ecdf of an empty histogram");
    std::vector<uint32_t> sorted = values;
    std::sort(sorted.begin(), sorted.end());

    std::vector<std::pair<uint32_t, double>> points;
    const double n = static_cast<double>(sorted.size());
    size_t i = 0;
    while (i < sorted.size()) {
        size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) j++;
        points.emplace_back(sorted[i], static_cast<double>(j) / n);
        i = j;
    }
    return points;
}

ClusterTokenStats random_baseline(const TokenAnnotation& annot, uint32_t dim, uint64_t k,
                                  uint64_t seed, int threads) {
    require(!annot.token_ids.empty(), ErrorKind::empty_input, "no annotations");
    require(dim >= 1 && k >= 1, ErrorKind::invalid_argument, "dim and k must be positive");
    const size_t n = annot.token_ids.size();
    require(k <= n, ErrorKind::invalid_argument, "k exceeds the embedding count");

    Rng rng(seed);
    std::vector<float> points(n * dim);
    std::vector<double> direction(dim);
    for (size_t e = 0; e < n; ++e) {
        double norm_sq = 0.0;
        for (uint32_t j = 0; j < dim; ++j) {
            direction[j] = rng.gaussian();
            norm_sq += direction[j] * direction[j];
        }
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (uint32_t j = 0; j < dim; ++j) {
            points[e * dim + j] = static_cast<float>(direction[j] * inv);
        }
    }

    const std::vector<float> centroids =
        train_kmeans(points.data(), n, dim, k, kKmeansIters, seed, nullptr, threads);

    Codec assigner;
    assigner.dim = dim;
    assigner.n_centroids = k;
    assigner.centroids = centroids;
    std::vector<uint32_t> codes(n);
    for (size_t e = 0; e < n; ++e) codes[e] = assigner.nearest_centroid(&points[e * dim]);

    return cluster_token_stats(codes, annot, k);
}

std::vector<ClusterExemplar> cluster_exemplars(const std::vector<uint32_t>& codes,
                                               const TokenAnnotation& annot,
                                               uint64_t n_clusters, size_t top_m) {
    require(codes.size() == annot.token_ids.size(), ErrorKind::length_mismatch,
            "codes vs annotations size mismatch");
    std::unordered_map<uint32_t, std::unordered_map<uint32_t, uint64_t>> counts;
    for (size_t e = 0; e < codes.size(); ++e) {
        require(codes[e] < n_clusters, ErrorKind::length_mismatch, "code out of cluster range");
        counts[codes[e]][annot.token_ids[e]]++;
    }

    std::vector<ClusterExemplar> exemplars;
    exemplars.reserve(counts.size());
    for (auto& [cluster, token_counts] : counts) {
        ClusterExemplar ex;
        ex.cluster = cluster;
        std::vector<std::pair<uint32_t, uint64_t>> tokens(token_counts.begin(),
                                                          token_counts.end());
        for (const auto& [token, count] : tokens) ex.n_embeddings += count;
        std::sort(tokens.begin(), tokens.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (tokens.size() > top_m) tokens.resize(top_m);
        ex.top_tokens = std::move(tokens);
        exemplars.push_back(std::move(ex));
    }
    std::sort(exemplars.begin(), exemplars.end(),
              [](const ClusterExemplar& a, const ClusterExemplar& b) {
                  return a.cluster < b.cluster;
              });
    return exemplars;
}

void write_ecdf_tsv(const std::vector<std::pair<uint32_t, double>>& points,
                    const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    require(out.good(), ErrorKind::io_failure, "cannot open for writing: " + path);
    out << "value\tcumulative_fraction\n";
    char buf[64];
    for (const auto& [value, fraction] : points) {
        std::snprintf(buf, sizeof(buf), "%u\t%.6f\n", value, fraction);
        out << buf;
    }
    out.flush();
    require(out.good(), ErrorKind::io_failure, "write failed: " + path);
}

}  // namespace lire

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

#include "lire/synth.hpp"

#include <cmath>
#include <fstream>

#include "lire/io.hpp"
#include "lire/rng.hpp"

namespace lire {

namespace {

// Keeps rows of the same token distinct across passages without disturbing
// the token-cluster geometry. The induced score separation between two
// passages sharing a token is ~jitter^2/2, which must stay well above fp32
// rounding (~1e-7) for the noise=0 exact-match guarantee to be airtight.
constexpr double kPassageJitter = 3e-2;

void random_unit(Rng& rng, uint32_t dim, std::vector<double>& out) {
    out.resize(dim);
    double norm_sq = 0.0;
    for (uint32_t j = 0; j < dim; ++j) {
        out[j] = rng.gaussian();
        norm_sq += out[j] * out[j];
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (uint32_t j = 0; j < dim; ++j) out[j] *= inv;
}

void normalize_into(const std::vector<double>& v, float* out, uint32_t dim) {
    double norm_sq = 0.0;
    for (uint32_t j = 0; j < dim; ++j) norm_sq += v[j] * v[j];
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (uint32_t j = 0; j < dim; ++j) out[j] = static_cast<float>(v[j] * inv);
}

}  // namespace

SynthData synth(const SynthParams& p) {
    require(p.n_passages >= 1, ErrorKind::invalid_argument, "n_passages must be positive");
    require(p.tokens_per_passage >= 1, ErrorKind::invalid_argument,
            "tokens_per_passage must be positive");
    require(p.dim >= 1, ErrorKind::invalid_argument, "dim must be positive");
    require(p.n_clusters >= 1, ErrorKind::invalid_argument, "n_clusters must be positive");
    require(p.noise >= 0.0 && p.noise < 1.0, ErrorKind::invalid_argument,
            "noise must be in [0, 1)");
    require(p.n_queries >= 1, ErrorKind::invalid_argument, "n_queries must be positive");
    require(p.query_tokens >= 1 && p.query_tokens <= p.tokens_per_passage,
            ErrorKind::invalid_argument, "query_tokens must be in [1, tokens_per_passage]");

    Rng rng(p.seed);
    SynthData data;
    data.corpus.dim = p.dim;
    data.queries.dim = p.dim;

    std::vector<double> directions(static_cast<size_t>(p.n_clusters) * p.dim);
    std::vector<double> unit;
    for (uint32_t t = 0; t < p.n_clusters; ++t) {
        random_unit(rng, p.dim, unit);
        std::copy(unit.begin(), unit.end(), directions.begin() + static_cast<size_t>(t) * p.dim);
    }

    std::vector<float> rows(static_cast<size_t>(p.tokens_per_passage) * p.dim);
    std::vector<double> accum(p.dim);
    std::vector<double> passage_dir;
    for (uint64_t pid = 0; pid < p.n_passages; ++pid) {
        random_unit(rng, p.dim, passage_dir);
        for (uint32_t t = 0; t < p.tokens_per_passage; ++t) {
            const uint32_t token = static_cast<uint32_t>(rng.below(p.n_clusters));
            data.token_ids.push_back(token);
            if (p.profile == SynthProfile::random) {
                random_unit(rng, p.dim, unit);
                for (uint32_t j = 0; j < p.dim; ++j) accum[j] = unit[j];
            } else {
                const double* dir = directions.data() + static_cast<size_t>(token) * p.dim;
                random_unit(rng, p.dim, unit);
                for (uint32_t j = 0; j < p.dim; ++j) {
                    accum[j] = dir[j] + p.noise * unit[j] + kPassageJitter * passage_dir[j];
                }
            }
            normalize_into(accum, rows.data() + static_cast<size_t>(t) * p.dim, p.dim);
        }
        data.corpus.append_passage(pid, rows.data(), p.tokens_per_passage);
    }

    std::vector<float> query_rows(static_cast<size_t>(p.query_tokens) * p.dim);
    for (uint64_t qid = 0; qid < p.n_queries; ++qid) {
        const uint64_t source = rng.below(p.n_passages);
        const std::vector<uint64_t> picks =
            rng.sample_without_replacement(p.tokens_per_passage, p.query_tokens);
        for (uint32_t r = 0; r < p.query_tokens; ++r) {
            const float* src_row = data.corpus.passage_rows(source) + picks[r] * p.dim;
            float* dst = query_rows.data() + static_cast<size_t>(r) * p.dim;
            if (p.noise == 0.0) {
                std::copy_n(src_row, p.dim, dst);  // exact match by construction
            } else {
                random_unit(rng, p.dim, unit);
                for (uint32_t j = 0; j < p.dim; ++j) {
                    accum[j] = static_cast<double>(src_row[j]) + p.noise * unit[j];
                }
                normalize_into(accum, dst, p.dim);
            }
        }
        data.queries.append_passage(qid, query_rows.data(), p.query_tokens);
        data.qrels[qid].insert(source);
    }

    return data;
}

void synth_to_files(const SynthParams& params, const std::string& embeddings_path,
                    const std::string& queries_path, const std::string& qrels_path,
                    const std::string& tokens_path) {
    const SynthData data = synth(params);
    write_embeddings(data.corpus, embeddings_path);
    write_embeddings(data.queries, queries_path);
    write_qrels(data.qrels, qrels_path);
    if (!tokens_path.empty()) {
        std::ofstream out(tokens_path, std::ios::trunc);
        require(out.good(), ErrorKind::io_failure, "cannot open for writing: " + tokens_path);
        for (size_t e = 0; e < data.token_ids.size(); ++e) {
            out << e << '\t' << data.token_ids[e] << '\n';
        }
        out.flush();
        require(out.good(), ErrorKind::io_failure, "write failed: " + tokens_path);
    }
}

}  // namespace lire

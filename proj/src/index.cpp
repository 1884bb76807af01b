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

#include "lire/index.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lire/binary.hpp"
#include "lire/log.hpp"
#include "lire/parallel.hpp"
#include "lire/rng.hpp"

#include <json.hpp>

namespace fs = std::filesystem;

namespace lire {

namespace {

constexpr uint32_t kIndexFormatVersion = 1;

void check_index_file(bool cond, const std::string& file, const std::string& what) {
    if (!cond) fail(ErrorKind::malformed_index, file + ": " + what);
}

}  // namespace

void CompressedIndex::decode_passage(size_t p, float* out) const {
    const uint64_t begin = offsets[p];
    const uint64_t end = offsets[p + 1];
    for (uint64_t e = begin; e < end; ++e) {
        decode_embedding(e, out + (e - begin) * codec.dim);
    }
}

void CompressedIndex::decode_embedding(uint64_t e, float* out) const {
    codec.decode_to(codes[e], residuals.data() + e * codec.residual_bytes(), out);
}

void CompressedIndex::validate() const {
    codec.validate();
    require(n_passages >= 1, ErrorKind::malformed_index, "index: zero passages");
    require(passage_ids.size() == n_passages && doclens.size() == n_passages &&
                offsets.size() == n_passages + 1,
            ErrorKind::malformed_index, "index: passage bookkeeping size mismatch");
    require(offsets.front() == 0 && offsets.back() == n_embeddings,
            ErrorKind::malformed_index, "index: offsets do not span the embedding range");
    for (size_t p = 0; p < n_passages; ++p) {
        require(doclens[p] >= 1, ErrorKind::malformed_index, "index: empty passage");
        require(offsets[p + 1] - offsets[p] == doclens[p], ErrorKind::malformed_index,
                "index: offsets do not match doclens");
        if (p > 0) {
            require(passage_ids[p] > passage_ids[p - 1], ErrorKind::malformed_index,
                    "index: passage_ids not strictly increasing");
        }
    }
    require(codes.size() == n_embeddings, ErrorKind::malformed_index,
            "index: code count mismatch");
    for (const uint32_t c : codes) {
        require(c < codec.n_centroids, ErrorKind::malformed_index,
                "index: code out of centroid range");
    }
    require(residuals.size() == n_embeddings * codec.residual_bytes(),
            ErrorKind::malformed_index, "index: residual byte count mismatch");
}

std::pair<CompressedIndex, InvertedLists> build_index(const EmbeddingSet& embeddings,
                                                      const BuildParams& params) {
    embeddings.validate();
    require(params.bits == 1 || params.bits == 2, ErrorKind::invalid_argument,
            "bits must be 1 or 2");
    require(params.chunk_size >= 1, ErrorKind::invalid_argument, "chunk_size must be positive");
    require(params.sample_mult > 0.0, ErrorKind::invalid_argument,
            "sample_mult must be positive");
    const uint64_t n_passages = embeddings.n_passages();
    const uint64_t n_embeddings = embeddings.n_vectors();
    require(n_passages >= 1, ErrorKind::empty_corpus, "no passages to index");
    require(n_embeddings <= (uint64_t{1} << 32), ErrorKind::invalid_argument,
            "corpus exceeds 2^32 embeddings");

    // Stage 1: centroid selection over a sqrt-sized passage sample.
    uint64_t sample_size = static_cast<uint64_t>(
        std::ceil(params.sample_mult * std::sqrt(static_cast<double>(n_passages))));
    sample_size = std::clamp<uint64_t>(sample_size, 1, n_passages);

    Rng rng(params.seed);
    std::vector<uint64_t> sampled = rng.sample_without_replacement(n_passages, sample_size);
    std::sort(sampled.begin(), sampled.end());

    const uint32_t dim = embeddings.dim;
    std::vector<float> sample;
    for (const uint64_t p : sampled) {
        const float* rows = embeddings.passage_rows(p);
        sample.insert(sample.end(), rows,
                      rows + static_cast<size_t>(embeddings.doclens[p]) * dim);
    }
    const uint64_t n_sample_vectors = sample.size() / dim;

    uint64_t k = select_num_centroids(n_embeddings);
    if (k > n_sample_vectors) {
        // train_kmeans needs at least k points; stay a power of two.
        k = std::bit_floor(n_sample_vectors);
        log_info("centroid count clamped to " + std::to_string(k) + " by sample size " +
                 std::to_string(n_sample_vectors));
    }

    CompressedIndex index;
    index.codec = train_codec(sample.data(), n_sample_vectors, dim, k, params.bits,
                              params.seed, params.threads);
    index.n_passages = n_passages;
    index.n_embeddings = n_embeddings;
    index.seed = params.seed;
    index.passage_ids = embeddings.passage_ids;
    index.doclens = embeddings.doclens;
    index.offsets = embeddings.offsets;

    // Stage 2: chunked passage encoding. Every embedding's slot is known up
    // front, so chunk boundaries and in-chunk parallelism cannot change the
    // output.
    const size_t rb = index.codec.residual_bytes();
    index.codes.resize(n_embeddings);
    index.residuals.assign(n_embeddings * rb, 0);
    for (uint64_t chunk_start = 0; chunk_start < n_passages;
         chunk_start += params.chunk_size) {
        const uint64_t chunk_end = std::min<uint64_t>(chunk_start + params.chunk_size,
                                                      n_passages);
        const uint64_t e_begin = embeddings.offsets[chunk_start];
        const uint64_t e_end = embeddings.offsets[chunk_end];
        parallel_for(e_end - e_begin, params.threads, [&](size_t begin, size_t end) {
            for (size_t i = begin; i < end; ++i) {
                const uint64_t e = e_begin + i;
                index.codec.encode_to(embeddings.row(e), &index.codes[e],
                                      index.residuals.data() + e * rb);
            }
        });
    }

    // Stage 3: inversion by counting sort; ascending embedding order makes
    // every posting list sorted.
    InvertedLists ivf;
    ivf.list_offsets.assign(k + 1, 0);
    for (const uint32_t c : index.codes) ivf.list_offsets[c + 1]++;
    for (uint64_t c = 0; c < k; ++c) ivf.list_offsets[c + 1] += ivf.list_offsets[c];
    ivf.postings.resize(n_embeddings);
    std::vector<uint64_t> cursor(ivf.list_offsets.begin(), ivf.list_offsets.end() - 1);
    for (uint64_t e = 0; e < n_embeddings; ++e) {
        ivf.postings[cursor[index.codes[e]]++] = static_cast<uint32_t>(e);
    }

    return {std::move(index), std::move(ivf)};
}

void save_index(const CompressedIndex& index, const InvertedLists& ivf,
                const std::string& dir) {
    index.validate();
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, ErrorKind::io_failure, "cannot create directory: " + dir);

    nlohmann::ordered_json meta;
    meta["format_version"] = kIndexFormatVersion;
    meta["dim"] = index.codec.dim;
    meta["bits"] = index.codec.bits;
    meta["n_passages"] = index.n_passages;
    meta["n_embeddings"] = index.n_embeddings;
    meta["n_centroids"] = index.codec.n_centroids;
    meta["seed"] = index.seed;
    {
        std::ofstream out(fs::path(dir) / "meta.json", std::ios::trunc);
        require(out.good(), ErrorKind::io_failure, "cannot write meta.json in " + dir);
        out << meta.dump(2) << '\n';
        out.flush();
        require(out.good(), ErrorKind::io_failure, "write failed: meta.json");
    }

    save_codec(index.codec, (fs::path(dir) / "codec.bin").string());

    {
        BinaryWriter out((fs::path(dir) / "doclens.bin").string());
        out.u64(index.n_passages);
        for (const uint32_t len : index.doclens) out.u32(len);
        out.finish();
    }
    {
        BinaryWriter out((fs::path(dir) / "pids.bin").string());
        for (const uint64_t pid : index.passage_ids) out.u64(pid);
        out.finish();
    }
    {
        BinaryWriter out((fs::path(dir) / "codes.bin").string());
        for (const uint32_t c : index.codes) out.u32(c);
        out.finish();
    }
    {
        BinaryWriter out((fs::path(dir) / "residuals.bin").string());
        out.bytes(index.residuals.data(), index.residuals.size());
        out.finish();
    }
    {
        BinaryWriter out((fs::path(dir) / "ivf.bin").string());
        for (const uint64_t off : ivf.list_offsets) out.u64(off);
        for (const uint32_t e : ivf.postings) out.u32(e);
        out.finish();
    }
}

std::pair<CompressedIndex, InvertedLists> load_index(const std::string& dir) {
    const fs::path base(dir);
    require(fs::is_directory(base), ErrorKind::io_failure, "not a directory: " + dir);
    for (const char* name :
         {"meta.json", "codec.bin", "doclens.bin", "pids.bin", "codes.bin", "residuals.bin",
          "ivf.bin"}) {
        require(fs::exists(base / name), ErrorKind::malformed_index,
                dir + ": missing " + name);
    }

    nlohmann::json meta;
    {
        std::ifstream in(base / "meta.json");
        require(in.good(), ErrorKind::io_failure, "cannot read meta.json in " + dir);
        try {
            in >> meta;
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorKind::malformed_index, "meta.json: parse error: " + std::string(e.what()));
        }
    }
    check_index_file(meta.value("format_version", 0u) == kIndexFormatVersion, "meta.json",
                     "unsupported format_version");

    CompressedIndex index;
    index.codec = load_codec((base / "codec.bin").string());
    index.n_passages = meta.value("n_passages", uint64_t{0});
    index.n_embeddings = meta.value("n_embeddings", uint64_t{0});
    index.seed = meta.value("seed", uint64_t{0});
    check_index_file(meta.value("dim", 0u) == index.codec.dim, "meta.json",
                     "dim disagrees with codec.bin");
    check_index_file(meta.value("bits", 0u) == index.codec.bits, "meta.json",
                     "bits disagrees with codec.bin");
    check_index_file(meta.value("n_centroids", uint64_t{0}) == index.codec.n_centroids,
                     "meta.json", "n_centroids disagrees with codec.bin");
    check_index_file(index.n_passages >= 1, "meta.json", "zero passages");

    {
        BinaryReader in((base / "doclens.bin").string());
        const uint64_t n = in.u64();
        check_index_file(n == index.n_passages, "doclens.bin", "passage count mismatch");
        index.doclens.resize(n);
        for (uint64_t p = 0; p < n; ++p) index.doclens[p] = in.u32();
        check_index_file(in.at_eof(), "doclens.bin", "trailing bytes");
    }
    index.offsets.resize(index.n_passages + 1);
    index.offsets[0] = 0;
    for (uint64_t p = 0; p < index.n_passages; ++p) {
        index.offsets[p + 1] = index.offsets[p] + index.doclens[p];
    }
    check_index_file(index.offsets.back() == index.n_embeddings, "doclens.bin",
                     "doclens do not sum to n_embeddings");

    {
        BinaryReader in((base / "pids.bin").string());
        index.passage_ids.resize(index.n_passages);
        for (uint64_t p = 0; p < index.n_passages; ++p) index.passage_ids[p] = in.u64();
        check_index_file(in.at_eof(), "pids.bin", "trailing bytes");
    }
    {
        BinaryReader in((base / "codes.bin").string());
        index.codes.resize(index.n_embeddings);
        for (uint64_t e = 0; e < index.n_embeddings; ++e) index.codes[e] = in.u32();
        check_index_file(in.at_eof(), "codes.bin", "trailing bytes");
    }
    {
        const uint64_t expected = index.n_embeddings * index.codec.residual_bytes();
        const uint64_t actual = fs::file_size(base / "residuals.bin");
        check_index_file(actual == expected, "residuals.bin",
                         "length " + std::to_string(actual) + ", expected " +
                             std::to_string(expected));
        BinaryReader in((base / "residuals.bin").string());
        index.residuals.resize(expected);
        if (expected > 0) in.bytes(index.residuals.data(), expected);
    }

    InvertedLists ivf;
    {
        BinaryReader in((base / "ivf.bin").string());
        ivf.list_offsets.resize(index.codec.n_centroids + 1);
        for (auto& off : ivf.list_offsets) off = in.u64();
        check_index_file(ivf.list_offsets.front() == 0, "ivf.bin",
                         "list offsets must start at 0");
        for (size_t c = 1; c < ivf.list_offsets.size(); ++c) {
            check_index_file(ivf.list_offsets[c - 1] <= ivf.list_offsets[c], "ivf.bin",
                             "list offsets not non-decreasing");
        }
        check_index_file(ivf.list_offsets.back() == index.n_embeddings, "ivf.bin",
                         "postings do not cover all embeddings");
        ivf.postings.resize(index.n_embeddings);
        for (uint64_t i = 0; i < index.n_embeddings; ++i) ivf.postings[i] = in.u32();
        check_index_file(in.at_eof(), "ivf.bin", "trailing bytes");
    }

    try {
        index.validate();
    } catch (const Error& e) {
        fail(ErrorKind::malformed_index, std::string("index invariants: ") + e.what());
    }

    // Cross-check the inversion: list c holds exactly the embeddings coded c,
    // each list ascending, and together they form a permutation.
    std::vector<char> seen(index.n_embeddings, 0);
    for (uint64_t c = 0; c < index.codec.n_centroids; ++c) {
        const uint32_t* begin = ivf.list_begin(c);
        const uint32_t* end = ivf.list_end(c);
        for (const uint32_t* it = begin; it != end; ++it) {
            check_index_file(*it < index.n_embeddings, "ivf.bin", "posting out of range");
            check_index_file(!seen[*it], "ivf.bin", "duplicate posting");
            seen[*it] = 1;
            check_index_file(index.codes[*it] == c, "ivf.bin",
                             "posting assigned to the wrong centroid list");
            if (it != begin) {
                check_index_file(*(it - 1) < *it, "ivf.bin", "posting list not ascending");
            }
        }
    }

    return {std::move(index), std::move(ivf)};
}

std::string IndexStats::to_string() const {
    std::ostringstream out;
    out << "dim=" << dim << " bits=" << bits << " passages=" << n_passages
        << " embeddings=" << n_embeddings << " centroids=" << n_centroids << '\n';
    out << "codes.bin       " << bytes_codes << " B\n";
    out << "residuals.bin   " << bytes_residuals << " B\n";
    out << "centroids       " << bytes_centroids << " B\n";
    out << "buckets         " << bytes_buckets << " B\n";
    out << "doclens.bin     " << bytes_doclens << " B\n";
    out << "pids.bin        " << bytes_pids << " B\n";
    out << "ivf.bin         " << bytes_ivf << " B\n";
    out << "total           " << bytes_total << " B\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "bytes/vector: core=%.2f total=%.2f; compression vs %u-byte fp16 baseline: "
                  "core=%.2fx total=%.2fx",
                  bytes_per_vector_core, bytes_per_vector_total, 2 * dim, ratio_core,
                  ratio_total);
    out << buf;
    return out.str();
}

IndexStats index_stats(const CompressedIndex& index, const InvertedLists& ivf) {
    IndexStats s;
    s.dim = index.codec.dim;
    s.bits = index.codec.bits;
    s.n_passages = index.n_passages;
    s.n_embeddings = index.n_embeddings;
    s.n_centroids = index.codec.n_centroids;
    s.bytes_codes = index.codes.size() * 4;
    s.bytes_residuals = index.residuals.size();
    s.bytes_centroids = index.codec.centroids.size() * 4;
    s.bytes_buckets = (index.codec.cutoffs.size() + index.codec.weights.size()) * 4;
    s.bytes_doclens = 8 + index.doclens.size() * 4;
    s.bytes_pids = index.passage_ids.size() * 8;
    s.bytes_ivf = ivf.list_offsets.size() * 8 + ivf.postings.size() * 4;
    s.bytes_total = s.bytes_codes + s.bytes_residuals + s.bytes_centroids + s.bytes_buckets +
                    s.bytes_doclens + s.bytes_pids + s.bytes_ivf;
    const double n = static_cast<double>(index.n_embeddings);
    s.bytes_per_vector_core = 4.0 + static_cast<double>(index.codec.residual_bytes());
    s.bytes_per_vector_total = static_cast<double>(s.bytes_total) / n;
    const double baseline = 2.0 * s.dim;
    s.ratio_core = baseline / s.bytes_per_vector_core;
    s.ratio_total = baseline / s.bytes_per_vector_total;
    return s;
}

}  // namespace lire

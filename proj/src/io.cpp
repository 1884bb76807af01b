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

#include "lire/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "lire/binary.hpp"
#include "lire/half.hpp"
#include "lire/log.hpp"

namespace lire {

namespace {

constexpr char kEmbeddingMagic[8] = {'L', 'I', 'E', 'M', 'B', '1', '\0', '\0'};
constexpr uint32_t kEmbeddingVersion = 1;

// Norm tolerance bands (on |norm - 1|): accept, renormalize+warn, reject.
constexpr double kNormAccept = 1e-3;
constexpr double kNormReject = 1e-2;

double row_norm(const float* row, uint32_t dim) {
    double s = 0.0;
    for (uint32_t j = 0; j < dim; ++j) s += static_cast<double>(row[j]) * row[j];
    return std::sqrt(s);
}

uint64_t parse_u64_field(std::string_view field, const std::string& path, size_t line_no) {
    uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(ErrorKind::malformed_line,
             path + ": line " + std::to_string(line_no) + ": expected integer, got '" +
                 std::string(field) + "'");
    }
    return value;
}

double parse_double_field(std::string_view field, const std::string& path, size_t line_no) {
    // std::from_chars for doubles is available on this toolchain, but strtod
    // keeps the parse locale-independent only with the C locale; from_chars
    // avoids locale issues entirely.
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        fail(ErrorKind::malformed_line,
             path + ": line " + std::to_string(line_no) + ": expected number, got '" +
                 std::string(field) + "'");
    }
    return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    size_t start = 0;
    while (true) {
        const size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

bool is_blank_or_comment(std::string_view line) {
    const size_t pos = line.find_first_not_of(" \t\r");
    return pos == std::string_view::npos || line[pos] == '#';
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

void EmbeddingSet::validate() const {
    require(dim >= 1, ErrorKind::malformed_input, "dim must be positive");
    require(!passage_ids.empty(), ErrorKind::malformed_input, "zero passages");
    require(doclens.size() == passage_ids.size() && offsets.size() == passage_ids.size() + 1,
            ErrorKind::malformed_input, "inconsistent passage bookkeeping");
    require(offsets.front() == 0, ErrorKind::malformed_input, "offsets must start at 0");
    for (size_t p = 0; p < passage_ids.size(); ++p) {
        require(doclens[p] >= 1, ErrorKind::malformed_input,
                "passage " + std::to_string(passage_ids[p]) + " has no vectors");
        require(offsets[p + 1] - offsets[p] == doclens[p], ErrorKind::malformed_input,
                "offsets do not match doclens");
        if (p > 0) {
            require(passage_ids[p] > passage_ids[p - 1], ErrorKind::malformed_input,
                    "passage_ids not strictly increasing at position " + std::to_string(p));
        }
    }
    require(data.size() == n_vectors() * dim, ErrorKind::malformed_input,
            "data size does not match vector count");
    for (uint64_t e = 0; e < n_vectors(); ++e) {
        const double dev = std::abs(row_norm(row(e), dim) - 1.0);
        if (dev > kNormAccept) {
            fail(ErrorKind::non_unit_norm,
                 "row " + std::to_string(e) + " norm deviates by " + std::to_string(dev));
        }
    }
}

EmbeddingSet read_embeddings(const std::string& path) {
    BinaryReader in(path);

    char magic[8];
    in.bytes(reinterpret_cast<uint8_t*>(magic), 8);
    for (int i = 0; i < 8; ++i) {
        require(magic[i] == kEmbeddingMagic[i], ErrorKind::malformed_header,
                path + ": bad magic");
    }
    const uint32_t version = in.u32();
    require(version == kEmbeddingVersion, ErrorKind::malformed_header,
            path + ": unsupported version " + std::to_string(version));

    EmbeddingSet set;
    set.dim = in.u32();
    require(set.dim >= 1, ErrorKind::malformed_header, path + ": dim must be positive");
    const uint8_t precision = in.u8();
    require(precision <= 1, ErrorKind::malformed_header,
            path + ": unknown precision tag " + std::to_string(precision));
    set.precision = static_cast<Precision>(precision);
    in.u8();
    in.u8();
    in.u8();  // pad
    const uint64_t n_passages = in.u64();
    require(n_passages >= 1, ErrorKind::malformed_input, path + ": zero passages");

    std::vector<float> rows;
    std::vector<uint8_t> half_buf;
    uint64_t renormalized = 0;
    for (uint64_t p = 0; p < n_passages; ++p) {
        const uint64_t pid = in.u64();
        if (p > 0) {
            require(pid > set.passage_ids.back(), ErrorKind::malformed_input,
                    path + ": passage_ids not strictly increasing at passage " +
                        std::to_string(p));
        }
        const uint32_t len = in.u32();
        require(len >= 1, ErrorKind::malformed_input,
                path + ": passage " + std::to_string(pid) + " has zero vectors");

        const size_t n_values = static_cast<size_t>(len) * set.dim;
        rows.resize(n_values);
        if (set.precision == Precision::f32) {
            in.f32_array(rows.data(), n_values);
        } else {
            half_buf.resize(n_values * 2);
            in.bytes(half_buf.data(), half_buf.size());
            for (size_t i = 0; i < n_values; ++i) {
                const uint16_t h =
                    static_cast<uint16_t>(half_buf[i * 2] | (half_buf[i * 2 + 1] << 8));
                rows[i] = half_to_float(h);
            }
        }

        for (uint32_t r = 0; r < len; ++r) {
            float* row = rows.data() + static_cast<size_t>(r) * set.dim;
            const double norm = row_norm(row, set.dim);
            const double dev = std::abs(norm - 1.0);
            if (dev > kNormReject) {
                fail(ErrorKind::non_unit_norm,
                     path + ": passage " + std::to_string(pid) + " row " + std::to_string(r) +
                         " has norm " + std::to_string(norm));
            }
            if (dev > kNormAccept) {
                for (uint32_t j = 0; j < set.dim; ++j) {
                    row[j] = static_cast<float>(row[j] / norm);
                }
                renormalized++;
            }
        }
        set.append_passage(pid, rows.data(), len);
    }
    require(in.at_eof(), ErrorKind::malformed_input, path + ": trailing bytes after payload");

    if (renormalized > 0) {
        log_warn(path + ": renormalized " + std::to_string(renormalized) +
                 " row(s) with norm deviation in (1e-3, 1e-2]");
    }
    return set;
}

void write_embeddings(const EmbeddingSet& set, const std::string& path) {
    set.validate();

    BinaryWriter out(path);
    out.bytes(reinterpret_cast<const uint8_t*>(kEmbeddingMagic), 8);
    out.u32(kEmbeddingVersion);
    out.u32(set.dim);
    out.u8(static_cast<uint8_t>(set.precision));
    out.u8(0);
    out.u8(0);
    out.u8(0);
    out.u64(set.n_passages());
    for (size_t p = 0; p < set.n_passages(); ++p) {
        out.u64(set.passage_ids[p]);
        out.u32(set.doclens[p]);
        const float* rows = set.passage_rows(p);
        const size_t n_values = static_cast<size_t>(set.doclens[p]) * set.dim;
        if (set.precision == Precision::f32) {
            out.f32_array(rows, n_values);
        } else {
            for (size_t i = 0; i < n_values; ++i) out.u16(float_to_half(rows[i]));
        }
    }
    out.finish();
}

Qrels read_qrels(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io_failure, "cannot open for reading: " + path);

    Qrels qrels;
    std::string raw;
    size_t line_no = 0;
    while (std::getline(in, raw)) {
        line_no++;
        const std::string line = strip_cr(raw);
        if (is_blank_or_comment(line)) continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 2) {
            fail(ErrorKind::malformed_line,
                 path + ": line " + std::to_string(line_no) + ": expected 2 tab-separated fields");
        }
        const uint64_t qid = parse_u64_field(fields[0], path, line_no);
        const uint64_t pid = parse_u64_field(fields[1], path, line_no);
        qrels[qid].insert(pid);
    }
    return qrels;
}

void write_qrels(const Qrels& qrels, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    require(out.good(), ErrorKind::io_failure, "cannot open for writing: " + path);
    for (const auto& [qid, pids] : qrels) {
        for (const uint64_t pid : pids) {
            out << qid << '\t' << pid << '\n';
        }
    }
    out.flush();
    require(out.good(), ErrorKind::io_failure, "write failed: " + path);
}

void write_results(const RankedResults& results, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    require(out.good(), ErrorKind::io_failure, "cannot open for writing: " + path);
    char score_buf[64];
    for (const QueryResult& qr : results) {
        uint32_t rank = 1;
        for (const ScoredPassage& hit : qr.hits) {
            std::snprintf(score_buf, sizeof(score_buf), "%.6f", hit.score);
            out << qr.query_id << '\t' << rank << '\t' << hit.passage_id << '\t' << score_buf
                << '\n';
            rank++;
        }
    }
    out.flush();
    require(out.good(), ErrorKind::io_failure, "write failed: " + path);
}

RankedResults read_results(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), ErrorKind::io_failure, "cannot open for reading: " + path);

    RankedResults results;
    std::string raw;
    size_t line_no = 0;
    while (std::getline(in, raw)) {
        line_no++;
        const std::string line = strip_cr(raw);
        if (is_blank_or_comment(line)) continue;
        const auto fields = split_tabs(line);
        if (fields.size() != 4) {
            fail(ErrorKind::malformed_line,
                 path + ": line " + std::to_string(line_no) + ": expected 4 tab-separated fields");
        }
        const uint64_t qid = parse_u64_field(fields[0], path, line_no);
        const uint64_t rank = parse_u64_field(fields[1], path, line_no);
        const uint64_t pid = parse_u64_field(fields[2], path, line_no);
        const double score = parse_double_field(fields[3], path, line_no);

        if (results.empty() || results.back().query_id != qid) {
            results.push_back(QueryResult{qid, {}});
        }
        if (rank != results.back().hits.size() + 1) {
            fail(ErrorKind::malformed_line,
                 path + ": line " + std::to_string(line_no) + ": rank " + std::to_string(rank) +
                     " out of sequence for query " + std::to_string(qid));
        }
        results.back().hits.push_back(ScoredPassage{pid, score});
    }
    return results;
}

}  // namespace lire

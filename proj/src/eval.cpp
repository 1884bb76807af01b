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

#include "lire/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>

#include "lire/log.hpp"

namespace lire {

namespace {

using PerQueryMetric =
    std::function<double(const std::vector<ScoredPassage>&, const std::set<uint64_t>&)>;

MetricReport evaluate(const std::string& name, const RankedResults& results, const Qrels& qrels,
                      const PerQueryMetric& metric) {
    MetricReport report;
    report.name = name;
    double sum = 0.0;
    for (const QueryResult& qr : results) {
        const auto it = qrels.find(qr.query_id);
        if (it == qrels.end()) {
            report.n_skipped++;
            continue;
        }
        const double value = metric(qr.hits, it->second);
        report.per_query.emplace_back(qr.query_id, value);
        sum += value;
    }
    report.n_evaluated = report.per_query.size();
    if (report.n_evaluated == 0) {
        fail(ErrorKind::empty_intersection, "no scored query appears in the qrels");
    }
    if (report.n_skipped > 0) {
        log_warn(name + ": skipped " + std::to_string(report.n_skipped) +
                 " query(ies) absent from the qrels");
    }
    report.mean = sum / static_cast<double>(report.n_evaluated);
    return report;
}

}  // namespace

MetricReport mrr_at_k(const RankedResults& results, const Qrels& qrels, uint32_t k) {
    require(k >= 1, ErrorKind::invalid_argument, "k must be positive");
    return evaluate("mrr@" + std::to_string(k), results, qrels,
                    [k](const std::vector<ScoredPassage>& hits, const std::set<uint64_t>& rel) {
                        const size_t depth = std::min<size_t>(hits.size(), k);
                        for (size_t r = 0; r < depth; ++r) {
                            if (rel.count(hits[r].passage_id)) {
                                return 1.0 / static_cast<double>(r + 1);
                            }
                        }
                        return 0.0;
                    });
}

MetricReport success_at_k(const RankedResults& results, const Qrels& qrels, uint32_t k) {
    require(k >= 1, ErrorKind::invalid_argument, "k must be positive");
    return evaluate("success@" + std::to_string(k), results, qrels,
                    [k](const std::vector<ScoredPassage>& hits, const std::set<uint64_t>& rel) {
                        const size_t depth = std::min<size_t>(hits.size(), k);
                        for (size_t r = 0; r < depth; ++r) {
                            if (rel.count(hits[r].passage_id)) return 1.0;
                        }
                        return 0.0;
                    });
}

MetricReport recall_at_k(const RankedResults& results, const Qrels& qrels, uint32_t k) {
    require(k >= 1, ErrorKind::invalid_argument, "k must be positive");
    return evaluate("recall@" + std::to_string(k), results, qrels,
                    [k](const std::vector<ScoredPassage>& hits, const std::set<uint64_t>& rel) {
                        const size_t depth = std::min<size_t>(hits.size(), k);
                        size_t found = 0;
                        for (size_t r = 0; r < depth; ++r) {
                            if (rel.count(hits[r].passage_id)) found++;
                        }
                        return static_cast<double>(found) / static_cast<double>(rel.size());
                    });
}

std::vector<BenchRow> bench_latency(const CompressedIndex& index, const InvertedLists& ivf,
                                    const EmbeddingSet& queries, const Qrels* qrels,
                                    const std::vector<SearchParams>& sweep,
                                    uint32_t repetitions) {
    require(repetitions >= 1, ErrorKind::invalid_argument, "repetitions must be positive");
    using clock = std::chrono::steady_clock;

    const Searcher searcher(index, ivf);
    std::vector<BenchRow> rows;
    rows.reserve(sweep.size());
    for (const SearchParams& params : sweep) {
        params.validate(index.codec.n_centroids);
        BenchRow row;
        row.params = params;
        row.repetitions = repetitions;

        double sum = 0.0;
        double lo = 0.0, hi = 0.0;
        size_t n_samples = 0;
        RankedResults last;
        for (uint32_t rep = 0; rep < repetitions; ++rep) {
            last.clear();
            for (size_t q = 0; q < queries.n_passages(); ++q) {
                const auto t0 = clock::now();
                QueryResult qr = searcher.search(queries.passage_rows(q), queries.doclens[q],
                                                 queries.passage_ids[q], params);
                const auto t1 = clock::now();
                const double ms =
                    std::chrono::duration<double, std::milli>(t1 - t0).count();
                if (n_samples == 0) {
                    lo = hi = ms;
                } else {
                    lo = std::min(lo, ms);
                    hi = std::max(hi, ms);
                }
                sum += ms;
                n_samples++;
                last.push_back(std::move(qr));
            }
        }
        row.mean_ms = sum / static_cast<double>(n_samples);
        row.min_ms = lo;
        row.max_ms = hi;
        if (qrels != nullptr) {
            row.mrr10 = mrr_at_k(last, *qrels, 10).mean;
            row.success5 = success_at_k(last, *qrels, 5).mean;
        }
        rows.push_back(row);
    }
    return rows;
}

double bench_throughput(const CompressedIndex& index, const InvertedLists& ivf,
                        const EmbeddingSet& queries, const SearchParams& params, int threads) {
    using clock = std::chrono::steady_clock;
    const Searcher searcher(index, ivf);
    const auto t0 = clock::now();
    searcher.search_batch(queries, params, threads);
    const auto t1 = clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();
    return static_cast<double>(queries.n_passages()) / seconds;
}

void write_bench_tsv(const std::vector<BenchRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    require(out.good(), ErrorKind::io_failure, "cannot open for writing: " + path);
    out << "nprobe\tncandidates\tk\treps\tmean_ms\tmin_ms\tmax_ms\tmrr@10\tsuccess@5\n";
    char buf[256];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%u\t%u\t%u\t%u\t%.3f\t%.3f\t%.3f\t", r.params.nprobe,
                      r.params.ncandidates, r.params.k, r.repetitions, r.mean_ms, r.min_ms,
                      r.max_ms);
        out << buf;
        if (r.mrr10 >= 0.0) {
            std::snprintf(buf, sizeof(buf), "%.6f\t%.6f\n", r.mrr10, r.success5);
            out << buf;
        } else {
            out << "-\t-\n";
        }
    }
    out.flush();
    require(out.good(), ErrorKind::io_failure, "write failed: " + path);
}

}  // namespace lire

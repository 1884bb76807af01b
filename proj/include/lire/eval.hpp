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

#include <string>
#include <vector>

#include "lire/search.hpp"
#include "lire/types.hpp"

namespace lire {

struct MetricReport {
    std::string name;
    std::vector<std::pair<uint64_t, double>> per_query;  // (query_id, value in [0,1])
    double mean = 0.0;                                   // macro average
    size_t n_evaluated = 0;
    size_t n_skipped = 0;  // scored queries absent from the qrels
};

// Per query: 1/rank of the first relevant passage within the top k, else 0.
MetricReport mrr_at_k(const RankedResults& results, const Qrels& qrels, uint32_t k);
// Per query: 1 if any relevant passage is in the top k, else 0.
MetricReport success_at_k(const RankedResults& results, const Qrels& qrels, uint32_t k);
// Per query: |relevant ∩ top k| / |relevant|.
MetricReport recall_at_k(const RankedResults& results, const Qrels& qrels, uint32_t k);

struct BenchRow {
    SearchParams params;
    uint32_t repetitions = 0;
    double mean_ms = 0.0;
    double min_ms = 0.0;
    double max_ms = 0.0;
    double mrr10 = -1.0;     // -1 when no qrels supplied
    double success5 = -1.0;
};

// Times search (candidate generation + rescoring; index load excluded) per
// query across `repetitions` passes for every sweep point, and evaluates
// MRR@10 / Success@5 against the qrels when given. Queries run
// single-threaded for stable timing.
std::vector<BenchRow> bench_latency(const CompressedIndex& index, const InvertedLists& ivf,
                                    const EmbeddingSet& queries, const Qrels* qrels,
                                    const std::vector<SearchParams>& sweep,
                                    uint32_t repetitions);

// Parallel throughput companion: wall-clock queries/second over one pass
// with the given thread count.
double bench_throughput(const CompressedIndex& index, const InvertedLists& ivf,
                        const EmbeddingSet& queries, const SearchParams& params, int threads);

void write_bench_tsv(const std::vector<BenchRow>& rows, const std::string& path);

}  // namespace lire

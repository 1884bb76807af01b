#include <doctest.h>

#include "lire/eval.hpp"
#include "lire/synth.hpp"

#include "helpers.hpp"

using namespace lire;

namespace {

// results fixture: per query one ranked list of plain pids 100, 101, ...
RankedResults fixture_results(const std::vector<std::pair<uint64_t, size_t>>& queries) {
    RankedResults results;
    for (const auto& [qid, depth] : queries) {
        QueryResult qr;
        qr.query_id = qid;
        for (size_t r = 0; r < depth; ++r) {
            qr.hits.push_back(ScoredPassage{100 + r, 1.0 - 0.01 * static_cast<double>(r)});
        }
        results.push_back(qr);
    }
    return results;
}

}  // namespace

TEST_CASE("mrr@k definition") {
    const RankedResults results = fixture_results({{1, 15}, {2, 15}});
    Qrels qrels;
    qrels[1] = {102};  // rank 3
    qrels[2] = {110};  // rank 11, outside k=10
    const MetricReport report = mrr_at_k(results, qrels, 10);
    REQUIRE(report.per_query.size() == 2);
    CHECK(report.per_query[0].second == doctest::Approx(1.0 / 3.0));
    CHECK(report.per_query[1].second == 0.0);
    CHECK(report.mean == doctest::Approx((1.0 / 3.0) / 2.0));
}

TEST_CASE("two queries with values 1 and 0 average to one half") {
    const RankedResults results = fixture_results({{1, 5}, {2, 5}});
    Qrels qrels;
    qrels[1] = {100};
    qrels[2] = {999};
    CHECK(mrr_at_k(results, qrels, 10).mean == doctest::Approx(0.5));
}

TEST_CASE("success@k boundary behavior") {
    const RankedResults results = fixture_results({{1, 8}, {2, 8}});
    Qrels qrels;
    qrels[1] = {104};  // rank 5
    qrels[2] = {105};  // rank 6
    const MetricReport s5 = success_at_k(results, qrels, 5);
    CHECK(s5.per_query[0].second == 1.0);
    CHECK(s5.per_query[1].second == 0.0);

    Qrels all_hit;
    all_hit[1] = {100};
    all_hit[2] = {101};
    CHECK(success_at_k(results, all_hit, 5).mean == 1.0);
}

TEST_CASE("recall@k counts the relevant fraction") {
    const RankedResults results = fixture_results({{1, 10}});
    Qrels qrels;
    qrels[1] = {100, 999};  // one of two relevant retrieved
    CHECK(recall_at_k(results, qrels, 10).per_query[0].second == doctest::Approx(0.5));

    Qrels singleton;
    singleton[1] = {103};
    // with one relevant passage, recall == success
    CHECK(recall_at_k(results, singleton, 10).mean ==
          success_at_k(results, singleton, 10).mean);

    Qrels missing;
    missing[1] = {888, 999};
    CHECK(recall_at_k(results, missing, 10).mean == 0.0);
}

TEST_CASE("success dominates mrr pointwise") {
    Rng rng(15);
    RankedResults results;
    Qrels qrels;
    for (uint64_t q = 0; q < 30; ++q) {
        QueryResult qr;
        qr.query_id = q;
        for (size_t r = 0; r < 12; ++r) {
            qr.hits.push_back(ScoredPassage{rng.below(40), 1.0 - 0.01 * static_cast<double>(r)});
        }
        results.push_back(qr);
        qrels[q] = {rng.below(40)};
    }
    const MetricReport mrr = mrr_at_k(results, qrels, 10);
    const MetricReport suc = success_at_k(results, qrels, 10);
    REQUIRE(mrr.per_query.size() == suc.per_query.size());
    for (size_t i = 0; i < mrr.per_query.size(); ++i) {
        CHECK(suc.per_query[i].second >= mrr.per_query[i].second);
        CHECK(mrr.per_query[i].second >= 0.0);
        CHECK(suc.per_query[i].second <= 1.0);
    }
    CHECK(suc.mean >= mrr.mean);
}

TEST_CASE("queries missing from the qrels are skipped and counted") {
    const RankedResults results = fixture_results({{1, 3}, {2, 3}, {3, 3}});
    Qrels qrels;
    qrels[2] = {101};
    const MetricReport report = mrr_at_k(results, qrels, 10);
    CHECK(report.n_evaluated == 1);
    CHECK(report.n_skipped == 2);
    CHECK(report.mean == doctest::Approx(0.5));

    Qrels disjoint;
    disjoint[99] = {1};
    try {
        mrr_at_k(results, disjoint, 10);
        FAIL("expected empty_intersection");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_intersection);
    }
}

TEST_CASE("bench produces one row per sweep point with sane timings") {
    const SynthParams sp{SynthProfile::clustered, 30, 4, 8, 8, 0.1, 2, 6, 2};
    const SynthData data = synth(sp);
    BuildParams bp;
    const auto [index, ivf] = build_index(data.corpus, bp);

    std::vector<SearchParams> sweep;
    for (const uint32_t probe : {1u, 2u}) {
        SearchParams params;
        params.nprobe = probe;
        params.ncandidates = 64;
        params.k = 5;
        sweep.push_back(params);
    }
    const auto rows = bench_latency(index, ivf, data.queries, &data.qrels, sweep, 3);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.repetitions == 3);
        CHECK(row.min_ms <= row.mean_ms);
        CHECK(row.mean_ms <= row.max_ms);
        CHECK(row.mrr10 >= 0.0);
        CHECK(row.success5 >= 0.0);
        CHECK(row.success5 <= 1.0);
    }

    // empty sweep -> empty table
    CHECK(bench_latency(index, ivf, data.queries, nullptr, {}, 3).empty());

    test_helpers::TmpDir tmp("bench");
    write_bench_tsv(rows, tmp.file("bench.tsv"));
    std::ifstream in(tmp.file("bench.tsv"));
    std::string line;
    std::getline(in, line);
    CHECK(line.find("nprobe") == 0);
    size_t data_lines = 0;
    while (std::getline(in, line)) data_lines++;
    CHECK(data_lines == 2);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "lire/oracle.hpp"
#include "lire/search.hpp"
#include "lire/synth.hpp"

#include "helpers.hpp"

using namespace lire;
using test_helpers::make_set;
using test_helpers::unit_vector;

namespace {

std::map<uint64_t, double> score_by_pid(const QueryResult& qr) {
    std::map<uint64_t, double> m;
    for (const auto& hit : qr.hits) m[hit.passage_id] = hit.score;
    return m;
}

}  // namespace

TEST_CASE("maxsim basics") {
    // self-similarity of a unit vector
    const auto q = unit_vector({3, 4});
    const std::vector<float> d = {q[0], q[1], 0.0f, 1.0f};
    CHECK(maxsim(q.data(), 1, d.data(), 2, 2) == doctest::Approx(1.0).epsilon(1e-7));

    // worked two-row example
    const std::vector<float> Q = {1, 0, 0, 1};
    const std::vector<float> D = {0.6f, 0.8f, 1, 0, 0.8f, -0.6f};
    CHECK(maxsim(Q.data(), 2, D.data(), 3, 2) == doctest::Approx(1.8));

    // duplicated query rows scale linearly
    std::vector<float> Q4;
    for (int i = 0; i < 4; ++i) Q4.insert(Q4.end(), {0.6f, 0.8f});
    const double one = maxsim(Q4.data(), 1, D.data(), 3, 2);
    CHECK(maxsim(Q4.data(), 4, D.data(), 3, 2) == doctest::Approx(4.0 * one));
}

TEST_CASE("exhaustive probing reproduces clamped decoded scores exactly") {
    const SynthParams sp{SynthProfile::clustered, 30, 5, 8, 10, 0.15, 21, 6, 3};
    const SynthData data = synth(sp);
    BuildParams bp;
    bp.bits = 2;
    const auto [index, ivf] = build_index(data.corpus, bp);
    const Searcher searcher(index, ivf);

    const RankedResults clamped = brute_force_decoded(
        data.queries, index, static_cast<uint32_t>(index.n_passages), true);

    for (size_t qi = 0; qi < data.queries.n_passages(); ++qi) {
        const auto candidates =
            searcher.generate_candidates(data.queries.passage_rows(qi), data.queries.doclens[qi],
                                         static_cast<uint32_t>(index.codec.n_centroids));
        CHECK(candidates.size() == index.n_passages);  // everything is gathered
        const auto oracle_scores = score_by_pid(clamped[qi]);
        for (const Candidate& cand : candidates) {
            const uint64_t pid = index.passage_ids[cand.passage];
            CHECK(cand.approx == doctest::Approx(oracle_scores.at(pid)).epsilon(1e-12));
        }
    }
}

TEST_CASE("single-centroid index gathers every passage") {
    const auto set = make_set(4, {{0, {unit_vector({1, 0, 0, 0})}},
                                  {1, {unit_vector({0, 1, 0, 0})}},
                                  {2, {unit_vector({0, 0, 1, 1})}}});
    BuildParams bp;
    bp.sample_mult = 0.3;  // sample of 1 passage -> 1 vector -> single centroid
    const auto [index, ivf] = build_index(set, bp);
    REQUIRE(index.codec.n_centroids == 1);

    const Searcher searcher(index, ivf);
    const auto q = unit_vector({1, 1, 0, 0});
    const auto candidates = searcher.generate_candidates(q.data(), 1, 1);
    CHECK(candidates.size() == 3);
}

TEST_CASE("approximate scores lower-bound the clamped decoded maxsim") {
    const auto set = make_set(2, {{0, {unit_vector({1, 0}), unit_vector({0, 1})}},
                                  {5, {unit_vector({1, 1})}},
                                  // no pid gap with 3 passages: use 0,5,9
                                  {9, {unit_vector({-1, 1}), unit_vector({1, -1})}}});
    BuildParams bp;
    bp.bits = 1;
    const auto [index, ivf] = build_index(set, bp);
    const Searcher searcher(index, ivf);

    const RankedResults clamped =
        brute_force_decoded(make_set(2, {{0, {unit_vector({0.7f, 0.7f})}}}), index, 3, true);
    const auto oracle_scores = score_by_pid(clamped[0]);

    for (uint32_t nprobe = 1; nprobe <= index.codec.n_centroids; ++nprobe) {
        const auto q = unit_vector({0.7f, 0.7f});
        const auto candidates = searcher.generate_candidates(q.data(), 1, nprobe);
        for (const Candidate& cand : candidates) {
            const uint64_t pid = index.passage_ids[cand.passage];
            const double exact = oracle_scores.at(pid);
            CHECK(cand.approx <= exact + 1e-4 * std::abs(exact) + 1e-12);
        }
    }
}

TEST_CASE("search with exhaustive parameters equals the decoded brute force") {
    const SynthParams sp{SynthProfile::clustered, 40, 6, 16, 12, 0.2, 77, 8, 3};
    const SynthData data = synth(sp);
    for (const uint32_t bits : {1u, 2u}) {
        BuildParams bp;
        bp.bits = bits;
        const auto [index, ivf] = build_index(data.corpus, bp);
        const Searcher searcher(index, ivf);

        SearchParams params;
        params.nprobe = static_cast<uint32_t>(index.codec.n_centroids);
        params.ncandidates = static_cast<uint32_t>(index.n_passages);
        params.k = 10;
        const RankedResults got = searcher.search_batch(data.queries, params);
        const RankedResults want = brute_force_decoded(data.queries, index, 10, false);

        REQUIRE(got.size() == want.size());
        for (size_t q = 0; q < got.size(); ++q) {
            REQUIRE(got[q].hits.size() == want[q].hits.size());
            for (size_t r = 0; r < got[q].hits.size(); ++r) {
                CHECK(got[q].hits[r].passage_id == want[q].hits[r].passage_id);
                CHECK(got[q].hits[r].score == want[q].hits[r].score);
            }
        }
    }
}

TEST_CASE("exact score ties break to the lower passage id") {
    // passages 3 and 8 are identical; 12 is different
    const auto row = unit_vector({1, 2, 0, 0});
    const auto set = make_set(4, {{3, {row}}, {8, {row}}, {12, {unit_vector({0, 0, 1, 0})}}});
    BuildParams bp;
    const auto [index, ivf] = build_index(set, bp);
    const Searcher searcher(index, ivf);

    SearchParams params;
    params.nprobe = static_cast<uint32_t>(index.codec.n_centroids);
    params.ncandidates = 3;
    params.k = 1;
    const QueryResult qr = searcher.search(row.data(), 1, 0, params);
    REQUIRE(qr.hits.size() == 1);
    CHECK(qr.hits[0].passage_id == 3);
}

TEST_CASE("batch search is per-query independent") {
    const SynthParams sp{SynthProfile::clustered, 25, 4, 8, 8, 0.1, 5, 5, 2};
    const SynthData data = synth(sp);
    BuildParams bp;
    const auto [index, ivf] = build_index(data.corpus, bp);
    const Searcher searcher(index, ivf);
    SearchParams params;
    params.nprobe = 2;
    params.ncandidates = 32;
    params.k = 5;

    const RankedResults all = searcher.search_batch(data.queries, params);
    REQUIRE(all.size() == data.queries.n_passages());

    // batch of one equals the corresponding slice
    for (size_t q = 0; q < data.queries.n_passages(); ++q) {
        EmbeddingSet single;
        single.dim = data.queries.dim;
        single.append_passage(data.queries.passage_ids[q], data.queries.passage_rows(q),
                              data.queries.doclens[q]);
        const RankedResults one = searcher.search_batch(single, params);
        REQUIRE(one.size() == 1);
        CHECK(one[0].query_id == all[q].query_id);
        REQUIRE(one[0].hits.size() == all[q].hits.size());
        for (size_t r = 0; r < one[0].hits.size(); ++r) {
            CHECK(one[0].hits[r].passage_id == all[q].hits[r].passage_id);
            CHECK(one[0].hits[r].score == all[q].hits[r].score);
        }
    }

    // empty query list
    EmbeddingSet empty;
    empty.dim = data.queries.dim;
    CHECK(searcher.search_batch(empty, params).empty());

    // determinism across calls and thread counts
    const RankedResults again = searcher.search_batch(data.queries, params, 4);
    REQUIRE(again.size() == all.size());
    for (size_t q = 0; q < all.size(); ++q) {
        REQUIRE(again[q].hits.size() == all[q].hits.size());
        for (size_t r = 0; r < all[q].hits.size(); ++r) {
            CHECK(again[q].hits[r].passage_id == all[q].hits[r].passage_id);
            CHECK(again[q].hits[r].score == all[q].hits[r].score);
        }
    }
}

TEST_CASE("recall against the decoded oracle is monotone in nprobe") {
    const SynthParams sp{SynthProfile::clustered, 60, 6, 16, 16, 0.15, 13, 12, 3};
    const SynthData data = synth(sp);
    BuildParams bp;
    bp.bits = 2;
    const auto [index, ivf] = build_index(data.corpus, bp);
    const Searcher searcher(index, ivf);

    const uint32_t k = 10;
    const RankedResults oracle = brute_force_decoded(data.queries, index, k, false);

    std::vector<uint32_t> probes = {1, 2, 4};
    probes.push_back(static_cast<uint32_t>(index.codec.n_centroids));
    double prev_recall = -1.0;
    for (const uint32_t nprobe : probes) {
        SearchParams params;
        params.nprobe = nprobe;
        params.ncandidates = static_cast<uint32_t>(index.n_passages);
        params.k = k;
        const RankedResults got = searcher.search_batch(data.queries, params);
        double recall_sum = 0.0;
        for (size_t q = 0; q < got.size(); ++q) {
            std::set<uint64_t> want;
            for (const auto& hit : oracle[q].hits) want.insert(hit.passage_id);
            size_t found = 0;
            for (const auto& hit : got[q].hits) found += want.count(hit.passage_id);
            recall_sum += static_cast<double>(found) / static_cast<double>(want.size());
        }
        const double recall = recall_sum / static_cast<double>(got.size());
        CHECK(recall >= prev_recall - 1e-12);
        prev_recall = recall;
    }
    CHECK(prev_recall == doctest::Approx(1.0));  // exhaustive probe ends at full recall
}

TEST_CASE("search parameter validation") {
    const auto set = test_helpers::random_set(4, 8, 2, 0);
    BuildParams bp;
    const auto [index, ivf] = build_index(set, bp);
    const Searcher searcher(index, ivf);

    SearchParams bad_k;
    bad_k.k = 10;
    bad_k.ncandidates = 5;
    CHECK_THROWS_AS(bad_k.validate(index.codec.n_centroids), Error);

    SearchParams bad_probe;
    bad_probe.nprobe = static_cast<uint32_t>(index.codec.n_centroids) + 1;
    CHECK_THROWS_AS(bad_probe.validate(index.codec.n_centroids), Error);

    // dimension mismatch at the batch surface
    const auto queries = test_helpers::random_set(8, 1, 1, 0);
    SearchParams ok;
    ok.nprobe = 1;
    CHECK_THROWS_AS(searcher.search_batch(queries, ok), Error);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "lire/index.hpp"
#include "lire/synth.hpp"

#include "helpers.hpp"

using namespace lire;
using test_helpers::make_set;
using test_helpers::read_file_bytes;
using test_helpers::TmpDir;
using test_helpers::unit_vector;

namespace {

bool index_equal(const CompressedIndex& a, const CompressedIndex& b) {
    return a.codec.centroids == b.codec.centroids && a.codec.cutoffs == b.codec.cutoffs &&
           a.codec.weights == b.codec.weights && a.n_passages == b.n_passages &&
           a.n_embeddings == b.n_embeddings && a.passage_ids == b.passage_ids &&
           a.doclens == b.doclens && a.offsets == b.offsets && a.codes == b.codes &&
           a.residuals == b.residuals;
}

EmbeddingSet four_separated_passages() {
    return make_set(4, {{0, {unit_vector({1, 0, 0, 0})}},
                        {1, {unit_vector({0, 1, 0, 0})}},
                        {2, {unit_vector({0, 0, 1, 0})}},
                        {3, {unit_vector({0, 0, 0, 1})}}});
}

}  // namespace

TEST_CASE("four well-separated single-vector passages invert into a partition") {
    BuildParams params;
    params.bits = 1;
    params.seed = 0;
    const auto [index, ivf] = build_index(four_separated_passages(), params);

    CHECK(index.n_embeddings == 4);
    // brute-force partition check: concatenated postings = {0,1,2,3} once each
    std::vector<char> seen(4, 0);
    for (uint64_t c = 0; c < index.codec.n_centroids; ++c) {
        for (const uint32_t* it = ivf.list_begin(c); it != ivf.list_end(c); ++it) {
            CHECK(!seen[*it]);
            seen[*it] = 1;
            CHECK(index.codes[*it] == c);
        }
    }
    for (int e = 0; e < 4; ++e) CHECK(seen[e]);
}

TEST_CASE("single passage single vector clamps to one centroid") {
    const auto set = make_set(4, {{7, {unit_vector({1, 2, 2, 0})}}});
    BuildParams params;  // bits=2 needs at least 4 residual components, dim=4 provides them
    const auto [index, ivf] = build_index(set, params);
    CHECK(index.codec.n_centroids == 1);
    REQUIRE(ivf.postings.size() == 1);
    CHECK(ivf.postings[0] == 0);
    CHECK(ivf.list_offsets == std::vector<uint64_t>{0, 1});
}

TEST_CASE("chunk size does not change the built index") {
    const auto set = test_helpers::random_set(8, 23, 5, 99);
    BuildParams a;
    a.chunk_size = 1;
    BuildParams b;
    b.chunk_size = 7;
    BuildParams c;
    c.chunk_size = 1024;
    const auto [ia, va] = build_index(set, a);
    const auto [ib, vb] = build_index(set, b);
    const auto [ic, vc] = build_index(set, c);
    CHECK(index_equal(ia, ib));
    CHECK(index_equal(ia, ic));
    CHECK(va.postings == vb.postings);
    CHECK(va.list_offsets == vc.list_offsets);
}

TEST_CASE("same seed same index, different seed different sample") {
    const auto set = test_helpers::random_set(8, 64, 4, 5);
    BuildParams a;
    a.seed = 1;
    BuildParams b;
    b.seed = 1;
    BuildParams c;
    c.seed = 2;
    const auto [ia, va] = build_index(set, a);
    const auto [ib, vb] = build_index(set, b);
    const auto [ic, vc] = build_index(set, c);
    CHECK(index_equal(ia, ib));
    CHECK(ia.codec.centroids != ic.codec.centroids);
}

TEST_CASE("inversion correctness on a synthetic corpus") {
    const SynthParams sp{SynthProfile::clustered, 40, 6, 16, 12, 0.1, 3, 4, 2};
    const SynthData data = synth(sp);
    BuildParams params;
    params.bits = 2;
    const auto [index, ivf] = build_index(data.corpus, params);

    // e in postings(c) <=> codes[e] == c
    for (uint64_t c = 0; c < index.codec.n_centroids; ++c) {
        uint64_t count = 0;
        for (uint64_t e = 0; e < index.n_embeddings; ++e) {
            if (index.codes[e] == c) count++;
        }
        CHECK(count == ivf.list_offsets[c + 1] - ivf.list_offsets[c]);
        const uint32_t* prev = nullptr;
        for (const uint32_t* it = ivf.list_begin(c); it != ivf.list_end(c); ++it) {
            CHECK(index.codes[*it] == c);
            if (prev) CHECK(*prev < *it);
            prev = it;
        }
    }
}

TEST_CASE("save/load round-trips every field") {
    const auto set = test_helpers::random_set(12, 30, 3, 7);
    BuildParams params;
    params.bits = 1;
    params.seed = 9;
    const auto [index, ivf] = build_index(set, params);

    TmpDir tmp("idx_rt");
    save_index(index, ivf, tmp.file("idx"));
    const auto [back, back_ivf] = load_index(tmp.file("idx"));
    CHECK(index_equal(index, back));
    CHECK(back.seed == 9);
    CHECK(back_ivf.list_offsets == ivf.list_offsets);
    CHECK(back_ivf.postings == ivf.postings);
}

TEST_CASE("load rejects a truncated residuals file naming it") {
    const auto set = test_helpers::random_set(6, 10, 2, 1);
    BuildParams params;
    const auto [index, ivf] = build_index(set, params);
    TmpDir tmp("idx_trunc");
    const std::string dir = tmp.file("idx");
    save_index(index, ivf, dir);

    const std::string res = dir + "/residuals.bin";
    auto bytes = read_file_bytes(res);
    bytes.pop_back();
    std::ofstream(res, std::ios::binary | std::ios::trunc)
        .write(reinterpret_cast<const char*>(bytes.data()), bytes.size());

    try {
        load_index(dir);
        FAIL("expected malformed_index");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::malformed_index);
        CHECK(std::string(e.what()).find("residuals.bin") != std::string::npos);
    }
}

TEST_CASE("load rejects a missing ivf file") {
    const auto set = test_helpers::random_set(6, 10, 2, 1);
    BuildParams params;
    const auto [index, ivf] = build_index(set, params);
    TmpDir tmp("idx_missing");
    const std::string dir = tmp.file("idx");
    save_index(index, ivf, dir);
    std::filesystem::remove(dir + "/ivf.bin");

    try {
        load_index(dir);
        FAIL("expected malformed_index");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::malformed_index);
        CHECK(std::string(e.what()).find("ivf.bin") != std::string::npos);
    }
}

TEST_CASE("index stats report the paper byte budgets") {
    // d=128, b=2 -> 36 bytes core, 7.11x vs the 256-byte fp16 baseline
    const auto set128 = test_helpers::random_set(128, 12, 4, 2);
    BuildParams b2;
    b2.bits = 2;
    const auto [i2, v2] = build_index(set128, b2);
    const IndexStats s2 = index_stats(i2, v2);
    CHECK(s2.bytes_per_vector_core == 36.0);
    CHECK(s2.ratio_core == doctest::Approx(256.0 / 36.0));
    CHECK(s2.ratio_core == doctest::Approx(7.11).epsilon(1e-3));
    CHECK(s2.bytes_codes == i2.n_embeddings * 4);
    CHECK(s2.bytes_residuals == i2.n_embeddings * 32);

    BuildParams b1;
    b1.bits = 1;
    const auto [i1, v1] = build_index(set128, b1);
    const IndexStats s1 = index_stats(i1, v1);
    CHECK(s1.bytes_per_vector_core == 20.0);
    CHECK(s1.ratio_core == doctest::Approx(12.8));

    // d=2, b=1 -> 4 + 1 = 5 bytes
    const auto set2 = test_helpers::random_set(2, 9, 3, 2);
    const auto [i3, v3] = build_index(set2, b1);
    CHECK(index_stats(i3, v3).bytes_per_vector_core == 5.0);
}

TEST_CASE("build validates inputs") {
    EmbeddingSet empty;
    empty.dim = 4;
    BuildParams params;
    CHECK_THROWS_AS(build_index(empty, params), Error);

    const auto set = test_helpers::random_set(4, 4, 2, 0);
    BuildParams bad_bits;
    bad_bits.bits = 3;
    CHECK_THROWS_AS(build_index(set, bad_bits), Error);
}

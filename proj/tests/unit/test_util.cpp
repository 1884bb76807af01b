#include <doctest.h>

#include <cmath>

#include "lire/binary.hpp"
#include "lire/half.hpp"
#include "lire/rng.hpp"

#include "helpers.hpp"

using namespace lire;

TEST_CASE("rng determinism and bounds") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) {
        const uint64_t n = 1 + (i % 97);
        const uint64_t x = a.below(n);
        CHECK(x == b.below(n));
        CHECK(x < n);
    }
    Rng c(43);
    bool differs = false;
    Rng a2(42);
    for (int i = 0; i < 16; ++i) differs |= a2.next_u64() != c.next_u64();
    CHECK(differs);
}

TEST_CASE("rng uniform in [0,1) and gaussian is roughly standard") {
    Rng rng(7);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double g = rng.gaussian();
        sum += g;
        sum_sq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sum_sq / n - 1.0) < 0.05);
}

TEST_CASE("sample_without_replacement draws distinct covering indices") {
    Rng rng(5);
    const auto picks = rng.sample_without_replacement(50, 50);
    std::vector<char> seen(50, 0);
    for (const uint64_t p : picks) {
        CHECK(p < 50);
        CHECK(!seen[p]);
        seen[p] = 1;
    }
    const auto partial = Rng(5).sample_without_replacement(50, 7);
    CHECK(partial.size() == 7);
    // same seed, same prefix
    for (size_t i = 0; i < 7; ++i) CHECK(partial[i] == picks[i]);
}

TEST_CASE("half round-trips representable values and rounds to nearest even") {
    // exactly representable in binary16
    for (const float v : {0.0f, 1.0f, -1.0f, 0.5f, 0.09997558593750f, 65504.0f}) {
        CHECK(half_to_float(float_to_half(v)) == doctest::Approx(v).epsilon(1e-3));
    }
    CHECK(half_to_float(float_to_half(1.0f)) == 1.0f);
    CHECK(half_to_float(float_to_half(-0.25f)) == -0.25f);
    // overflow goes to inf
    CHECK(std::isinf(half_to_float(float_to_half(1e6f))));
    // subnormal half survives
    const float tiny = half_to_float(0x0001);
    CHECK(tiny > 0.0f);
    CHECK(float_to_half(tiny) == 0x0001);
    // narrowing error is bounded by 2^-11 relative
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const float v = static_cast<float>(rng.uniform() * 2.0 - 1.0);
        const float back = half_to_float(float_to_half(v));
        CHECK(std::abs(back - v) <= std::abs(v) * 4.9e-4 + 6.0e-8);
    }
}

TEST_CASE("binary writer/reader round-trip with little-endian layout") {
    test_helpers::TmpDir tmp("binary");
    const std::string path = tmp.file("blob.bin");
    {
        BinaryWriter out(path);
        out.u8(0xAB);
        out.u32(0x01020304u);
        out.u64(0x1122334455667788ull);
        out.f32(1.5f);
        out.finish();
    }
    const auto bytes = test_helpers::read_file_bytes(path);
    REQUIRE(bytes.size() == 1 + 4 + 8 + 4);
    CHECK(bytes[0] == 0xAB);
    CHECK(bytes[1] == 0x04);  // least significant byte first
    CHECK(bytes[4] == 0x01);
    CHECK(bytes[5] == 0x88);
    {
        BinaryReader in(path);
        CHECK(in.u8() == 0xAB);
        CHECK(in.u32() == 0x01020304u);
        CHECK(in.u64() == 0x1122334455667788ull);
        CHECK(in.f32() == 1.5f);
        CHECK(in.at_eof());
    }
    {
        BinaryReader in(path);
        in.u64();
        in.u64();  // 16 of 17 bytes consumed
        CHECK_THROWS_WITH_AS(in.u64(), doctest::Contains("unexpected end of file"), Error);
    }
}

TEST_CASE("binary reader flags truncation with the file name") {
    test_helpers::TmpDir tmp("trunc");
    const std::string path = tmp.file("short.bin");
    {
        BinaryWriter out(path);
        out.u16(7);
        out.finish();
    }
    BinaryReader in(path);
    try {
        in.u64();
        FAIL("expected truncation error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::truncated_file);
        CHECK(std::string(e.what()).find("short.bin") != std::string::npos);
    }
}

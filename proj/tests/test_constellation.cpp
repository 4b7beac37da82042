#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <set>

#include "smperf/constellation.hpp"

using namespace smperf;
using Catch::Matchers::WithinAbs;

TEST_CASE("alphabets have unit average energy and distinct points", "[constellation]")
{
    for (const auto& name : constellation_names()) {
        const auto c = build_constellation(name);
        INFO(name);
        CHECK_THAT(c.average_energy(), WithinAbs(1.0, 1e-12));
        CHECK(std::has_single_bit(c.size()));
        CHECK(c.size() == (std::size_t{1} << c.bits_per_symbol));
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j)
                CHECK(std::abs(c.symbols[i] - c.symbols[j]) > 1e-3);
    }
    CHECK(ssk_constellation().size() == 1);
    CHECK(ssk_constellation().bits_per_symbol == 0);
}

TEST_CASE("documented symbol order", "[constellation]")
{
    const auto bpsk = build_constellation("bpsk");
    CHECK(bpsk.symbols[0] == Complex(1.0, 0.0));
    CHECK(bpsk.symbols[1] == Complex(-1.0, 0.0));

    const auto qpsk = build_constellation("qpsk");
    const double a = 1.0 / std::sqrt(2.0);
    const Complex expected[4] = {{a, a}, {a, -a}, {-a, a}, {-a, -a}};
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(qpsk.symbols[k] - expected[k]) < 1e-15);

    // 16-QAM levels {±1, ±3}/sqrt(10); grid energy enumerated by hand: 10.
    const auto qam16 = build_constellation("qam16");
    const double s = 1.0 / std::sqrt(10.0);
    CHECK(std::abs(qam16.symbols[0] - Complex(-3 * s, -3 * s)) < 1e-15);
    CHECK(std::abs(qam16.symbols[1] - Complex(-3 * s, -1 * s)) < 1e-15);
    CHECK(std::abs(qam16.symbols[4] - Complex(-1 * s, -3 * s)) < 1e-15);
    CHECK(std::abs(qam16.symbols[15] - Complex(3 * s, 3 * s)) < 1e-15);

    const auto qam8 = build_constellation("qam8");
    CHECK(std::abs(qam8.symbols[0] - Complex(-3.0, -1.0) / std::sqrt(6.0)) < 1e-15);
    const auto qam32 = build_constellation("qam32");
    CHECK(std::abs(qam32.symbols[31] - Complex(7.0, 3.0) / std::sqrt(26.0)) < 1e-15);

    try {
        build_constellation("psk8");
        FAIL("unknown alphabet accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unsupported_constellation);
    }
}

TEST_CASE("split_bits / merge_bits", "[constellation]")
{
    const auto dims = make_dimensions(4, 2);
    REQUIRE(dims.rate() == 3);
    CHECK(split_bits(BitVector{0, 0, 0}, dims) == AntennaSymbol{0, 0});
    CHECK(split_bits(BitVector{1, 0, 1}, dims) == AntennaSymbol{2, 1});

    try {
        split_bits(BitVector{1, 0}, dims);
        FAIL("short frame accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::framing);
    }

    SECTION("exhaustive round trip up to R = 7")
    {
        for (unsigned n_t : {1u, 2u, 4u, 8u})
            for (std::size_t m : {1u, 2u, 4u, 8u, 16u}) {
                const auto d = make_dimensions(n_t, m);
                if (d.rate() > 7)
                    continue;
                std::set<std::pair<std::size_t, std::size_t>> images;
                for (std::uint64_t label = 0; label < d.labels(); ++label) {
                    BitVector bits(d.rate());
                    for (unsigned i = 0; i < d.rate(); ++i)
                        bits[i] = static_cast<std::uint8_t>((label >> (d.rate() - 1 - i)) & 1u);
                    const auto as = split_bits(bits, d);
                    REQUIRE(merge_bits(as, d) == bits);
                    images.insert({as.antenna, as.symbol});
                }
                CHECK(images.size() == d.labels());
            }
    }
}

TEST_CASE("hamming_label_distance", "[constellation]")
{
    const auto dims = make_dimensions(4, 2);
    CHECK(hamming_label_distance(2, 1, 2, 1, dims) == 0);
    CHECK(hamming_label_distance(0, 0, 1, 1, dims) == 2); // 000 vs 011
    CHECK_THROWS_AS(hamming_label_distance(4, 0, 0, 0, dims), Error);

    SECTION("total over all ordered pairs matches XOR popcount brute force")
    {
        std::uint64_t total = 0;
        std::uint64_t brute = 0;
        for (std::size_t u = 0; u < 4; ++u)
            for (std::size_t v = 0; v < 2; ++v)
                for (std::size_t uh = 0; uh < 4; ++uh)
                    for (std::size_t vh = 0; vh < 2; ++vh)
                        total += hamming_label_distance(u, v, uh, vh, dims);
        for (unsigned a = 0; a < 8; ++a)
            for (unsigned b = 0; b < 8; ++b)
                brute += static_cast<unsigned>(std::popcount(a ^ b));
        CHECK(total == brute);
        CHECK(total == 8 * 3 * 4); // 2^R · R · 2^(R-1)
    }

    SECTION("metric axioms, R <= 7")
    {
        const auto d = make_dimensions(8, 16);
        const auto n = d.labels();
        auto dist = [&](std::uint64_t a, std::uint64_t b) {
            const auto x = split_label(a, d);
            const auto y = split_label(b, d);
            return hamming_label_distance(x.antenna, x.symbol, y.antenna, y.symbol, d);
        };
        for (std::uint64_t a = 0; a < n; ++a)
            for (std::uint64_t b = 0; b < n; ++b) {
                const auto ab = dist(a, b);
                REQUIRE(ab == dist(b, a));
                REQUIRE((ab == 0) == (a == b));
                for (std::uint64_t c = 0; c < n; c += 7)
                    REQUIRE(ab <= dist(a, c) + dist(c, b));
            }
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "wpuf/bitio.hpp"
#include "wpuf/ctw.hpp"
#include "wpuf/rng.hpp"

using namespace wpuf;

namespace {
BitVec random_seq(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    BitVec v(n);
    for (std::size_t i = 0; i < n; ++i) v.set(i, rng.coin());
    return v;
}

BitVec text_bits(const std::string& text) {
    BitVec v(text.size() * 8);
    for (std::size_t i = 0; i < text.size(); ++i)
        for (int b = 0; b < 8; ++b)
            v.set(i * 8 + static_cast<std::size_t>(b),
                  (static_cast<unsigned char>(text[i]) >> (7 - b)) & 1);
    return v;
}
}  // namespace

TEST_CASE("an all-zero stream compresses to almost nothing") {
    REQUIRE(ctw_rate(BitVec(200000), 8) < 0.01);
}

TEST_CASE("uniform bits are incompressible up to the estimator redundancy") {
    const auto rate = ctw_rate(random_seq(200000, 5), 8);
    REQUIRE(rate == Catch::Approx(8.0).margin(0.02));
    REQUIRE(rate <= 8.05);
}

TEST_CASE("repetitive ascii text sits strictly between") {
    std::string text;
    while (text.size() < 20000)
        text += "the quick brown fox jumps over the lazy dog and keeps running. ";
    const double zeros = ctw_rate(BitVec(text.size() * 8), 8);
    const double english = ctw_rate(text_bits(text), 8);
    const double uniform = ctw_rate(random_seq(text.size() * 8, 7), 8);
    REQUIRE(zeros < english);
    REQUIRE(english < 3.0);
    REQUIRE(english < uniform);
}

TEST_CASE("rate never exceeds the byte width plus estimator slack") {
    for (std::uint64_t seed : {1ull, 2ull}) {
        REQUIRE(ctw_rate(random_seq(5000, seed), 4) <= 8.05);
    }
    // period-2 stream: deeply predictable
    BitVec alt(5000);
    for (std::size_t i = 1; i < alt.size(); i += 2) alt.set(i, true);
    REQUIRE(ctw_rate(alt, 4) < 0.1);
}

TEST_CASE("depth and length validation") {
    REQUIRE_THROWS_AS(ctw_rate(BitVec(10), 8), std::invalid_argument);
    REQUIRE_THROWS_AS(ctw_rate(BitVec(1000), 0), std::invalid_argument);
    REQUIRE_THROWS_AS(ctw_rate(BitVec(1000), 21), std::invalid_argument);
}

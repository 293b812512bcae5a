#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "wpuf/fuzzy.hpp"
#include "wpuf/rng.hpp"

using namespace wpuf;

namespace {
BitVec random_bits(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    BitVec v(n);
    for (std::size_t i = 0; i < n; ++i) v.set(i, rng.coin());
    return v;
}
}  // namespace

TEST_CASE("reproduction is exact without noise") {
    BchCode code(4, 2);
    const auto z = random_bits(15, 101);
    const auto helper = fe_gen(z, code, 7);
    const auto back = fe_rep(z, helper, code);
    REQUIRE(back.has_value());
    REQUIRE(*back == z);
}

TEST_CASE("reproduction succeeds for every pattern within the radius") {
    BchCode code(4, 2);
    for (std::size_t key_bits : {std::size_t{15}, std::size_t{30}}) {
        const auto z = random_bits(key_bits, 103 + key_bits);
        const auto helper = fe_gen(z, code, 11);
        REQUIRE(helper.block_count == key_bits / 15);
        for (std::size_t block = 0; block < helper.block_count; ++block) {
            for (int i = 0; i < 15; ++i) {
                for (int j = i; j < 15; ++j) {
                    BitVec noisy = z;
                    noisy.flip(block * 15 + static_cast<std::size_t>(i));
                    if (j != i) noisy.flip(block * 15 + static_cast<std::size_t>(j));
                    const auto back = fe_rep(noisy, helper, code);
                    REQUIRE(back.has_value());
                    REQUIRE(*back == z);
                }
            }
        }
    }
}

TEST_CASE("fresh enrollment randomness gives fresh helpers") {
    BchCode code(4, 2);
    const auto z = random_bits(15, 107);
    REQUIRE(fe_gen(z, code, 1).helpers[0] != fe_gen(z, code, 2).helpers[0]);
}

TEST_CASE("beyond-radius noise is never silently accepted") {
    BchCode code(4, 2);
    const auto z = random_bits(15, 109);
    const auto helper = fe_gen(z, code, 13);
    for (int a = 0; a < 15; ++a)
        for (int b = a + 1; b < 15; ++b)
            for (int c = b + 1; c < 15; ++c) {
                BitVec noisy = z;
                noisy.flip(static_cast<std::size_t>(a));
                noisy.flip(static_cast<std::size_t>(b));
                noisy.flip(static_cast<std::size_t>(c));
                const auto back = fe_rep(noisy, helper, code);
                if (back) REQUIRE(*back != z);
            }
}

TEST_CASE("helper alone leaves every codeword offset equally consistent") {
    // with K = n there is no padding: each of the 2^k codewords c yields a
    // candidate secret h ^ c, and the true one is indistinguishable among them
    BchCode code(4, 2);
    const auto z = random_bits(15, 113);
    const auto helper = fe_gen(z, code, 17);
    std::set<std::string> candidates;
    bool true_z_present = false;
    for (std::uint32_t w = 0; w < (1u << 7); ++w) {
        BitVec msg(7);
        for (int i = 0; i < 7; ++i) msg.set(static_cast<std::size_t>(i), (w >> i) & 1);
        const BitVec candidate = helper.helpers[0] ^ code.encode(msg);
        candidates.insert(candidate.to_string());
        if (candidate == z) true_z_present = true;
    }
    REQUIRE(candidates.size() == 128);
    REQUIRE(true_z_present);
}

TEST_CASE("padded final block round-trips and stays within bounds") {
    BchCode code(4, 1);  // n = 15, k = 11
    const auto z = random_bits(40, 127);  // 3 blocks, 5 pad bits
    const auto helper = fe_gen(z, code, 19);
    REQUIRE(helper.block_count == 3);
    REQUIRE(helper.pad_bits == 5);
    BitVec noisy = z;
    noisy.flip(0);
    noisy.flip(16);
    noisy.flip(39);
    const auto back = fe_rep(noisy, helper, code);
    REQUIRE(back.has_value());
    REQUIRE(*back == z);
}

TEST_CASE("helper serialization round-trips") {
    BchCode code(4, 2);
    const auto z = random_bits(30, 131);
    const auto helper = fe_gen(z, code, 23);
    const auto restored = HelperData::from_json(helper.to_json());
    REQUIRE(restored.m == helper.m);
    REQUIRE(restored.t == helper.t);
    REQUIRE(restored.key_bits == helper.key_bits);
    REQUIRE(restored.pad_bits == helper.pad_bits);
    REQUIRE(restored.helpers.size() == helper.helpers.size());
    for (std::size_t i = 0; i < helper.helpers.size(); ++i)
        REQUIRE(restored.helpers[i] == helper.helpers[i]);
    const auto back = fe_rep(z, restored, code);
    REQUIRE(back.has_value());
    REQUIRE(*back == z);
}

TEST_CASE("code mismatch against helper metadata is rejected") {
    BchCode code(4, 2), other(4, 1);
    const auto z = random_bits(15, 137);
    const auto helper = fe_gen(z, code, 29);
    REQUIRE_THROWS_AS(fe_rep(z, helper, other), std::invalid_argument);
}

TEST_CASE("redundancy accounting: one codeword per k payload bits") {
    BchCode code(4, 2);  // (15, 7)
    REQUIRE(redundancy_bits(code, 14) == 16);  // 2 blocks x 8 parity bits
    REQUIRE(redundancy_bits(code, 7) == 8);
    BchCode none(4, 0);
    REQUIRE(redundancy_bits(none, 14) == 0);
    // nondecreasing in t at fixed m
    std::size_t prev = 0;
    for (int t = 0; t <= 12; ++t) {
        BchCode c(8, t);
        const auto r = redundancy_bits(c, 256);
        REQUIRE(r >= prev);
        prev = r;
    }
}

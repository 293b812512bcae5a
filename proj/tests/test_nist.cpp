#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "wpuf/bitio.hpp"
#include "wpuf/nist.hpp"
#include "wpuf/rng.hpp"

using namespace wpuf;

namespace {

// Binary expansion of pi: the classic worked-example input. Expected p-values
// below were computed independently with scipy implementations of the
// SP800-22 formulas (several coincide with the published worked examples).
const char* kPi100 =
    "1100100100001111110110101010001000100001011010001100001000110100"
    "110001001100011001100010100010111000";
const char* kPi128 =
    "1100100100001111110110101010001000100001011010001100001000110100"
    "1100010011000110011000101000101110000000110111000001110011010001";

BitVec pi100() { return BitVec::from_string(kPi100); }
BitVec pi128() { return BitVec::from_string(kPi128); }

BitVec constant_seq(std::size_t n, bool value) {
    BitVec v(n);
    if (value)
        for (std::size_t i = 0; i < n; ++i) v.set(i, true);
    return v;
}

BitVec alternating(std::size_t n) {
    BitVec v(n);
    for (std::size_t i = 1; i < n; i += 2) v.set(i, true);
    return v;
}

BitVec random_seq(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    BitVec v(n);
    for (std::size_t i = 0; i < n; ++i) v.set(i, rng.coin());
    return v;
}

}  // namespace

TEST_CASE("monobit matches the worked example and the closed forms") {
    REQUIRE(nist_monobit(pi100()) == Catch::Approx(0.109599).margin(5e-6));
    REQUIRE(nist_monobit(alternating(100)) == 1.0);
    REQUIRE(nist_monobit(constant_seq(100, false)) < 1e-20);
}

TEST_CASE("block frequency matches the worked example") {
    REQUIRE(nist_block_frequency(pi100(), 10) == Catch::Approx(0.706438).margin(5e-6));
}

TEST_CASE("runs matches the worked example and rejects period-2 input") {
    REQUIRE(nist_runs(pi100()) == Catch::Approx(0.500798).margin(5e-6));
    REQUIRE(nist_runs(alternating(1000)) < 1e-6);
    REQUIRE(nist_runs(constant_seq(1000, true)) == 0.0);  // prerequisite fails
}

TEST_CASE("cumulative sums matches the worked example, both directions") {
    const auto [fwd, bwd] = nist_cumulative_sums(pi100());
    REQUIRE(fwd == Catch::Approx(0.219194).margin(5e-6));
    REQUIRE(bwd == Catch::Approx(0.114866).margin(5e-6));
}

TEST_CASE("spectral test on the pi expansion") {
    REQUIRE(nist_dft(pi100()) == Catch::Approx(0.646355).margin(5e-6));
}

TEST_CASE("serial test on the pi expansion") {
    const auto [p1, p2] = nist_serial(pi100(), 3);
    REQUIRE(p1 == Catch::Approx(0.308441).margin(5e-6));
    REQUIRE(p2 == Catch::Approx(0.353455).margin(5e-6));
    const auto [z1, z2] = nist_serial(alternating(4096), 3);
    REQUIRE(z1 < 1e-6);
    (void)z2;
}

TEST_CASE("approximate entropy on the pi expansion") {
    REQUIRE(nist_approximate_entropy(pi100(), 2) == Catch::Approx(0.235301).margin(5e-6));
}

TEST_CASE("longest run of ones on 128 bits of pi") {
    REQUIRE(nist_longest_run(pi128()) == Catch::Approx(0.167646).margin(5e-6));
    REQUIRE_THROWS_AS(nist_longest_run(pi100()), std::invalid_argument);
}

TEST_CASE("matrix rank on 100k bits of pi") {
    const auto seqs = import_ascii(std::string(WPUF_TEST_DATA_DIR) + "/pi_bits_100k.txt");
    REQUIRE(seqs.size() == 1);
    REQUIRE(seqs[0].size() == 100000);
    REQUIRE(nist_binary_matrix_rank(seqs[0]) == Catch::Approx(0.625997).margin(5e-6));
    REQUIRE_THROWS_AS(nist_binary_matrix_rank(pi100()), std::invalid_argument);
}

TEST_CASE("p-values stay in range on assorted inputs") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto s = random_seq(50000, seed);
        for (double p : {nist_monobit(s), nist_block_frequency(s), nist_runs(s),
                         nist_longest_run(s), nist_dft(s), nist_serial(s, 8).first,
                         nist_approximate_entropy(s, 6), nist_binary_matrix_rank(s)}) {
            REQUIRE(p >= 0.0);
            REQUIRE(p <= 1.0);
        }
    }
}

TEST_CASE("battery passes a seeded uniform generator") {
    std::vector<BitVec> seqs;
    for (std::uint64_t i = 0; i < 60; ++i) seqs.push_back(random_seq(40960, 1000 + i));
    BatteryParams params;
    params.serial_m = 8;
    params.approximate_entropy_m = 6;
    const auto report = battery(seqs, params);
    for (const auto& t : report.tests) {
        INFO(t.name);
        REQUIRE(t.proportion >= 0.95);
    }
    REQUIRE(report.all_pass);
}

TEST_CASE("battery flunks copies of a constant sequence") {
    std::vector<BitVec> seqs(100, constant_seq(40960, false));
    BatteryParams params;
    params.serial_m = 8;
    params.approximate_entropy_m = 6;
    const auto report = battery(seqs, params);
    REQUIRE(report.tests[0].name == "monobit");
    REQUIRE(report.tests[0].proportion == 0.0);
    REQUIRE_FALSE(report.all_pass);
}

TEST_CASE("battery enforces the sequence-count floor unless waived") {
    std::vector<BitVec> seqs(5, random_seq(40960, 9));
    REQUIRE_THROWS_AS(battery(seqs), std::invalid_argument);
    BatteryParams params;
    params.serial_m = 8;
    params.approximate_entropy_m = 6;
    params.allow_small_battery = true;
    REQUIRE_NOTHROW(battery(seqs, params));
}

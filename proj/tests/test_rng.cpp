#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "wpuf/rng.hpp"

using namespace wpuf;

TEST_CASE("rng streams are deterministic") {
    Rng a(42), b(42);
    for (int i = 0; i < 1000; ++i) REQUIRE(a.next() == b.next());
}

TEST_CASE("stream keys separate labels and indices") {
    std::set<std::uint64_t> keys;
    keys.insert(stream_key(1, "alpha"));
    keys.insert(stream_key(1, "beta"));
    keys.insert(stream_key(2, "alpha"));
    keys.insert(stream_key(1, "alpha", 0));
    keys.insert(stream_key(1, "alpha", 1));
    keys.insert(stream_key(1, "alpha", 0, 0));
    keys.insert(stream_key(1, "alpha", 0, 1));
    keys.insert(stream_key(1, "alpha", 1, 0));
    REQUIRE(keys.size() == 8);
}

TEST_CASE("uniform covers [0,1) with the right moments") {
    Rng rng(7);
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        sq += u * u;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    REQUIRE(mean == Catch::Approx(0.5).margin(0.005));
    REQUIRE(var == Catch::Approx(1.0 / 12.0).margin(0.005));
}

TEST_CASE("normal samples have standard moments") {
    Rng rng(11);
    const int n = 200000;
    double sum = 0, sq = 0, cube = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sq += x * x;
        cube += x * x * x;
    }
    REQUIRE(sum / n == Catch::Approx(0.0).margin(0.01));
    REQUIRE(sq / n == Catch::Approx(1.0).margin(0.02));
    REQUIRE(cube / n == Catch::Approx(0.0).margin(0.05));
}

TEST_CASE("below is unbiased at small bounds") {
    Rng rng(3);
    int counts[5] = {0};
    const int n = 100000;
    for (int i = 0; i < n; ++i) ++counts[rng.below(5)];
    for (int c : counts) REQUIRE(std::abs(c - n / 5) < 800);
}

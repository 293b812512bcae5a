#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "wpuf/hashing.hpp"
#include "wpuf/rng.hpp"

using namespace wpuf;

namespace {
SpeckleImage random_image(int w, int h, std::uint64_t seed) {
    SpeckleImage img(w, h);
    Rng rng(seed);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.below(256));
    return img;
}
}  // namespace

TEST_CASE("normalize guards constant images and hits exact moments") {
    SpeckleImage flat(16, 16);
    std::fill(flat.data.begin(), flat.data.end(), 17);
    const auto v = normalize(flat);
    REQUIRE(std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));

    const auto img = random_image(64, 64, 3);
    const auto n = normalize(img);
    double mean = 0, var = 0;
    for (double x : n) mean += x;
    mean /= static_cast<double>(n.size());
    for (double x : n) var += (x - mean) * (x - mean);
    var /= static_cast<double>(n.size());
    REQUIRE(std::abs(mean) < 1e-9);
    REQUIRE(std::abs(var - 1.0) < 1e-9);
}

TEST_CASE("normalize is invariant to pre-saturation scaling") {
    SpeckleImage img(32, 32);
    Rng rng(5);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.below(120));  // headroom for x2
    SpeckleImage doubled = img;
    for (auto& v : doubled.data) v = static_cast<std::uint8_t>(v * 2);
    const auto a = normalize(img);
    const auto b = normalize(doubled);
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == Catch::Approx(b[i]).margin(1e-12));
}

TEST_CASE("theta mask is reproducible and standard normal") {
    ThetaMatrix t1(99, 128, 128), t2(99, 128, 128);
    REQUIRE(t1.values() == t2.values());
    double mean = 0, var = 0;
    for (double x : t1.values()) mean += x;
    mean /= static_cast<double>(t1.values().size());
    for (double x : t1.values()) var += (x - mean) * (x - mean);
    var /= static_cast<double>(t1.values().size());
    REQUIRE(std::abs(mean) < 0.01);
    REQUIRE(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("apply_theta is the elementwise product") {
    ThetaMatrix theta(1, 2, 1);
    std::vector<double> v{1.0, -1.0};
    const auto w = apply_theta(v, theta);
    REQUIRE(w[0] == v[0] * theta.values()[0]);
    REQUIRE(w[1] == v[1] * theta.values()[1]);
    REQUIRE_THROWS_AS(apply_theta(std::vector<double>{1.0}, theta), std::invalid_argument);
    // zero vector stays zero under any mask
    const auto z = apply_theta(std::vector<double>{0.0, 0.0}, theta);
    REQUIRE(z == std::vector<double>{0.0, 0.0});
}

TEST_CASE("quantize thresholds strictly above the mean") {
    REQUIRE(quantize(std::vector<double>{1, 2, 3, 4}).to_string() == "0011");
    REQUIRE(quantize(std::vector<double>{5, -5}).to_string() == "10");
    REQUIRE(quantize(std::vector<double>{2, 2, 2, 2}).to_string() == "0000");  // tie rule
}

TEST_CASE("hash_image is deterministic") {
    const auto img = random_image(64, 64, 7);
    ThetaMatrix theta(11, 64, 64);
    const auto sel = seeded_selection(13, 64, 64, 128);
    REQUIRE(hash_image(img, theta, sel) == hash_image(img, theta, sel));
}

TEST_CASE("seeded selections are reproducible, distinct and in bounds") {
    const auto s1 = seeded_selection(17, 1280, 960, 256);
    const auto s2 = seeded_selection(17, 1280, 960, 256);
    REQUIRE(s1.coords == s2.coords);
    std::set<std::uint32_t> uniq(s1.coords.begin(), s1.coords.end());
    REQUIRE(uniq.size() == 256);
    for (auto c : s1.coords) REQUIRE(c < 1280u * 960u);
}

TEST_CASE("selection with K = X*Y covers every pixel once") {
    const auto sel = seeded_selection(19, 16, 16, 256);
    std::set<std::uint32_t> uniq(sel.coords.begin(), sel.coords.end());
    REQUIRE(uniq.size() == 256);
}

TEST_CASE("independent seeded selections barely overlap at full scale") {
    // expected overlap K^2/(X*Y) ~ 0.05 pixels
    const auto a = seeded_selection(23, 1280, 960, 256);
    const auto b = seeded_selection(29, 1280, 960, 256);
    std::set<std::uint32_t> sa(a.coords.begin(), a.coords.end());
    std::size_t overlap = 0;
    for (auto c : b.coords)
        if (sa.count(c)) ++overlap;
    REQUIRE(overlap <= 3);
}

TEST_CASE("oversized K is rejected") {
    REQUIRE_THROWS_AS(seeded_selection(1, 4, 4, 17), std::invalid_argument);
    BchCode code(4, 2);
    REQUIRE_THROWS_AS(mdc_selection(SlmChallenge(7), code, 4, 4, 17), std::invalid_argument);
}

TEST_CASE("mdc selection golden trace on a 4x4 image") {
    // c = 0000001 encodes to 000000111010001 under BCH(15,7); cutting the
    // repeating codeword stream into 4-bit chunks mod 16 gives 0,3,10,2
    BchCode code(4, 2);
    SlmChallenge c(7);
    c.bits.set(6, true);
    const auto sel = mdc_selection(c, code, 4, 4, 4);
    REQUIRE(sel.coords == std::vector<std::uint32_t>{0, 3, 10, 2});
    REQUIRE(mdc_selection(c, code, 4, 4, 4).coords == sel.coords);
}

TEST_CASE("mdc selections for near-identical challenges diverge") {
    BchCode code(8, 3);
    Rng rng(31);
    double max_overlap = 0;
    for (int trial = 0; trial < 100; ++trial) {
        SlmChallenge a = SlmChallenge::random(81, rng);
        SlmChallenge b = a;
        b.bits.flip(rng.below(81));
        const auto sa = mdc_selection(a, code, 1280, 960, 256);
        const auto sb = mdc_selection(b, code, 1280, 960, 256);
        std::set<std::uint32_t> seen(sa.coords.begin(), sa.coords.end());
        std::size_t overlap = 0;
        for (auto cc : sb.coords)
            if (seen.count(cc)) ++overlap;
        max_overlap = std::max(max_overlap, static_cast<double>(overlap));
    }
    REQUIRE(max_overlap <= 0.05 * 256);
}

TEST_CASE("mdc extraction windows are distinct within and fresh across") {
    BchCode code(8, 3);
    SlmChallenge c = SlmChallenge::from_pixels(81, {3, 14, 15, 62});
    // same-challenge windows: each K-distinct, consecutive windows differ
    MdcIndexStream s2(c, code, 256, 256);
    const auto w0 = s2.next_selection(256);
    const auto w1 = s2.next_selection(256);
    std::set<std::uint32_t> u0(w0.coords.begin(), w0.coords.end());
    REQUIRE(u0.size() == 256);
    REQUIRE(w0.coords != w1.coords);
    // and the first window equals the one-shot selection
    REQUIRE(mdc_selection(c, code, 256, 256, 256).coords == w0.coords);
}

TEST_CASE("two-factor challenge overhead accounting") {
    REQUIRE(selection_overhead_bits(256, 256, 256) == 4096);  // 256 coords x 16 bits
    REQUIRE(selection_overhead_bits(1280, 960, 256) == 256 * 21);
}

TEST_CASE("selection JSON lists row/col pairs") {
    const auto sel = seeded_selection(37, 8, 8, 4);
    const auto j = sel.to_json(8);
    REQUIRE(j.size() == 4);
    for (std::size_t i = 0; i < j.size(); ++i) {
        REQUIRE(j[i].size() == 2);
        REQUIRE(j[i][0].get<int>() * 8 + j[i][1].get<int>() == static_cast<int>(sel.coords[i]));
    }
}

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "wpuf/autocorr.hpp"
#include "wpuf/metrics.hpp"
#include "wpuf/speckle.hpp"

using namespace wpuf;

namespace {
PufConfig small_cfg(int dim = 64, int pixels = 16) {
    PufConfig cfg;
    cfg.width = dim;
    cfg.height = dim;
    cfg.slm_pixels = pixels;
    return cfg;
}
}  // namespace

TEST_CASE("identical seed and config give bit-identical fields") {
    PufInstance a(7, small_cfg()), b(7, small_cfg());
    for (int p : {0, 5, 15})
        for (int q : {0, 1}) REQUIRE(a.basis_field(p, q) == b.basis_field(p, q));
    const auto ca = SlmChallenge::all_on(16);
    REQUIRE(a.respond(ca, 0) == b.respond(ca, 0));
}

TEST_CASE("basis fields have unit mean power") {
    PufInstance puf(13, small_cfg());
    for (int p : {0, 7})
        for (int q : {0, 1}) {
            const auto f = puf.basis_field(p, q);
            double power = 0.0;
            for (const auto& c : f) power += std::norm(c);
            power /= static_cast<double>(f.size());
            REQUIRE(power == Catch::Approx(1.0).epsilon(1e-9));
        }
}

TEST_CASE("different seeds decorrelate hashed responses") {
    const auto cfg = small_cfg();
    PufInstance a(7, cfg), b(8, cfg);
    ThetaMatrix theta(3, cfg.width, cfg.height);
    const auto sel = seeded_selection(5, cfg.width, cfg.height, 256);
    Rng rng(21);
    double total = 0.0;
    const int rounds = 100;
    for (int i = 0; i < rounds; ++i) {
        const auto c = SlmChallenge::random(16, rng);
        if (c.bits.count_ones() == 0) continue;
        total += fractional_hamming(hash_image(a.respond(c, 1), theta, sel),
                                    hash_image(b.respond(c, 1), theta, sel));
    }
    REQUIRE(total / rounds == Catch::Approx(0.5).margin(0.05));
}

TEST_CASE("all-off challenge yields zero field and zero image") {
    PufInstance puf(3, small_cfg());
    const auto off = SlmChallenge::all_off(16);
    const auto [f0, f1] = puf.field(off);
    for (const auto& c : f0) REQUIRE(std::abs(c) == 0.0);
    for (const auto& c : f1) REQUIRE(std::abs(c) == 0.0);
    const auto img = puf.respond(off, 9);
    for (auto v : img.data) REQUIRE(v == 0);
}

TEST_CASE("field superposition is exactly linear on disjoint challenges") {
    PufInstance puf(17, small_cfg());
    const auto c1 = SlmChallenge::from_pixels(16, {0, 3, 8});
    const auto c2 = SlmChallenge::from_pixels(16, {1, 5, 12, 15});
    REQUIRE(c1.disjoint_with(c2));
    const auto [a0, a1] = puf.field(c1);
    const auto [b0, b1] = puf.field(c2);
    const auto [u0, u1] = puf.field(c1 | c2);
    for (std::size_t i = 0; i < u0.size(); ++i) {
        REQUIRE(u0[i] == a0[i] + b0[i]);
        REQUIRE(u1[i] == a1[i] + b1[i]);
    }
}

TEST_CASE("single-pixel challenge reproduces the stored basis field") {
    PufInstance puf(19, small_cfg());
    const auto [f0, f1] = puf.field(SlmChallenge::single(16, 4));
    REQUIRE(f0 == puf.basis_field(4, 0));
    REQUIRE(f1 == puf.basis_field(4, 1));
}

TEST_CASE("zero noise makes acquisitions independent of the noise seed") {
    PufInstance puf(23, small_cfg());
    const auto c = SlmChallenge::all_on(16);
    REQUIRE(puf.respond(c, 1) == puf.respond(c, 999));
}

TEST_CASE("unpolarized intensity statistics: coefficient of variation 1/sqrt(2)") {
    PufConfig cfg = small_cfg(128, 4);
    PufInstance puf(29, cfg);
    const auto raw = puf.intensity(SlmChallenge::all_on(4));
    double mean = 0, var = 0;
    for (double v : raw) mean += v;
    mean /= static_cast<double>(raw.size());
    for (double v : raw) var += (v - mean) * (v - mean);
    var /= static_cast<double>(raw.size());
    const double cv = std::sqrt(var) / mean;
    REQUIRE(cv == Catch::Approx(1.0 / std::numbers::sqrt2).margin(0.05));
}

TEST_CASE("grain lands on the configured autocorrelation width") {
    PufConfig cfg = small_cfg(128, 2);
    cfg.grain_target = 3.2;
    PufInstance puf(31, cfg);
    const auto raw = puf.intensity(SlmChallenge::single(2, 0));
    const double fwhm = profile_fwhm(autocorr_radial_profile(raw, cfg.width, cfg.height));
    REQUIRE(fwhm == Catch::Approx(3.2).margin(0.48));  // 15%

    PufConfig wide = cfg;
    wide.grain_target = 6.0;
    PufInstance puf2(31, wide);
    const auto raw2 = puf2.intensity(SlmChallenge::single(2, 0));
    const double fwhm2 = profile_fwhm(autocorr_radial_profile(raw2, wide.width, wide.height));
    REQUIRE(fwhm2 == Catch::Approx(6.0).margin(0.9));
}

TEST_CASE("union responses correlate with their parts, not across parts") {
    // the mechanism behind the long low-distance tail: I(c1) vs I(c1|c2)
    // correlates strongly, I(c1) vs I(c2) does not
    PufConfig cfg = small_cfg(64, 16);
    PufInstance puf(37, cfg);
    Rng rng(41);
    int wins = 0;
    const int rounds = 200;
    for (int round = 0; round < rounds; ++round) {
        SlmChallenge c1(16), c2(16);
        for (std::size_t p = 0; p < 16; ++p) {
            switch (rng.below(4)) {
                case 0: c1.bits.set(p, true); break;
                case 1: c2.bits.set(p, true); break;
                default: break;
            }
        }
        if (c1.bits.count_ones() == 0 || c2.bits.count_ones() == 0) continue;
        const auto i1 = puf.intensity(c1);
        const auto i2 = puf.intensity(c2);
        const auto iu = puf.intensity(c1 | c2);
        auto pearson = [](const std::vector<double>& a, const std::vector<double>& b) {
            double ma = 0, mb = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                ma += a[i];
                mb += b[i];
            }
            ma /= static_cast<double>(a.size());
            mb /= static_cast<double>(a.size());
            double num = 0, da = 0, db = 0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                num += (a[i] - ma) * (b[i] - mb);
                da += (a[i] - ma) * (a[i] - ma);
                db += (b[i] - mb) * (b[i] - mb);
            }
            return num / std::sqrt(da * db);
        };
        if (pearson(i1, iu) > pearson(i1, i2)) ++wins;
    }
    REQUIRE(wins >= static_cast<int>(0.95 * rounds));
}

TEST_CASE("noise calibration hits the requested intra distance") {
    PufConfig cfg = small_cfg(64, 16);
    PufInstance puf(43, cfg);
    ThetaMatrix theta(5, cfg.width, cfg.height);
    CalibrationSetup setup;
    setup.theta = &theta;
    setup.challenge = SlmChallenge::all_on(16);
    setup.selection = seeded_selection(7, cfg.width, cfg.height, 256);

    REQUIRE(calibrate_noise(puf, 0.0, setup) == 0.0);

    const double sigma = calibrate_noise(puf, 0.069, setup);
    const double ber = measure_intra_ber(puf, sigma, setup);
    REQUIRE(ber >= 0.062);
    REQUIRE(ber <= 0.076);

    const double sigma_big = calibrate_noise(puf, 0.25, setup);
    REQUIRE(sigma_big > sigma);  // monotone spot check
}

TEST_CASE("acquisition noise respects the selection-independence of the floor") {
    PufConfig cfg = small_cfg(64, 16);
    PufInstance puf(47, cfg);
    ThetaMatrix theta(9, cfg.width, cfg.height);
    CalibrationSetup setup;
    setup.theta = &theta;
    setup.challenge = SlmChallenge::all_on(16);
    setup.selection = seeded_selection(11, cfg.width, cfg.height, 256);
    const double sigma = calibrate_noise(puf, 0.08, setup);

    CalibrationSetup other = setup;
    other.selection = seeded_selection(12, cfg.width, cfg.height, 256);
    const double a = measure_intra_ber(puf, sigma, setup);
    const double b = measure_intra_ber(puf, sigma, other);
    REQUIRE(std::abs(a - b) <= 0.01);
}

TEST_CASE("config invariants are enforced") {
    PufConfig bad = small_cfg();
    bad.grain_target = 1.0;
    REQUIRE_THROWS_AS(PufInstance(1, bad), std::invalid_argument);
    bad = small_cfg();
    bad.noise_sigma = -0.1;
    REQUIRE_THROWS_AS(PufInstance(1, bad), std::invalid_argument);
    bad = small_cfg();
    bad.slm_pixels = 0;
    REQUIRE_THROWS_AS(PufInstance(1, bad), std::invalid_argument);
    PufInstance ok(1, small_cfg());
    REQUIRE_THROWS_AS(ok.field(SlmChallenge(15)), std::invalid_argument);
}

TEST_CASE("ambient offset raises the floor of an all-off image") {
    PufConfig cfg = small_cfg();
    cfg.ambient = 12.0;
    PufInstance puf(53, cfg);
    const auto img = puf.respond(SlmChallenge::all_off(16), 0);
    for (auto v : img.data) REQUIRE(v == 12);
}

#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <string>

#include "wpuf/auth.hpp"
#include "wpuf/schnorr.hpp"
#include "wpuf/sha256.hpp"

using namespace wpuf;

namespace {
AuthParams tiny_params() {
    AuthParams p;
    p.width = 48;
    p.height = 48;
    p.slm_pixels = 32;
    p.key_bits = 128;
    return p;
}
}  // namespace

TEST_CASE("sha256 known answer tests") {
    REQUIRE(hex_encode({Sha256::hash(std::string("abc")).begin(),
                        Sha256::hash(std::string("abc")).end()}) ==
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    REQUIRE(hex_encode({Sha256::hash(std::string("")).begin(),
                        Sha256::hash(std::string("")).end()}) ==
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    // streaming across block boundaries
    Sha256 h;
    const std::string part1(60, 'a'), part2(13, 'a');
    h.update(part1);
    h.update(part2);
    Sha256 whole;
    whole.update(std::string(73, 'a'));
    REQUIRE(h.digest() == whole.digest());
}

TEST_CASE("hmac-sha256 known answer test") {
    // RFC 4231 test case 2
    const std::vector<std::uint8_t> key{'J', 'e', 'f', 'e'};
    const std::string msg = "what do ya want for nothing?";
    const auto tag = hmac_sha256(key, {msg.begin(), msg.end()});
    REQUIRE(hex_encode({tag.begin(), tag.end()}) ==
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("schnorr signatures verify and break on any mutation") {
    const auto kp = schnorr_keygen({1, 2, 3, 4});
    const std::vector<std::uint8_t> msg{'h', 'i'};
    const auto sig = schnorr_sign(kp.sk, msg);
    REQUIRE(schnorr_verify(kp.pk, msg, sig));
    auto bad = sig;
    bad.s ^= 1;
    REQUIRE_FALSE(schnorr_verify(kp.pk, msg, bad));
    auto msg2 = msg;
    msg2[0] ^= 1;
    REQUIRE_FALSE(schnorr_verify(kp.pk, msg2, sig));
    const auto other = schnorr_keygen({9, 9});
    REQUIRE_FALSE(schnorr_verify(other.pk, msg, sig));
    // deterministic signing
    REQUIRE(schnorr_sign(kp.sk, msg) == sig);
}

TEST_CASE("key regeneration is stable across noisy acquisitions") {
    AuthParams p = tiny_params();
    p.noise_sigma = 0.35;  // hefty acquisition noise, still inside the radius
    PufConfig cfg;
    cfg.width = p.width;
    cfg.height = p.height;
    cfg.slm_pixels = p.slm_pixels;
    cfg.noise_sigma = p.noise_sigma;
    PufInstance puf(99, cfg);
    ThetaMatrix theta(p.theta_seed, p.width, p.height);
    BchCode mdc(p.mdc_m, p.mdc_t), fe(p.fe_m, p.fe_t);

    const std::uint64_t r = 1234567;
    const BitVec z = measure_response(puf, r, theta, mdc, p.key_bits, 1, p.noise_sigma);
    const auto helper = fe_gen(z, fe, 42);

    const auto k1 = derive_key(puf, r, helper, theta, mdc, fe, 2, p.noise_sigma);
    const auto k2 = derive_key(puf, r, helper, theta, mdc, fe, 3, p.noise_sigma);
    REQUIRE(k1.has_value());
    REQUIRE(k2.has_value());
    REQUIRE(*k1 == *k2);

    // different public seed -> unrelated key
    const BitVec z2 = measure_response(puf, r + 1, theta, mdc, p.key_bits, 4, p.noise_sigma);
    const auto helper2 = fe_gen(z2, fe, 43);
    const auto k3 = derive_key(puf, r + 1, helper2, theta, mdc, fe, 5, p.noise_sigma);
    REQUIRE(k3.has_value());
    std::size_t diff_bits = 0;
    for (std::size_t i = 0; i < k1->size(); ++i)
        diff_bits += static_cast<std::size_t>(std::popcount(static_cast<unsigned>((*k1)[i] ^ (*k3)[i])));
    const double frac = static_cast<double>(diff_bits) / (8.0 * static_cast<double>(k1->size()));
    REQUIRE(frac == Catch::Approx(0.5).margin(0.1));

    // a different physical module cannot reproduce the enrolled key
    PufInstance clone(100, cfg);
    const auto kc = derive_key(clone, r, helper, theta, mdc, fe, 6, p.noise_sigma);
    REQUIRE((!kc.has_value() || *kc != *k1));
}

TEST_CASE("honest runs accept in all three scenarios") {
    for (auto scenario :
         {Scenario::PublicKey, Scenario::HybridDevicePuf, Scenario::HybridBsPuf}) {
        AuthSim sim(2024, scenario, tiny_params());
        sim.enroll_device("sensor-1");
        const auto tr = sim.run_honest("sensor-1");
        INFO(scenario_name(scenario) << ": " << tr.reject_reason);
        REQUIRE(tr.accepted);
        REQUIRE(tr.messages.size() == 4);
    }
}

TEST_CASE("duplicate enrollment is rejected") {
    AuthSim sim(1, Scenario::PublicKey, tiny_params());
    sim.enroll_device("d");
    REQUIRE_THROWS_AS(sim.enroll_device("d"), std::invalid_argument);
}

TEST_CASE("unknown device is rejected") {
    AuthSim sim(2, Scenario::PublicKey, tiny_params());
    const auto tr = sim.run_honest("ghost");
    REQUIRE_FALSE(tr.accepted);
}

TEST_CASE("adversarial sessions never authenticate") {
    for (auto scenario :
         {Scenario::PublicKey, Scenario::HybridDevicePuf, Scenario::HybridBsPuf}) {
        AuthSim sim(77, scenario, tiny_params());
        sim.enroll_device("sensor-1");
        for (std::uint64_t trial = 0; trial < 30; ++trial) {
            const auto tr = sim.run_adversary("sensor-1", trial);
            INFO(scenario_name(scenario) << " trial " << trial << " outcome "
                                         << tr.reject_reason);
            REQUIRE_FALSE(tr.accepted);
        }
    }
}

TEST_CASE("seeded simulations replay to byte-identical transcripts") {
    AuthSim a(5150, Scenario::PublicKey, tiny_params());
    AuthSim b(5150, Scenario::PublicKey, tiny_params());
    a.enroll_device("x");
    b.enroll_device("x");
    const auto ta = a.run_honest("x");
    const auto tb = b.run_honest("x");
    REQUIRE(ta.to_json().dump() == tb.to_json().dump());
    // and a different seed produces a different transcript
    AuthSim c(5151, Scenario::PublicKey, tiny_params());
    c.enroll_device("x");
    REQUIRE(c.run_honest("x").to_json().dump() != ta.to_json().dump());
}

TEST_CASE("storage accounting matches the scenario table") {
    for (std::size_t n_devices : {std::size_t{0}, std::size_t{1}, std::size_t{3}}) {
        AuthSim pk(10, Scenario::PublicKey, tiny_params());
        AuthSim ha(11, Scenario::HybridDevicePuf, tiny_params());
        AuthSim hb(12, Scenario::HybridBsPuf, tiny_params());
        for (std::size_t i = 0; i < n_devices; ++i) {
            const std::string id = "dev-" + std::to_string(i);
            pk.enroll_device(id);
            ha.enroll_device(id);
            hb.enroll_device(id);
        }
        const auto rp = pk.storage_report();
        REQUIRE(rp[0].puf_modules == 0);
        REQUIRE(rp[0].secure_hw_keys == 1);  // own identity key only
        REQUIRE(rp[0].public_items == n_devices);
        const auto ra = ha.storage_report();
        REQUIRE(ra[0].secure_hw_keys == 1 + n_devices);  // identity + per-device secrets
        REQUIRE(ra[0].puf_modules == 0);
        const auto rb = hb.storage_report();
        REQUIRE(rb[0].puf_modules == 1);
        REQUIRE(rb[0].secure_hw_keys == 1);
        REQUIRE(rb[0].public_items == n_devices);  // unprotected R per device
        for (std::size_t i = 0; i < n_devices; ++i) {
            REQUIRE(rp[1 + i].puf_modules == 1);
            REQUIRE(rp[1 + i].secure_hw_keys == 0);
            REQUIRE(ra[1 + i].puf_modules == 1);
            REQUIRE(ra[1 + i].secure_hw_keys == 0);
            REQUIRE(rb[1 + i].puf_modules == 0);
            REQUIRE(rb[1 + i].secure_hw_keys == 1);
        }
    }
}

TEST_CASE("key material never appears in auditable storage") {
    for (auto scenario :
         {Scenario::PublicKey, Scenario::HybridDevicePuf, Scenario::HybridBsPuf}) {
        AuthSim sim(31337, scenario, tiny_params());
        sim.enroll_device("probe");
        REQUIRE(sim.run_honest("probe").accepted);
        const auto km = sim.device_key_material("probe");
        REQUIRE_FALSE(km.key_hex.empty());
        REQUIRE_FALSE(km.z_hex.empty());
        for (const std::string dump : {sim.bs_plain_dump(), sim.device_plain_dump("probe")}) {
            REQUIRE(dump.find(km.key_hex) == std::string::npos);
            REQUIRE(dump.find(km.z_hex) == std::string::npos);
        }
    }
}

TEST_CASE("swapping the physical module defeats authentication") {
    AuthSim sim(404, Scenario::PublicKey, tiny_params());
    sim.enroll_device("sensor");
    REQUIRE(sim.run_honest("sensor").accepted);
    sim.replace_device_puf("sensor", 0xdead);
    REQUIRE_FALSE(sim.run_honest("sensor").accepted);
}

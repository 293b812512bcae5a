#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpuf/bch.hpp"
#include "wpuf/bitvec.hpp"
#include "wpuf/challenge.hpp"
#include "wpuf/fuzzy.hpp"
#include "wpuf/hashing.hpp"
#include "wpuf/rng.hpp"
#include "wpuf/schnorr.hpp"
#include "wpuf/sha256.hpp"
#include "wpuf/speckle.hpp"

namespace wpuf {

// Mutual-authentication simulation: a base station with an internet-facing
// identity key and enrolled devices. Phase 1 authenticates the base station
// (signed nonce handshake, then an encrypt-and-MAC record channel standing in
// for the TLS record layer). Phase 2 authenticates the device inside the
// channel. PUF-protected parties never store key material: the public seed R
// expands to a challenge and selection, and the key is regenerated from a
// fresh acquisition through the fuzzy extractor on every use.

enum class Scenario { PublicKey, HybridDevicePuf, HybridBsPuf };
enum class AdversaryAction { None, Replay, Tamper, Impersonate };

inline const char* scenario_name(Scenario s) {
    switch (s) {
        case Scenario::PublicKey: return "pubkey";
        case Scenario::HybridDevicePuf: return "hybrid-device-puf";
        case Scenario::HybridBsPuf: return "hybrid-bs-puf";
    }
    return "?";
}

struct AuthParams {
    int width = 64;
    int height = 64;
    int slm_pixels = 81;
    std::size_t key_bits = 256;
    double grain = 3.2;
    double noise_sigma = 0.0;  // acquisition noise during enrollment and auth
    int mdc_m = 8, mdc_t = 3;  // code deriving the public pixel selection
    int fe_m = 8, fe_t = 36;   // helper-data code (radius covers the noise floor)
    std::uint64_t theta_seed = 0x57a71c;
};

// Wire frame: {u8 type, u32 big-endian length, payload}.
struct Frame {
    std::uint8_t type = 0;
    std::string sender;
    std::vector<std::uint8_t> payload;

    std::vector<std::uint8_t> encode() const {
        std::vector<std::uint8_t> out;
        out.push_back(type);
        const auto len = static_cast<std::uint32_t>(payload.size());
        for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
        out.insert(out.end(), payload.begin(), payload.end());
        return out;
    }
};

namespace frame_type {
constexpr std::uint8_t client_hello = 1;
constexpr std::uint8_t server_auth = 2;
constexpr std::uint8_t auth_challenge = 3;
constexpr std::uint8_t auth_token = 4;
constexpr std::uint8_t auth_secret = 5;
}  // namespace frame_type

struct Transcript {
    struct Entry {
        std::string sender;
        std::uint8_t type = 0;
        std::string payload_hex;
    };
    std::vector<Entry> messages;
    bool accepted = false;
    std::string reject_reason;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["outcome"] = accepted ? "accept" : "reject";
        j["reject_reason"] = reject_reason;
        j["messages"] = nlohmann::json::array();
        for (const auto& m : messages) {
            j["messages"].push_back(
                {{"sender", m.sender}, {"type", m.type}, {"payload", m.payload_hex}});
        }
        return j;
    }
};

struct StorageRow {
    std::string party;
    std::size_t puf_modules = 0;
    std::size_t secure_hw_keys = 0;
    std::size_t public_items = 0;
};

/// Fixed public expansion of the seed R into the SLM challenge.
inline SlmChallenge challenge_from_r(std::uint64_t r, std::size_t slm_pixels) {
    Rng rng(stream_key(r, "r-expand"));
    SlmChallenge c(slm_pixels);
    for (std::size_t i = 0; i < slm_pixels; ++i) c.bits.set(i, rng.coin());
    return c;
}

/// Hashed response for R: acquisition -> random-binary hash with the
/// challenge's public MDC selection.
inline BitVec measure_response(const PufInstance& puf, std::uint64_t r, const ThetaMatrix& theta,
                               const BchCode& mdc_code, std::size_t key_bits,
                               std::uint64_t noise_seed, double sigma) {
    const auto challenge = challenge_from_r(r, static_cast<std::size_t>(puf.config().slm_pixels));
    const auto sel =
        mdc_selection(challenge, mdc_code, puf.config().width, puf.config().height, key_bits);
    return hash_image(puf.respond(challenge, noise_seed, sigma), theta, sel);
}

/// Regenerate the enrolled secret from a fresh acquisition; the key is a KDF
/// of the corrected response and exists only in the caller's hands.
inline std::optional<std::vector<std::uint8_t>> derive_key(
    const PufInstance& puf, std::uint64_t r, const HelperData& helper, const ThetaMatrix& theta,
    const BchCode& mdc_code, const BchCode& fe_code, std::uint64_t noise_seed, double sigma) {
    const BitVec zp =
        measure_response(puf, r, theta, mdc_code, helper.key_bits, noise_seed, sigma);
    const auto z = fe_rep(zp, helper, fe_code);
    if (!z) return std::nullopt;
    return kdf("puf-key", z->to_bytes(), 32);
}

class AuthSim {
  public:
    AuthSim(std::uint64_t seed, Scenario scenario, AuthParams params = {})
        : seed_(seed),
          scenario_(scenario),
          params_(params),
          theta_(params.theta_seed, params.width, params.height),
          mdc_code_(params.mdc_m, params.mdc_t),
          fe_code_(params.fe_m, params.fe_t),
          rng_(stream_key(seed, "authsim")) {
        bs_.identity = schnorr_keygen(random_bytes(32));
        bs_.secure["identity_sk"] = u64_hex(bs_.identity.sk);
        if (scenario == Scenario::HybridBsPuf)
            bs_.puf = std::make_shared<PufInstance>(stream_key(seed, "bs-puf"), puf_config());
    }

    const AuthParams& params() const { return params_; }
    Scenario scenario() const { return scenario_; }

    void enroll_device(const std::string& id) {
        if (devices_.count(id)) throw std::invalid_argument("enroll_device: duplicate device id");
        DeviceState dev;
        dev.id = id;
        dev.plain["bs_pk"] = u64_hex(bs_.identity.pk);
        const std::uint64_t r = rng_.next();
        const std::uint64_t helper_seed = rng_.next();
        const std::uint64_t enroll_noise = rng_.next();

        switch (scenario_) {
            case Scenario::PublicKey: {
                dev.puf = std::make_shared<PufInstance>(stream_key(seed_, "device-puf", devices_.size()),
                                                        puf_config());
                const BitVec z = measure_response(*dev.puf, r, theta_, mdc_code_, params_.key_bits,
                                                  enroll_noise, params_.noise_sigma);
                const HelperData helper = fe_gen(z, fe_code_, helper_seed);
                dev.plain["enrollment"] = enrollment_json(r, helper);
                const auto kp = schnorr_keygen(kdf("puf-key", z.to_bytes(), 32));
                nlohmann::json cert;
                cert["sub"] = id;
                cert["pk"] = u64_hex(kp.pk);
                bs_.plain["cert:" + id] = cert.dump();
                break;
            }
            case Scenario::HybridDevicePuf: {
                dev.puf = std::make_shared<PufInstance>(stream_key(seed_, "device-puf", devices_.size()),
                                                        puf_config());
                const BitVec z = measure_response(*dev.puf, r, theta_, mdc_code_, params_.key_bits,
                                                  enroll_noise, params_.noise_sigma);
                const HelperData helper = fe_gen(z, fe_code_, helper_seed);
                dev.plain["enrollment"] = enrollment_json(r, helper);
                bs_.secure["secret:" + id] = hex_encode(kdf("puf-key", z.to_bytes(), 32));
                break;
            }
            case Scenario::HybridBsPuf: {
                const BitVec z = measure_response(*bs_.puf, r, theta_, mdc_code_, params_.key_bits,
                                                  enroll_noise, params_.noise_sigma);
                const HelperData helper = fe_gen(z, fe_code_, helper_seed);
                bs_.plain["enrollment:" + id] = enrollment_json(r, helper);
                dev.secure["secret"] = hex_encode(kdf("puf-key", z.to_bytes(), 32));
                break;
            }
        }
        devices_[id] = std::move(dev);
        enrolled_order_.push_back(id);
    }

    Transcript run_honest(const std::string& id) { return run_session(id, Plan{}); }

    /// One randomized adversarial session; the choice of action, target and
    /// payload all derive from adversary_seed.
    Transcript run_adversary(const std::string& id, std::uint64_t adversary_seed) {
        Rng adv(stream_key(adversary_seed, "adversary"));
        Plan plan;
        switch (adv.below(3)) {
            case 0: {
                plan.action = AdversaryAction::Replay;
                if (recorded_.messages.empty()) recorded_ = run_honest(id);
                plan.target_step = adv.below(4);
                break;
            }
            case 1: {
                plan.action = AdversaryAction::Tamper;
                plan.target_step = adv.below(4);
                plan.bit = adv.next();
                break;
            }
            default: {
                plan.action = AdversaryAction::Impersonate;
                plan.flavor = static_cast<int>(adv.below(2));
                plan.forged_key = adv.next();
                break;
            }
        }
        return run_session(id, plan);
    }

    std::vector<StorageRow> storage_report() const {
        StorageRow bs{"base-station", bs_.puf ? std::size_t{1} : std::size_t{0},
                      bs_.secure.size(), bs_.plain.size()};
        std::vector<StorageRow> rows{bs};
        for (const auto& id : enrolled_order_) {
            const auto& d = devices_.at(id);
            rows.push_back(StorageRow{"device:" + id, d.puf ? std::size_t{1} : std::size_t{0},
                                      d.secure.size(),
                                      d.plain.size() - 1});  // pinned BS key not a credential
        }
        return rows;
    }

    /// Everything a party persists outside secure hardware, concatenated; the
    /// key-never-stored audit greps this.
    std::string bs_plain_dump() const { return dump(bs_.plain); }
    std::string device_plain_dump(const std::string& id) const {
        return dump(devices_.at(id).plain);
    }

    struct KeyMaterial {
        std::string z_hex;
        std::string key_hex;
    };

    /// Recomputes the device's secret material (for auditing); never persisted.
    KeyMaterial device_key_material(const std::string& id) const {
        const auto& dev = devices_.at(id);
        KeyMaterial km;
        if (scenario_ == Scenario::HybridBsPuf) {
            const auto [r, helper] = parse_enrollment(bs_.plain.at("enrollment:" + id));
            const BitVec z = measure_response(*bs_.puf, r, theta_, mdc_code_, params_.key_bits, 0, 0.0);
            km.z_hex = z.to_hex();
            km.key_hex = dev.secure.at("secret");
        } else {
            const auto [r, helper] = parse_enrollment(dev.plain.at("enrollment"));
            auto key = derive_key(*dev.puf, r, helper, theta_, mdc_code_, fe_code_,
                                  0xa0d17u, params_.noise_sigma);
            const BitVec zp = measure_response(*dev.puf, r, theta_, mdc_code_, params_.key_bits,
                                               0xa0d17u, params_.noise_sigma);
            const auto z = fe_rep(zp, helper, fe_code_);
            km.z_hex = z ? z->to_hex() : "";
            km.key_hex = key ? hex_encode(*key) : "";
        }
        return km;
    }

    /// Swap the device's physical module (clone surrogate with wrong physics).
    void replace_device_puf(const std::string& id, std::uint64_t new_seed) {
        devices_.at(id).puf = std::make_shared<PufInstance>(new_seed, puf_config());
    }

  private:
    struct DeviceState {
        std::string id;
        std::map<std::string, std::string> plain;
        std::map<std::string, std::string> secure;
        std::shared_ptr<const PufInstance> puf;
    };

    struct BsState {
        SchnorrKeyPair identity;
        std::map<std::string, std::string> plain;
        std::map<std::string, std::string> secure;
        std::shared_ptr<const PufInstance> puf;
    };

    struct Plan {
        AdversaryAction action = AdversaryAction::None;
        std::size_t target_step = 0;  // which protocol message to attack
        std::uint64_t bit = 0;        // tamper bit selector
        int flavor = 0;               // impersonation: 0 fake BS, 1 fake device
        std::uint64_t forged_key = 0;
    };

    PufConfig puf_config() const {
        PufConfig cfg;
        cfg.width = params_.width;
        cfg.height = params_.height;
        cfg.slm_pixels = params_.slm_pixels;
        cfg.grain_target = params_.grain;
        cfg.noise_sigma = params_.noise_sigma;
        return cfg;
    }

    static std::string u64_hex(std::uint64_t v) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
        return buf;
    }

    static std::uint64_t parse_u64_hex(const std::string& s) {
        return std::stoull(s, nullptr, 16);
    }

    std::vector<std::uint8_t> random_bytes(std::size_t n) {
        std::vector<std::uint8_t> v(n);
        for (auto& b : v) b = static_cast<std::uint8_t>(rng_.next());
        return v;
    }

    static std::string enrollment_json(std::uint64_t r, const HelperData& helper) {
        nlohmann::json j;
        j["r"] = u64_hex(r);
        j["helper"] = helper.to_json();
        return j.dump();
    }

    static std::pair<std::uint64_t, HelperData> parse_enrollment(const std::string& s) {
        const auto j = nlohmann::json::parse(s);
        return {parse_u64_hex(j.at("r").get<std::string>()),
                HelperData::from_json(j.at("helper"))};
    }

    static std::string dump(const std::map<std::string, std::string>& m) {
        std::string s;
        for (const auto& [k, v] : m) {
            s += k;
            s += '=';
            s += v;
            s += '\n';
        }
        return s;
    }

    // --- record channel (encrypt + MAC under the session key) ---

    static std::vector<std::uint8_t> seq_bytes(std::uint64_t seq, std::uint8_t type) {
        std::vector<std::uint8_t> b(9);
        for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(seq >> (8 * (7 - i)));
        b[8] = type;
        return b;
    }

    static std::vector<std::uint8_t> seal(const std::vector<std::uint8_t>& key, std::uint64_t seq,
                                          std::uint8_t type, const std::vector<std::uint8_t>& pt) {
        auto header = seq_bytes(seq, type);
        auto stream_input = key;
        stream_input.insert(stream_input.end(), header.begin(), header.end());
        const auto stream = kdf("record-stream", stream_input, pt.size());
        std::vector<std::uint8_t> ct(pt.size());
        for (std::size_t i = 0; i < pt.size(); ++i) ct[i] = pt[i] ^ stream[i];
        auto mac_input = header;
        mac_input.insert(mac_input.end(), ct.begin(), ct.end());
        const auto tag = hmac_sha256(key, mac_input);
        std::vector<std::uint8_t> payload = header;
        payload.insert(payload.end(), ct.begin(), ct.end());
        payload.insert(payload.end(), tag.begin(), tag.end());
        return payload;
    }

    static std::optional<std::vector<std::uint8_t>> open(const std::vector<std::uint8_t>& key,
                                                         std::uint64_t expected_seq,
                                                         std::uint8_t type,
                                                         const std::vector<std::uint8_t>& payload) {
        if (payload.size() < 9 + 32) return std::nullopt;
        const std::vector<std::uint8_t> header(payload.begin(), payload.begin() + 9);
        if (header != seq_bytes(expected_seq, type)) return std::nullopt;
        const std::vector<std::uint8_t> ct(payload.begin() + 9, payload.end() - 32);
        std::vector<std::uint8_t> mac_input = header;
        mac_input.insert(mac_input.end(), ct.begin(), ct.end());
        const auto tag = hmac_sha256(key, mac_input);
        // constant-time compare
        std::uint8_t diff = 0;
        for (std::size_t i = 0; i < 32; ++i) diff |= static_cast<std::uint8_t>(tag[i] ^ payload[payload.size() - 32 + i]);
        if (diff != 0) return std::nullopt;
        auto stream_input = key;
        stream_input.insert(stream_input.end(), header.begin(), header.end());
        const auto stream = kdf("record-stream", stream_input, ct.size());
        std::vector<std::uint8_t> pt(ct.size());
        for (std::size_t i = 0; i < ct.size(); ++i) pt[i] = ct[i] ^ stream[i];
        return pt;
    }

    static bool const_time_eq(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
        if (a.size() != b.size()) return false;
        std::uint8_t diff = 0;
        for (std::size_t i = 0; i < a.size(); ++i) diff |= static_cast<std::uint8_t>(a[i] ^ b[i]);
        return diff == 0;
    }

    // --- the protocol itself ---

    Transcript run_session(const std::string& id, const Plan& plan) {
        Transcript tr;
        auto reject = [&tr](const std::string& why) {
            tr.accepted = false;
            tr.reject_reason = why;
            return tr;
        };
        auto post = [&tr, &plan, this](Frame f, std::size_t step) -> Frame {
            if (plan.action == AdversaryAction::Tamper && plan.target_step == step &&
                !f.payload.empty()) {
                f.payload[static_cast<std::size_t>(plan.bit / 8) % f.payload.size()] ^=
                    static_cast<std::uint8_t>(1u << (plan.bit % 8));
                f.sender = "adversary";
            }
            if (plan.action == AdversaryAction::Replay && plan.target_step == step &&
                step < recorded_.messages.size()) {
                const auto& old = recorded_.messages[step];
                f.type = old.type;
                f.payload = hex_decode(old.payload_hex);
                f.sender = "adversary";
            }
            tr.messages.push_back({f.sender, f.type, hex_encode(f.payload)});
            return f;
        };

        auto it = devices_.find(id);
        if (it == devices_.end()) return reject("unknown device");
        DeviceState& dev = it->second;

        ++clock_;

        // Phase 1, step 0: device hello with a fresh nonce.
        const auto nonce_d = random_bytes(16);
        const std::uint64_t session_id = rng_.next();
        nlohmann::json hello;
        hello["device"] = id;
        hello["nonce_d"] = hex_encode(nonce_d);
        hello["session"] = u64_hex(session_id);
        Frame f0;
        f0.type = frame_type::client_hello;
        f0.sender = "device:" + id;
        const std::string hello_str = hello.dump();
        f0.payload.assign(hello_str.begin(), hello_str.end());
        f0 = post(f0, 0);

        // BS parses the hello it actually received.
        nlohmann::json hello_rx;
        try {
            hello_rx = nlohmann::json::parse(std::string(f0.payload.begin(), f0.payload.end()));
        } catch (...) {
            return reject("handshake: malformed hello");
        }
        const std::string claimed_id = hello_rx.value("device", "");
        if (!devices_.count(claimed_id)) return reject("handshake: unknown device");

        // Step 1: BS proves itself by signing the session and both nonces.
        const auto nonce_b = random_bytes(16);
        std::vector<std::uint8_t> to_sign;
        const std::string sign_ctx = "server-auth:" + hello_rx.value("session", "") + ":" +
                                     hello_rx.value("nonce_d", "") + ":" + hex_encode(nonce_b);
        to_sign.assign(sign_ctx.begin(), sign_ctx.end());
        SchnorrSignature bs_sig;
        if (plan.action == AdversaryAction::Impersonate && plan.flavor == 0) {
            // adversary in the middle lacks sk_bs; signs with its own key
            std::vector<std::uint8_t> fk(8);
            for (int i = 0; i < 8; ++i) fk[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(plan.forged_key >> (8 * i));
            bs_sig = schnorr_sign(schnorr_keygen(fk).sk, to_sign);
        } else {
            bs_sig = schnorr_sign(bs_.identity.sk, to_sign);
        }
        nlohmann::json sauth;
        sauth["nonce_b"] = hex_encode(nonce_b);
        sauth["sig_e"] = u64_hex(bs_sig.e);
        sauth["sig_s"] = u64_hex(bs_sig.s);
        Frame f1;
        f1.type = frame_type::server_auth;
        f1.sender = plan.action == AdversaryAction::Impersonate && plan.flavor == 0 ? "adversary"
                                                                                    : "base-station";
        const std::string sauth_str = sauth.dump();
        f1.payload.assign(sauth_str.begin(), sauth_str.end());
        f1 = post(f1, 1);

        // Device verifies against its pinned BS key and its own view of the
        // session (nonce_d and session_id it sent).
        nlohmann::json sauth_rx;
        try {
            sauth_rx = nlohmann::json::parse(std::string(f1.payload.begin(), f1.payload.end()));
        } catch (...) {
            return reject("handshake: malformed server auth");
        }
        const std::string expect_ctx = "server-auth:" + u64_hex(session_id) + ":" +
                                       hex_encode(nonce_d) + ":" + sauth_rx.value("nonce_b", "");
        std::vector<std::uint8_t> expect_bytes(expect_ctx.begin(), expect_ctx.end());
        SchnorrSignature rx_sig;
        try {
            rx_sig.e = parse_u64_hex(sauth_rx.value("sig_e", "0"));
            rx_sig.s = parse_u64_hex(sauth_rx.value("sig_s", "0"));
        } catch (...) {
            return reject("handshake: malformed signature");
        }
        if (!schnorr_verify(parse_u64_hex(dev.plain.at("bs_pk")), expect_bytes, rx_sig))
            return reject("handshake: base station signature invalid");

        // Secure channel established: both sides derive the session key.
        std::vector<std::uint8_t> key_input = nonce_d;
        const auto nonce_b_rx = hex_decode(sauth_rx.value("nonce_b", ""));
        key_input.insert(key_input.end(), nonce_b_rx.begin(), nonce_b_rx.end());
        for (int i = 0; i < 8; ++i) key_input.push_back(static_cast<std::uint8_t>(session_id >> (8 * i)));
        const auto session_key = kdf("session-key", key_input, 32);

        // Phase 2, step 2: BS sends a fresh auth challenge through the channel.
        const auto nonce_a = random_bytes(16);
        Frame f2;
        f2.type = frame_type::auth_challenge;
        f2.sender = "base-station";
        f2.payload = seal(session_key, 0, f2.type, nonce_a);
        f2 = post(f2, 2);

        const auto nonce_a_rx = open(session_key, 0, frame_type::auth_challenge, f2.payload);
        if (!nonce_a_rx) return reject("record: auth challenge rejected by device");

        // Step 3: device proves itself.
        Frame f3;
        f3.sender = "device:" + id;
        std::vector<std::uint8_t> proof_pt;
        if (scenario_ == Scenario::PublicKey) {
            f3.type = frame_type::auth_token;
            nlohmann::json token;
            token["header"] = {{"alg", "SCHNORR-T64"}, {"typ", "JWT"}};
            token["claims"] = {{"sub", id},
                               {"nonce", hex_encode(*nonce_a_rx)},
                               {"iat", clock_}};
            const std::string claims_str = token.dump();
            std::vector<std::uint8_t> claims_bytes(claims_str.begin(), claims_str.end());
            SchnorrSignature sig;
            if (plan.action == AdversaryAction::Impersonate && plan.flavor == 1) {
                std::vector<std::uint8_t> fk(8);
                for (int i = 0; i < 8; ++i) fk[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(plan.forged_key >> (8 * i));
                sig = schnorr_sign(schnorr_keygen(fk).sk, claims_bytes);
                f3.sender = "adversary";
            } else {
                const auto [r, helper] = parse_enrollment(dev.plain.at("enrollment"));
                const auto key = derive_key(*dev.puf, r, helper, theta_, mdc_code_, fe_code_,
                                            rng_.next(), params_.noise_sigma);
                if (!key) return reject("device: key regeneration failed");
                sig = schnorr_sign(schnorr_keygen(*key).sk, claims_bytes);
            }
            nlohmann::json signed_token;
            signed_token["token"] = token;
            signed_token["sig_e"] = u64_hex(sig.e);
            signed_token["sig_s"] = u64_hex(sig.s);
            const std::string st = signed_token.dump();
            proof_pt.assign(st.begin(), st.end());
        } else {
            f3.type = frame_type::auth_secret;
            std::vector<std::uint8_t> secret;
            if (plan.action == AdversaryAction::Impersonate && plan.flavor == 1) {
                secret = kdf("forged", {static_cast<std::uint8_t>(plan.forged_key)}, 32);
                f3.sender = "adversary";
            } else if (scenario_ == Scenario::HybridDevicePuf) {
                const auto [r, helper] = parse_enrollment(dev.plain.at("enrollment"));
                const auto key = derive_key(*dev.puf, r, helper, theta_, mdc_code_, fe_code_,
                                            rng_.next(), params_.noise_sigma);
                if (!key) return reject("device: key regeneration failed");
                secret = *key;
            } else {
                secret = hex_decode(dev.secure.at("secret"));
            }
            secret.insert(secret.end(), nonce_a_rx->begin(), nonce_a_rx->end());
            proof_pt = secret;
        }
        f3.payload = seal(session_key, 1, f3.type, proof_pt);
        f3 = post(f3, 3);

        // BS verdict.
        const auto proof_rx = open(session_key, 1, f3.type, f3.payload);
        if (!proof_rx) return reject("record: device proof rejected");
        if (scenario_ == Scenario::PublicKey) {
            nlohmann::json signed_token;
            try {
                signed_token =
                    nlohmann::json::parse(std::string(proof_rx->begin(), proof_rx->end()));
            } catch (...) {
                return reject("verify: malformed token");
            }
            nlohmann::json token = signed_token.value("token", nlohmann::json::object());
            const auto claims = token.value("claims", nlohmann::json::object());
            if (claims.value("nonce", "") != hex_encode(nonce_a))
                return reject("verify: stale or wrong nonce");
            const std::int64_t iat = claims.value("iat", std::int64_t{-1});
            if (iat < static_cast<std::int64_t>(clock_) - 1 || iat > static_cast<std::int64_t>(clock_))
                return reject("verify: token timestamp outside window");
            if (claims.value("sub", "") != claimed_id) return reject("verify: subject mismatch");
            const std::string cs = token.dump();
            std::vector<std::uint8_t> claims_bytes(cs.begin(), cs.end());
            SchnorrSignature sig;
            try {
                sig.e = parse_u64_hex(signed_token.value("sig_e", "0"));
                sig.s = parse_u64_hex(signed_token.value("sig_s", "0"));
            } catch (...) {
                return reject("verify: malformed signature");
            }
            const auto cert = nlohmann::json::parse(bs_.plain.at("cert:" + claimed_id));
            if (!schnorr_verify(parse_u64_hex(cert.at("pk").get<std::string>()), claims_bytes, sig))
                return reject("verify: device signature invalid");
        } else {
            if (proof_rx->size() < 16 + 16) return reject("verify: short proof");
            const std::vector<std::uint8_t> secret_rx(proof_rx->begin(), proof_rx->end() - 16);
            const std::vector<std::uint8_t> nonce_rx(proof_rx->end() - 16, proof_rx->end());
            if (!const_time_eq(nonce_rx, nonce_a)) return reject("verify: stale or wrong nonce");
            std::vector<std::uint8_t> expected;
            if (scenario_ == Scenario::HybridDevicePuf) {
                expected = hex_decode(bs_.secure.at("secret:" + claimed_id));
            } else {
                const auto [r, helper] = parse_enrollment(bs_.plain.at("enrollment:" + claimed_id));
                const auto key = derive_key(*bs_.puf, r, helper, theta_, mdc_code_, fe_code_,
                                            rng_.next(), params_.noise_sigma);
                if (!key) return reject("verify: base station key regeneration failed");
                expected = *key;
            }
            if (!const_time_eq(secret_rx, expected)) return reject("verify: shared secret mismatch");
        }

        tr.accepted = true;
        return tr;
    }

    std::uint64_t seed_;
    Scenario scenario_;
    AuthParams params_;
    ThetaMatrix theta_;
    BchCode mdc_code_;
    BchCode fe_code_;
    Rng rng_;
    std::uint64_t clock_ = 0;
    BsState bs_;
    std::map<std::string, DeviceState> devices_;
    std::vector<std::string> enrolled_order_;
    Transcript recorded_;
};

}  // namespace wpuf

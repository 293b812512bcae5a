#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wpuf/sha256.hpp"

namespace wpuf {

// Schnorr signatures over a small prime-order subgroup, enough to exercise
// protocol structure. p = 2q + 1 is a safe prime, g generates the order-q
// subgroup. Deliberately toy-sized; not a production signature scheme.

struct SchnorrGroup {
    static constexpr std::uint64_t p = 4611686018427394499ULL;  // safe prime, 2q + 1
    static constexpr std::uint64_t q = 2305843009213697249ULL;  // prime subgroup order
    static constexpr std::uint64_t g = 4;                       // quadratic residue generator

    static std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
        return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
    }

    static std::uint64_t powmod(std::uint64_t base, std::uint64_t exp) {
        std::uint64_t r = 1;
        base %= p;
        while (exp) {
            if (exp & 1) r = mulmod(r, base);
            base = mulmod(base, base);
            exp >>= 1;
        }
        return r;
    }
};

struct SchnorrKeyPair {
    std::uint64_t sk = 0;  // in [1, q)
    std::uint64_t pk = 0;  // g^sk mod p
};

struct SchnorrSignature {
    std::uint64_t e = 0;
    std::uint64_t s = 0;
    bool operator==(const SchnorrSignature&) const = default;
};

namespace detail {
inline std::uint64_t digest_to_scalar(const std::array<std::uint8_t, 32>& d) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[static_cast<std::size_t>(i)];
    return v % SchnorrGroup::q;
}
}  // namespace detail

/// Private scalar from arbitrary seed bytes (e.g. a PUF-derived string).
inline SchnorrKeyPair schnorr_keygen(const std::vector<std::uint8_t>& seed) {
    SchnorrKeyPair kp;
    kp.sk = detail::digest_to_scalar(Sha256::hash(kdf("schnorr-keygen", seed, 32)));
    if (kp.sk == 0) kp.sk = 1;
    kp.pk = SchnorrGroup::powmod(SchnorrGroup::g, kp.sk);
    return kp;
}

/// Deterministic signature (nonce derived from key and message).
inline SchnorrSignature schnorr_sign(std::uint64_t sk, const std::vector<std::uint8_t>& msg) {
    std::vector<std::uint8_t> nonce_input(8);
    for (int i = 0; i < 8; ++i) nonce_input[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(sk >> (8 * (7 - i)));
    nonce_input.insert(nonce_input.end(), msg.begin(), msg.end());
    std::uint64_t k = detail::digest_to_scalar(Sha256::hash(kdf("schnorr-nonce", nonce_input, 32)));
    if (k == 0) k = 1;
    const std::uint64_t r = SchnorrGroup::powmod(SchnorrGroup::g, k);

    Sha256 h;
    std::uint8_t rbytes[8];
    for (int i = 0; i < 8; ++i) rbytes[i] = static_cast<std::uint8_t>(r >> (8 * (7 - i)));
    h.update(rbytes, 8);
    h.update(msg.data(), msg.size());
    SchnorrSignature sig;
    sig.e = detail::digest_to_scalar(h.digest());
    // s = k + sk * e mod q
    const auto q128 = static_cast<unsigned __int128>(SchnorrGroup::q);
    sig.s = static_cast<std::uint64_t>((static_cast<unsigned __int128>(sk) * sig.e + k) % q128);
    return sig;
}

inline bool schnorr_verify(std::uint64_t pk, const std::vector<std::uint8_t>& msg,
                           const SchnorrSignature& sig) {
    if (sig.s >= SchnorrGroup::q || sig.e >= SchnorrGroup::q) return false;
    // r' = g^s * pk^(-e) = g^s * pk^(q - e)
    const std::uint64_t gs = SchnorrGroup::powmod(SchnorrGroup::g, sig.s);
    const std::uint64_t ye = SchnorrGroup::powmod(pk, SchnorrGroup::q - sig.e);
    const std::uint64_t r = SchnorrGroup::mulmod(gs, ye);
    Sha256 h;
    std::uint8_t rbytes[8];
    for (int i = 0; i < 8; ++i) rbytes[i] = static_cast<std::uint8_t>(r >> (8 * (7 - i)));
    h.update(rbytes, 8);
    h.update(msg.data(), msg.size());
    return detail::digest_to_scalar(h.digest()) == sig.e;
}

}  // namespace wpuf

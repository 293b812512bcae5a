#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wpuf/bch.hpp"
#include "wpuf/bitvec.hpp"
#include "wpuf/rng.hpp"

namespace wpuf {

/// Code-offset helper data. The secret string is split into n-bit blocks
/// (final block zero-padded); each helper block is that slice XORed with a
/// fresh random codeword. The helper is public: any codeword offset is
/// equally consistent with it, so it commits to nothing about the secret
/// beyond the n-k parity relation.
struct HelperData {
    int m = 0;
    int t = 0;
    std::size_t key_bits = 0;
    std::size_t block_count = 0;
    std::size_t pad_bits = 0;
    std::vector<BitVec> helpers;  // one n-bit string per block

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["m"] = m;
        j["t"] = t;
        j["key_bits"] = key_bits;
        j["block_count"] = block_count;
        j["pad_bits"] = pad_bits;
        j["helpers"] = nlohmann::json::array();
        for (const auto& h : helpers) j["helpers"].push_back(h.to_hex());
        return j;
    }

    static HelperData from_json(const nlohmann::json& j) {
        HelperData h;
        h.m = j.at("m").get<int>();
        h.t = j.at("t").get<int>();
        h.key_bits = j.at("key_bits").get<std::size_t>();
        h.block_count = j.at("block_count").get<std::size_t>();
        h.pad_bits = j.at("pad_bits").get<std::size_t>();
        const std::size_t n = (std::size_t{1} << h.m) - 1;
        for (const auto& s : j.at("helpers")) h.helpers.push_back(BitVec::from_hex(s.get<std::string>(), n));
        return h;
    }
};

/// Enrollment half of the fuzzy extractor.
inline HelperData fe_gen(const BitVec& z, const BchCode& code, std::uint64_t seed) {
    const auto n = static_cast<std::size_t>(code.n());
    const auto k = static_cast<std::size_t>(code.k());
    HelperData h;
    h.m = code.m();
    h.t = code.t();
    h.key_bits = z.size();
    h.block_count = (z.size() + n - 1) / n;
    h.pad_bits = h.block_count * n - z.size();
    for (std::size_t b = 0; b < h.block_count; ++b) {
        Rng rng(stream_key(seed, "fe-block", b));
        BitVec w(k);
        for (std::size_t i = 0; i < k; ++i) w.set(i, rng.coin());
        h.helpers.push_back(z.slice(b * n, n) ^ code.encode(w));
    }
    return h;
}

/// Reproduction half: recovers the enrolled string exactly when every block
/// of the re-measurement is within the code's correction radius.
inline std::optional<BitVec> fe_rep(const BitVec& zp, const HelperData& h, const BchCode& code) {
    if (code.m() != h.m || code.t() != h.t)
        throw std::invalid_argument("fe_rep: code does not match helper metadata");
    if (zp.size() != h.key_bits) throw std::invalid_argument("fe_rep: length does not match helper");
    const auto n = static_cast<std::size_t>(code.n());
    BitVec out(h.key_bits);
    for (std::size_t b = 0; b < h.block_count; ++b) {
        const BitVec noisy_cw = zp.slice(b * n, n) ^ h.helpers[b];
        auto dec = code.decode(noisy_cw);
        if (!dec) return std::nullopt;
        const BitVec z_block = h.helpers[b] ^ code.encode(dec->message);
        const std::size_t len = std::min(n, h.key_bits - b * n);
        for (std::size_t i = 0; i < len; ++i) out.set(b * n + i, z_block.get(i));
    }
    return out;
}

/// Parity overhead needed to shield a K-bit string: one codeword per k
/// payload bits, n-k redundant bits each. This is the ECC-bit accounting the
/// prediction-probability sweep is plotted against.
inline std::size_t redundancy_bits(const BchCode& code, std::size_t key_bits) {
    const auto k = static_cast<std::size_t>(code.k());
    const std::size_t blocks = (key_bits + k - 1) / k;
    return blocks * static_cast<std::size_t>(code.n() - code.k());
}

}  // namespace wpuf

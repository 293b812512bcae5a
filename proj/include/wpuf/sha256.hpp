#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace wpuf {

/// Plain SHA-256 (FIPS 180-4). Used as the fixed KDF / commitment hash inside
/// the authentication simulation; nothing here needs to be fast.
class Sha256 {
  public:
    Sha256() { reset(); }

    void reset() {
        state_ = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                  0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
        buffer_.clear();
        total_ = 0;
    }

    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        total_ += len;
        buffer_.insert(buffer_.end(), p, p + len);
        std::size_t off = 0;
        while (buffer_.size() - off >= 64) {
            compress(buffer_.data() + off);
            off += 64;
        }
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(off));
    }

    void update(const std::vector<std::uint8_t>& v) { update(v.data(), v.size()); }
    void update(const std::string& s) { update(s.data(), s.size()); }

    std::array<std::uint8_t, 32> digest() {
        const std::uint64_t bits = total_ * 8;
        std::vector<std::uint8_t> pad{0x80};
        while ((total_ + pad.size()) % 64 != 56) pad.push_back(0x00);
        for (int i = 7; i >= 0; --i) pad.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
        update(pad.data(), pad.size());
        std::array<std::uint8_t, 32> out{};
        for (int i = 0; i < 8; ++i) {
            out[static_cast<std::size_t>(4 * i)] = static_cast<std::uint8_t>(state_[static_cast<std::size_t>(i)] >> 24);
            out[static_cast<std::size_t>(4 * i + 1)] = static_cast<std::uint8_t>(state_[static_cast<std::size_t>(i)] >> 16);
            out[static_cast<std::size_t>(4 * i + 2)] = static_cast<std::uint8_t>(state_[static_cast<std::size_t>(i)] >> 8);
            out[static_cast<std::size_t>(4 * i + 3)] = static_cast<std::uint8_t>(state_[static_cast<std::size_t>(i)]);
        }
        return out;
    }

    static std::array<std::uint8_t, 32> hash(const std::vector<std::uint8_t>& data) {
        Sha256 h;
        h.update(data);
        return h.digest();
    }

    static std::array<std::uint8_t, 32> hash(const std::string& data) {
        Sha256 h;
        h.update(data);
        return h.digest();
    }

  private:
    void compress(const std::uint8_t* block) {
        static constexpr std::array<std::uint32_t, 64> k = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
            0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
            0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
            0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
            0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
            0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
            0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
            0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
            0xc67178f2};
        std::array<std::uint32_t, 64> w{};
        for (int i = 0; i < 16; ++i)
            w[static_cast<std::size_t>(i)] = (static_cast<std::uint32_t>(block[4 * i]) << 24) |
                   (static_cast<std::uint32_t>(block[4 * i + 1]) << 16) |
                   (static_cast<std::uint32_t>(block[4 * i + 2]) << 8) |
                   static_cast<std::uint32_t>(block[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = std::rotr(w[static_cast<std::size_t>(i - 15)], 7) ^ std::rotr(w[static_cast<std::size_t>(i - 15)], 18) ^ (w[static_cast<std::size_t>(i - 15)] >> 3);
            const std::uint32_t s1 = std::rotr(w[static_cast<std::size_t>(i - 2)], 17) ^ std::rotr(w[static_cast<std::size_t>(i - 2)], 19) ^ (w[static_cast<std::size_t>(i - 2)] >> 10);
            w[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i - 16)] + s0 + w[static_cast<std::size_t>(i - 7)] + s1;
        }
        auto [a, b, c, d, e, f, g, h] = std::tuple{state_[0], state_[1], state_[2], state_[3],
                                                   state_[4], state_[5], state_[6], state_[7]};
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = std::rotr(e, 6) ^ std::rotr(e, 11) ^ std::rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = h + s1 + ch + k[static_cast<std::size_t>(i)] + w[static_cast<std::size_t>(i)];
            const std::uint32_t s0 = std::rotr(a, 2) ^ std::rotr(a, 13) ^ std::rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            h = g; g = f; f = e; e = d + t1;
            d = c; c = b; b = a; a = t1 + t2;
        }
        state_[0] += a; state_[1] += b; state_[2] += c; state_[3] += d;
        state_[4] += e; state_[5] += f; state_[6] += g; state_[7] += h;
    }

    std::array<std::uint32_t, 8> state_{};
    std::vector<std::uint8_t> buffer_;
    std::uint64_t total_ = 0;
};

inline std::array<std::uint8_t, 32> hmac_sha256(const std::vector<std::uint8_t>& key,
                                                const std::vector<std::uint8_t>& msg) {
    std::vector<std::uint8_t> k = key;
    if (k.size() > 64) {
        const auto d = Sha256::hash(k);
        k.assign(d.begin(), d.end());
    }
    k.resize(64, 0);
    std::vector<std::uint8_t> ipad(64), opad(64);
    for (int i = 0; i < 64; ++i) {
        ipad[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(k[static_cast<std::size_t>(i)] ^ 0x36);
        opad[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(k[static_cast<std::size_t>(i)] ^ 0x5c);
    }
    Sha256 inner;
    inner.update(ipad);
    inner.update(msg);
    const auto id = inner.digest();
    Sha256 outer;
    outer.update(opad);
    outer.update(id.data(), id.size());
    return outer.digest();
}

/// Counter-mode expansion of (label, input) to out_len bytes.
inline std::vector<std::uint8_t> kdf(const std::string& label,
                                     const std::vector<std::uint8_t>& input, std::size_t out_len) {
    std::vector<std::uint8_t> out;
    std::uint32_t counter = 0;
    while (out.size() < out_len) {
        Sha256 h;
        h.update(label);
        const std::uint8_t ctr[4] = {static_cast<std::uint8_t>(counter >> 24),
                                     static_cast<std::uint8_t>(counter >> 16),
                                     static_cast<std::uint8_t>(counter >> 8),
                                     static_cast<std::uint8_t>(counter)};
        h.update(ctr, 4);
        h.update(input);
        const auto d = h.digest();
        out.insert(out.end(), d.begin(), d.end());
        ++counter;
    }
    out.resize(out_len);
    return out;
}

inline std::string hex_encode(const std::vector<std::uint8_t>& v) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(v.size() * 2);
    for (auto b : v) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 15]);
    }
    return s;
}

inline std::vector<std::uint8_t> hex_decode(const std::string& s) {
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i + 1 < s.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(std::stoul(s.substr(i, 2), nullptr, 16)));
    return out;
}

}  // namespace wpuf

#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpuf {

/// Packed bit vector. Serialization is MSB-first: bit 0 of the vector is the
/// most significant bit of byte 0.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}

    static BitVec from_string(const std::string& s) {
        BitVec v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1')
                v.set(i, true);
            else if (s[i] != '0')
                throw std::invalid_argument("BitVec: expected '0'/'1'");
        }
        return v;
    }

    static BitVec from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t n_bits) {
        if (bytes.size() * 8 < n_bits) throw std::invalid_argument("BitVec: byte buffer too short");
        BitVec v(n_bits);
        for (std::size_t i = 0; i < n_bits; ++i)
            v.set(i, (bytes[i / 8] >> (7 - i % 8)) & 1u);
        return v;
    }

    static BitVec from_hex(const std::string& hex, std::size_t n_bits) {
        std::vector<std::uint8_t> bytes;
        bytes.reserve(hex.size() / 2);
        for (std::size_t i = 0; i + 1 < hex.size() || (hex.size() % 2 == 1 && i < hex.size());
             i += 2) {
            bytes.push_back(static_cast<std::uint8_t>(std::stoul(hex.substr(i, 2), nullptr, 16)));
        }
        return from_bytes(bytes, n_bits);
    }

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1ULL; }

    void set(std::size_t i, bool b) {
        const std::uint64_t mask = 1ULL << (i & 63);
        if (b)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= 1ULL << (i & 63); }

    std::size_t count_ones() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    BitVec operator^(const BitVec& o) const {
        if (n_ != o.n_) throw std::invalid_argument("BitVec: length mismatch");
        BitVec r(n_);
        for (std::size_t i = 0; i < words_.size(); ++i) r.words_[i] = words_[i] ^ o.words_[i];
        return r;
    }

    bool operator==(const BitVec& o) const { return n_ == o.n_ && words_ == o.words_; }
    bool operator!=(const BitVec& o) const { return !(*this == o); }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> bytes((n_ + 7) / 8, 0);
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
        return bytes;
    }

    std::string to_hex() const {
        static const char* digits = "0123456789abcdef";
        std::string s;
        for (auto b : to_bytes()) {
            s.push_back(digits[b >> 4]);
            s.push_back(digits[b & 15]);
        }
        return s;
    }

    /// Bits [from, from+len) as a new vector; out-of-range reads are zeros.
    BitVec slice(std::size_t from, std::size_t len) const {
        BitVec r(len);
        for (std::size_t i = 0; i < len; ++i)
            if (from + i < n_ && get(from + i)) r.set(i, true);
        return r;
    }

  private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> words_;
};

inline std::size_t hamming(const BitVec& a, const BitVec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("hamming: length mismatch");
    return (a ^ b).count_ones();
}

inline double fractional_hamming(const BitVec& a, const BitVec& b) {
    if (a.empty()) throw std::invalid_argument("fractional_hamming: empty input");
    return static_cast<double>(hamming(a, b)) / static_cast<double>(a.size());
}

}  // namespace wpuf

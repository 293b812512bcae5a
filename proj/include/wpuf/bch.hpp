#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wpuf/bitvec.hpp"
#include "wpuf/galois.hpp"

namespace wpuf {

/// Binary BCH code of length n = 2^m - 1 with designed correction capability
/// t. Codewords are systematic and MSB-first: bit 0 carries the coefficient
/// of x^(n-1), the first k bits are the message, the last n-k the parity.
///
/// t = 0 is allowed as the degenerate identity code (g = 1, k = n); it
/// encodes/decodes as a passthrough and corrects nothing.
class BchCode {
  public:
    BchCode(int m, int t) : gf_(m), t_(t) {
        if (t < 0) throw std::invalid_argument("BchCode: t must be >= 0");
        n_ = gf_.order();
        if (2 * t + 1 > n_) throw std::invalid_argument("BchCode: t too large for m");
        generator_ = compute_generator();
        k_ = n_ - (static_cast<int>(generator_.size()) - 1);
        if (k_ < 1) throw std::invalid_argument("BchCode: t too large for m (k < 1)");
    }

    int n() const { return n_; }
    int k() const { return k_; }
    int t() const { return t_; }
    int m() const { return gf_.m(); }
    const GaloisField& field() const { return gf_; }

    /// Generator polynomial coefficients, index = degree.
    const std::vector<std::uint8_t>& generator() const { return generator_; }

    BitVec encode(const BitVec& msg) const {
        if (msg.size() != static_cast<std::size_t>(k_))
            throw std::invalid_argument("BchCode::encode: message length != k");
        BitVec cw(static_cast<std::size_t>(n_));
        for (int i = 0; i < k_; ++i) cw.set(static_cast<std::size_t>(i), msg.get(static_cast<std::size_t>(i)));
        if (t_ == 0) return cw;
        // Remainder of msg(x) * x^(n-k) by g(x), LFSR form. reg holds the
        // running remainder, reg[0] = degree 0, packed in 64-bit words.
        const int r = n_ - k_;
        const int words = (r + 63) / 64;
        std::vector<std::uint64_t> reg(static_cast<std::size_t>(words), 0);
        std::vector<std::uint64_t> gmask(static_cast<std::size_t>(words), 0);
        for (int d = 0; d < r; ++d)
            if (generator_[static_cast<std::size_t>(d)])
                gmask[static_cast<std::size_t>(d >> 6)] |= 1ULL << (d & 63);
        const int top_word = (r - 1) >> 6;
        const int top_bit = (r - 1) & 63;
        for (int i = 0; i < k_; ++i) {
            const bool fb = msg.get(static_cast<std::size_t>(i)) ^ ((reg[static_cast<std::size_t>(top_word)] >> top_bit) & 1ULL);
            // shift left by one
            for (int w = words - 1; w > 0; --w)
                reg[static_cast<std::size_t>(w)] = (reg[static_cast<std::size_t>(w)] << 1) | (reg[static_cast<std::size_t>(w - 1)] >> 63);
            reg[0] <<= 1;
            if (fb)
                for (int w = 0; w < words; ++w) reg[static_cast<std::size_t>(w)] ^= gmask[static_cast<std::size_t>(w)];
        }
        for (int d = 0; d < r; ++d) {
            const bool bit = (reg[static_cast<std::size_t>(d >> 6)] >> (d & 63)) & 1ULL;
            // parity bit for degree d sits at codeword index n-1-d
            cw.set(static_cast<std::size_t>(n_ - 1 - d), bit);
        }
        return cw;
    }

    struct Decoded {
        BitVec message;
        int corrected = 0;
    };

    /// Bounded-distance decoding: syndromes, Berlekamp-Massey, Chien search.
    /// Returns nullopt when the error pattern is detectably uncorrectable.
    std::optional<Decoded> decode(const BitVec& recv) const {
        if (recv.size() != static_cast<std::size_t>(n_))
            throw std::invalid_argument("BchCode::decode: word length != n");
        if (t_ == 0) return Decoded{recv.slice(0, static_cast<std::size_t>(k_)), 0};

        std::vector<int> synd(static_cast<std::size_t>(2 * t_), 0);
        bool any = false;
        for (int j = 1; j <= 2 * t_; ++j) {
            int s = 0;
            for (int i = 0; i < n_; ++i)
                if (recv.get(static_cast<std::size_t>(i))) s ^= gf_.alpha_pow(static_cast<long long>(j) * (n_ - 1 - i));
            synd[static_cast<std::size_t>(j - 1)] = s;
            any = any || s != 0;
        }
        if (!any) return Decoded{recv.slice(0, static_cast<std::size_t>(k_)), 0};

        // Berlekamp-Massey over GF(2^m)
        std::vector<int> lambda{1}, prev{1};
        int L = 0, shift = 1;
        int prev_disc = 1;
        for (int r = 0; r < 2 * t_; ++r) {
            int disc = 0;
            for (int i = 0; i <= L && i < static_cast<int>(lambda.size()); ++i)
                if (lambda[static_cast<std::size_t>(i)] && r - i >= 0)
                    disc ^= gf_.mul(lambda[static_cast<std::size_t>(i)], synd[static_cast<std::size_t>(r - i)]);
            if (disc == 0) {
                ++shift;
            } else if (2 * L <= r) {
                std::vector<int> tmp = lambda;
                const int scale = gf_.div(disc, prev_disc);
                lambda.resize(std::max(lambda.size(), prev.size() + static_cast<std::size_t>(shift)), 0);
                for (std::size_t i = 0; i < prev.size(); ++i)
                    if (prev[i]) lambda[i + static_cast<std::size_t>(shift)] ^= gf_.mul(scale, prev[i]);
                L = r + 1 - L;
                prev = tmp;
                prev_disc = disc;
                shift = 1;
            } else {
                const int scale = gf_.div(disc, prev_disc);
                lambda.resize(std::max(lambda.size(), prev.size() + static_cast<std::size_t>(shift)), 0);
                for (std::size_t i = 0; i < prev.size(); ++i)
                    if (prev[i]) lambda[i + static_cast<std::size_t>(shift)] ^= gf_.mul(scale, prev[i]);
                ++shift;
            }
        }
        while (!lambda.empty() && lambda.back() == 0) lambda.pop_back();
        const int deg = static_cast<int>(lambda.size()) - 1;
        if (deg > t_ || deg != L) return std::nullopt;

        // Chien search: error at degree position e iff lambda(alpha^-e) = 0.
        BitVec corrected = recv;
        int roots = 0;
        for (int e = 0; e < n_; ++e) {
            int v = 0;
            for (int i = 0; i <= deg; ++i)
                if (lambda[static_cast<std::size_t>(i)])
                    v ^= gf_.mul(lambda[static_cast<std::size_t>(i)], gf_.alpha_pow(static_cast<long long>(-e) * i));
            if (v == 0) {
                corrected.flip(static_cast<std::size_t>(n_ - 1 - e));
                ++roots;
            }
        }
        if (roots != deg) return std::nullopt;

        // Reject words the locator "fixed" into a non-codeword.
        for (int j = 1; j <= 2 * t_; ++j) {
            int s = 0;
            for (int i = 0; i < n_; ++i)
                if (corrected.get(static_cast<std::size_t>(i))) s ^= gf_.alpha_pow(static_cast<long long>(j) * (n_ - 1 - i));
            if (s != 0) return std::nullopt;
        }
        return Decoded{corrected.slice(0, static_cast<std::size_t>(k_)), roots};
    }

    bool is_codeword(const BitVec& w) const {
        if (w.size() != static_cast<std::size_t>(n_)) return false;
        // w(x) mod g(x) == 0
        std::vector<std::uint8_t> poly(static_cast<std::size_t>(n_), 0);
        for (int i = 0; i < n_; ++i) poly[static_cast<std::size_t>(n_ - 1 - i)] = w.get(static_cast<std::size_t>(i)) ? 1 : 0;
        return poly_mod_is_zero(poly, generator_);
    }

    static bool poly_mod_is_zero(std::vector<std::uint8_t> a, const std::vector<std::uint8_t>& g) {
        const int dg = static_cast<int>(g.size()) - 1;
        for (int d = static_cast<int>(a.size()) - 1; d >= dg; --d) {
            if (!a[static_cast<std::size_t>(d)]) continue;
            for (int i = 0; i <= dg; ++i) a[static_cast<std::size_t>(d - dg + i)] ^= g[static_cast<std::size_t>(i)];
        }
        for (auto c : a)
            if (c) return false;
        return true;
    }

  private:
    std::vector<std::uint8_t> compute_generator() const {
        // g = lcm of minimal polynomials of alpha^1 .. alpha^2t, via
        // cyclotomic cosets.
        std::vector<std::uint8_t> g{1};
        if (t_ == 0) return g;
        std::vector<bool> used(static_cast<std::size_t>(n_), false);
        for (int i = 1; i <= 2 * t_; ++i) {
            const int rep = i % n_;
            if (rep == 0 || used[static_cast<std::size_t>(rep)]) continue;
            // coset of rep under doubling
            std::vector<int> coset;
            int c = rep;
            do {
                coset.push_back(c);
                used[static_cast<std::size_t>(c)] = true;
                c = (2 * c) % n_;
            } while (c != rep);
            // minimal polynomial = prod (x - alpha^c), computed over GF(2^m)
            std::vector<int> mp{1};
            for (int e : coset) {
                std::vector<int> next(mp.size() + 1, 0);
                const int root = gf_.alpha_pow(e);
                for (std::size_t d = 0; d < mp.size(); ++d) {
                    next[d + 1] ^= mp[d];
                    next[d] ^= gf_.mul(mp[d], root);
                }
                mp = std::move(next);
            }
            std::vector<std::uint8_t> mp2(mp.size());
            for (std::size_t d = 0; d < mp.size(); ++d) {
                if (mp[d] != 0 && mp[d] != 1)
                    throw std::logic_error("BchCode: minimal polynomial not over GF(2)");
                mp2[d] = static_cast<std::uint8_t>(mp[d]);
            }
            // g *= mp2 over GF(2)
            std::vector<std::uint8_t> prod(g.size() + mp2.size() - 1, 0);
            for (std::size_t a = 0; a < g.size(); ++a)
                if (g[a])
                    for (std::size_t b = 0; b < mp2.size(); ++b)
                        if (mp2[b]) prod[a + b] ^= 1;
            g = std::move(prod);
        }
        return g;
    }

    GaloisField gf_;
    int n_;
    int k_ = 0;
    int t_;
    std::vector<std::uint8_t> generator_;
};

}  // namespace wpuf

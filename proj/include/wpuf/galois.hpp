#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace wpuf {

/// GF(2^m) with log/antilog tables over a fixed primitive polynomial per m,
/// so field elements (and everything built on them) are identical across
/// builds and platforms.
class GaloisField {
  public:
    explicit GaloisField(int m) : m_(m) {
        if (m < 2 || m > 16) throw std::invalid_argument("GaloisField: m must be in [2, 16]");
        n_ = (1 << m) - 1;
        const std::uint32_t poly = primitive_poly(m);
        exp_.resize(2 * static_cast<std::size_t>(n_));
        log_.assign(static_cast<std::size_t>(n_) + 1, -1);
        std::uint32_t x = 1;
        for (int i = 0; i < n_; ++i) {
            exp_[static_cast<std::size_t>(i)] = static_cast<int>(x);
            log_[x] = i;
            x <<= 1;
            if (x & (1u << m)) x ^= poly;
        }
        if (x != 1) throw std::logic_error("GaloisField: table construction failed");
        for (int i = 0; i < n_; ++i) exp_[static_cast<std::size_t>(n_ + i)] = exp_[static_cast<std::size_t>(i)];
    }

    int m() const { return m_; }
    /// Multiplicative group order, 2^m - 1.
    int order() const { return n_; }

    int mul(int a, int b) const {
        if (a == 0 || b == 0) return 0;
        return exp_[static_cast<std::size_t>(log_[a] + log_[b])];
    }

    int inv(int a) const {
        if (a == 0) throw std::domain_error("GaloisField: inverse of zero");
        return exp_[static_cast<std::size_t>(n_ - log_[a])];
    }

    int div(int a, int b) const { return mul(a, inv(b)); }

    /// alpha^i for any integer i (reduced mod 2^m - 1).
    int alpha_pow(long long i) const {
        long long r = i % n_;
        if (r < 0) r += n_;
        return exp_[static_cast<std::size_t>(r)];
    }

    int pow(int a, long long e) const {
        if (a == 0) return e == 0 ? 1 : 0;
        long long le = (static_cast<long long>(log_[a]) * e) % n_;
        if (le < 0) le += n_;
        return exp_[static_cast<std::size_t>(le)];
    }

    int log(int a) const {
        if (a == 0) throw std::domain_error("GaloisField: log of zero");
        return log_[a];
    }

    static std::uint32_t primitive_poly(int m) {
        // Standard minimum-weight primitive polynomials, one per degree.
        static const std::uint32_t table[17] = {
            0,       0,       0x7,     0xb,     0x13,   0x25,   0x43,    0x89,   0x11d,
            0x211,   0x409,   0x805,   0x1053,  0x201b, 0x4443, 0x8003,  0x1100b};
        return table[m];
    }

  private:
    int m_;
    int n_;
    std::vector<int> exp_;
    std::vector<int> log_;
};

}  // namespace wpuf

#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace wpuf {

// Deterministic, platform-independent random streams. std::* distributions
// are implementation-defined, so everything downstream of a seed goes through
// this header: xoshiro256++ state seeded via splitmix64, Box-Muller normals.

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Mix a label and index words into a 64-bit substream key.
inline std::uint64_t stream_key(std::uint64_t root, std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the label
    for (unsigned char ch : label) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t s = root ^ h;
    splitmix64_next(s);
    return s;
}

inline std::uint64_t stream_key(std::uint64_t root, std::string_view label, std::uint64_t a) {
    std::uint64_t s = stream_key(root, label) ^ (a * 0x9E3779B97F4A7C15ULL);
    return splitmix64_next(s), s;
}

inline std::uint64_t stream_key(std::uint64_t root, std::string_view label, std::uint64_t a,
                                std::uint64_t b) {
    std::uint64_t s = stream_key(root, label, a) ^ (b * 0xD1B54A32D192ED03ULL);
    return splitmix64_next(s), s;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64_next(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = std::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = std::rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in [0, bound), unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    bool coin() { return (next() >> 63) != 0; }

  private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace wpuf

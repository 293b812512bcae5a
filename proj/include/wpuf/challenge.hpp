#pragma once

#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "wpuf/bitvec.hpp"
#include "wpuf/rng.hpp"

namespace wpuf {

/// SLM pixel pattern: one on/off bit per projected modulator pixel.
struct SlmChallenge {
    BitVec bits;

    SlmChallenge() = default;
    explicit SlmChallenge(std::size_t p) : bits(p) {}
    explicit SlmChallenge(BitVec b) : bits(std::move(b)) {}

    std::size_t size() const { return bits.size(); }

    static SlmChallenge all_off(std::size_t p) { return SlmChallenge(p); }

    static SlmChallenge all_on(std::size_t p) {
        SlmChallenge c(p);
        for (std::size_t i = 0; i < p; ++i) c.bits.set(i, true);
        return c;
    }

    static SlmChallenge single(std::size_t p, std::size_t pixel) {
        if (pixel >= p) throw std::invalid_argument("SlmChallenge: pixel out of range");
        SlmChallenge c(p);
        c.bits.set(pixel, true);
        return c;
    }

    static SlmChallenge from_pixels(std::size_t p, const std::vector<std::size_t>& on) {
        SlmChallenge c(p);
        for (auto i : on) {
            if (i >= p) throw std::invalid_argument("SlmChallenge: pixel out of range");
            c.bits.set(i, true);
        }
        return c;
    }

    static SlmChallenge random(std::size_t p, Rng& rng) {
        SlmChallenge c(p);
        for (std::size_t i = 0; i < p; ++i) c.bits.set(i, rng.coin());
        return c;
    }

    SlmChallenge operator|(const SlmChallenge& o) const {
        if (size() != o.size()) throw std::invalid_argument("SlmChallenge: size mismatch");
        SlmChallenge r(size());
        for (std::size_t i = 0; i < size(); ++i) r.bits.set(i, bits.get(i) || o.bits.get(i));
        return r;
    }

    bool disjoint_with(const SlmChallenge& o) const {
        for (std::size_t i = 0; i < size() && i < o.size(); ++i)
            if (bits.get(i) && o.bits.get(i)) return false;
        return true;
    }
};

}  // namespace wpuf

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "wpuf/bch.hpp"
#include "wpuf/bitvec.hpp"
#include "wpuf/challenge.hpp"
#include "wpuf/image.hpp"
#include "wpuf/rng.hpp"

namespace wpuf {

// Random-binary hashing chain: normalize the raster, multiply elementwise by
// a fixed Gaussian mask, pick K pixels, threshold at the mean of the picked
// values. Bit strings produced here feed everything downstream.

/// Fixed random mask, standard normal entries, regenerated bit-exactly from
/// its seed. Shared by all images of a deployment.
class ThetaMatrix {
  public:
    ThetaMatrix(std::uint64_t seed, int width, int height)
        : seed_(seed), width_(width), height_(height) {
        Rng rng(stream_key(seed, "theta"));
        values_.resize(static_cast<std::size_t>(width) * height);
        for (auto& v : values_) v = rng.normal();
    }

    std::uint64_t seed() const { return seed_; }
    int width() const { return width_; }
    int height() const { return height_; }
    const std::vector<double>& values() const { return values_; }

  private:
    std::uint64_t seed_;
    int width_;
    int height_;
    std::vector<double> values_;
};

/// Ordered set of K distinct pixel indices.
struct PixelSelection {
    enum class Provenance { Seeded, Mdc };
    std::vector<std::uint32_t> coords;
    Provenance provenance = Provenance::Seeded;

    std::size_t size() const { return coords.size(); }

    nlohmann::json to_json(int width) const {
        nlohmann::json j = nlohmann::json::array();
        for (auto idx : coords)
            j.push_back({idx / static_cast<std::uint32_t>(width), idx % static_cast<std::uint32_t>(width)});
        return j;
    }
};

/// Bits needed to transmit a selection as raw coordinates (the overhead a
/// two-factor challenge pays when the selection cannot be derived publicly).
inline std::size_t selection_overhead_bits(int width, int height, std::size_t k) {
    const auto total = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
    std::size_t bits = 0;
    while ((std::uint64_t{1} << bits) < total) ++bits;
    return k * bits;
}

/// Zero-mean, unit-variance copy of the raster. A constant image maps to the
/// all-zero vector.
inline std::vector<double> normalize(const SpeckleImage& img) {
    if (img.size() == 0) throw std::invalid_argument("normalize: empty image");
    const auto n = static_cast<double>(img.size());
    double mean = 0.0;
    for (auto v : img.data) mean += v;
    mean /= n;
    double var = 0.0;
    for (auto v : img.data) {
        const double d = v - mean;
        var += d * d;
    }
    var /= n;
    std::vector<double> out(img.size(), 0.0);
    if (var <= 0.0) return out;
    const double inv_sd = 1.0 / std::sqrt(var);
    for (std::size_t i = 0; i < img.size(); ++i) out[i] = (img.data[i] - mean) * inv_sd;
    return out;
}

inline std::vector<double> apply_theta(const std::vector<double>& v, const ThetaMatrix& theta) {
    if (v.size() != theta.values().size())
        throw std::invalid_argument("apply_theta: dimension mismatch");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * theta.values()[i];
    return out;
}

/// bit_i = 1 iff values_i > mean(values), strictly. Ties (including all-equal
/// input) give 0.
inline BitVec quantize(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("quantize: need at least 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    BitVec bits(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (values[i] > mean) bits.set(i, true);
    return bits;
}

/// Normalized, theta-multiplied raster cached for repeated extraction with
/// different selections.
class HashedImage {
  public:
    HashedImage(const SpeckleImage& img, const ThetaMatrix& theta)
        : w_(apply_theta(normalize(img), theta)) {}

    BitVec extract(const PixelSelection& sel) const {
        std::vector<double> picked(sel.coords.size());
        for (std::size_t i = 0; i < sel.coords.size(); ++i) {
            if (sel.coords[i] >= w_.size()) throw std::invalid_argument("extract: selection out of bounds");
            picked[i] = w_[sel.coords[i]];
        }
        return quantize(picked);
    }

    const std::vector<double>& values() const { return w_; }

  private:
    std::vector<double> w_;
};

inline BitVec hash_image(const SpeckleImage& img, const ThetaMatrix& theta,
                         const PixelSelection& sel) {
    return HashedImage(img, theta).extract(sel);
}

/// K distinct uniform pixel indices from a seeded partial Fisher-Yates pass.
inline PixelSelection seeded_selection(std::uint64_t seed, int width, int height, std::size_t k) {
    const std::size_t total = static_cast<std::size_t>(width) * height;
    if (k > total) throw std::invalid_argument("seeded_selection: K exceeds pixel count");
    std::vector<std::uint32_t> pool(total);
    for (std::size_t i = 0; i < total; ++i) pool[i] = static_cast<std::uint32_t>(i);
    Rng rng(stream_key(seed, "selection"));
    PixelSelection sel;
    sel.provenance = PixelSelection::Provenance::Seeded;
    sel.coords.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
        std::swap(pool[i], pool[j]);
        sel.coords[i] = pool[i];
    }
    return sel;
}

/// Deterministic public index stream for maximum-distance-coding selection.
/// Challenge bits plus a 32-bit extraction counter are packed into successive
/// code messages; the concatenated codewords are cut into ceil(log2(X*Y))-bit
/// chunks, each reduced modulo the pixel count. Every call to
/// next_selection() consumes the next window of K distinct indices, so one
/// challenge yields arbitrarily many public selections.
class MdcIndexStream {
  public:
    MdcIndexStream(const SlmChallenge& challenge, const BchCode& code, int width, int height)
        : challenge_(challenge), code_(&code), total_(static_cast<std::size_t>(width) * height) {
        chunk_bits_ = 1;
        while ((std::size_t{1} << chunk_bits_) < total_) ++chunk_bits_;
        stamp_.assign(total_, 0);
    }

    PixelSelection next_selection(std::size_t k) {
        if (k > total_) throw std::invalid_argument("mdc_selection: K exceeds pixel count");
        ++epoch_;
        PixelSelection sel;
        sel.provenance = PixelSelection::Provenance::Mdc;
        sel.coords.reserve(k);
        // Degenerate challenges can make the codeword stream cycle before K
        // distinct indices appear; bound the scan rather than spin.
        const std::size_t max_chunks = 4096 + 256 * k;
        std::size_t consumed = 0;
        while (sel.coords.size() < k) {
            if (++consumed > max_chunks)
                throw std::runtime_error("mdc_selection: index stream exhausted before K distinct indices");
            std::uint64_t v = 0;
            for (std::size_t b = 0; b < chunk_bits_; ++b) v = (v << 1) | (take_bit() ? 1u : 0u);
            const auto idx = static_cast<std::uint32_t>(v % total_);
            if (stamp_[idx] != epoch_) {
                stamp_[idx] = epoch_;
                sel.coords.push_back(idx);
            }
        }
        return sel;
    }

  private:
    bool take_bit() {
        if (pos_ >= buffer_.size()) refill();
        return buffer_.get(pos_++);
    }

    void refill() {
        // message_j = challenge bits ++ 32-bit big-endian counter, zero-padded
        // or truncated to k bits
        const auto k = static_cast<std::size_t>(code_->k());
        BitVec msg(k);
        for (std::size_t i = 0; i < challenge_.size() && i < k; ++i)
            msg.set(i, challenge_.bits.get(i));
        for (std::size_t b = 0; b < 32; ++b) {
            const std::size_t at = challenge_.size() + b;
            if (at < k) msg.set(at, (counter_ >> (31 - b)) & 1u);
        }
        buffer_ = code_->encode(msg);
        pos_ = 0;
        ++counter_;
    }

    SlmChallenge challenge_;
    const BchCode* code_;
    std::size_t total_;
    std::size_t chunk_bits_;
    BitVec buffer_;
    std::size_t pos_ = 0;
    std::uint32_t counter_ = 0;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

/// First window of the challenge's public index stream.
inline PixelSelection mdc_selection(const SlmChallenge& challenge, const BchCode& code, int width,
                                    int height, std::size_t k) {
    return MdcIndexStream(challenge, code, width, height).next_selection(k);
}

}  // namespace wpuf

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "wpuf/autocorr.hpp"
#include "wpuf/bitvec.hpp"
#include "wpuf/challenge.hpp"
#include "wpuf/fft.hpp"
#include "wpuf/hashing.hpp"
#include "wpuf/image.hpp"
#include "wpuf/rng.hpp"

namespace wpuf {

// Simulated optical PUF. Each SLM pixel owns one random complex basis field
// per polarization component; a challenge's output field is the exact sum of
// the fields of its ON pixels (scattering is linear), and the camera sees
// |F0|^2 + |F1|^2. Basis fields are spectrally low-pass filtered white
// circular Gaussian noise, the filter cutoff calibrated numerically so the
// single-pixel intensity autocorrelation FWHM lands on the configured grain
// size. Summing two independent polarization components gives the gamma(2)
// intensity statistics of unpolarized speckle; one component alone would be
// exponential.

struct PufConfig {
    int width = 256;
    int height = 256;
    int slm_pixels = 81;
    double grain_target = 3.2;  // autocorrelation FWHM, pixels
    double noise_sigma = 0.0;   // acquisition noise, fraction of mean intensity
    double ambient = 0.0;       // offset in 8-bit levels, applied after gain
    double gain_level = 100.0;  // 8-bit level the mean raw intensity maps to

    void validate() const {
        if (width < 4 || height < 4) throw std::invalid_argument("PufConfig: image too small");
        if (slm_pixels < 1) throw std::invalid_argument("PufConfig: need at least one SLM pixel");
        if (grain_target < 2.0) throw std::invalid_argument("PufConfig: grain below Nyquist");
        if (grain_target > std::min(width, height) / 4.0)
            throw std::invalid_argument("PufConfig: grain too large for image");
        if (noise_sigma < 0.0) throw std::invalid_argument("PufConfig: negative noise");
        if (ambient < 0.0) throw std::invalid_argument("PufConfig: negative ambient");
        if (gain_level <= 0.0 || gain_level > 255.0)
            throw std::invalid_argument("PufConfig: gain level out of range");
    }

    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

using ComplexField = std::vector<std::complex<double>>;

class PufInstance {
  public:
    // fields for images up to this many pixels are materialized eagerly;
    // larger instances regenerate per use to bound memory
    static constexpr std::size_t kCacheLimit = std::size_t{1} << 17;

    PufInstance(std::uint64_t seed, PufConfig cfg) : seed_(seed), cfg_(cfg) {
        cfg_.validate();
        cutoff_ = calibrated_cutoff(cfg_);
        if (cfg_.pixel_count() <= kCacheLimit) {
            cache_.reserve(static_cast<std::size_t>(cfg_.slm_pixels) * 2);
            for (int p = 0; p < cfg_.slm_pixels; ++p)
                for (int q = 0; q < 2; ++q) cache_.push_back(generate_field(p, q));
        }
    }

    std::uint64_t seed() const { return seed_; }
    const PufConfig& config() const { return cfg_; }
    double spectral_cutoff() const { return cutoff_; }
    bool fields_cached() const { return !cache_.empty(); }

    /// Basis field for one SLM pixel and polarization component.
    ComplexField basis_field(int p, int q) const {
        if (p < 0 || p >= cfg_.slm_pixels || q < 0 || q > 1)
            throw std::invalid_argument("basis_field: index out of range");
        if (!cache_.empty()) return cache_[static_cast<std::size_t>(p) * 2 + static_cast<std::size_t>(q)];
        return generate_field(p, q);
    }

    /// Exact superposition of the ON pixels' fields, one field per
    /// polarization. No noise, no quantization.
    std::pair<ComplexField, ComplexField> field(const SlmChallenge& c) const {
        check_challenge(c);
        const std::size_t total = cfg_.pixel_count();
        std::pair<ComplexField, ComplexField> out{ComplexField(total), ComplexField(total)};
        for (int p = 0; p < cfg_.slm_pixels; ++p) {
            if (!c.bits.get(static_cast<std::size_t>(p))) continue;
            for (int q = 0; q < 2; ++q) {
                ComplexField own;
                const ComplexField* f;
                if (!cache_.empty()) {
                    f = &cache_[static_cast<std::size_t>(p) * 2 + static_cast<std::size_t>(q)];
                } else {
                    own = generate_field(p, q);
                    f = &own;
                }
                auto& acc = q == 0 ? out.first : out.second;
                for (std::size_t i = 0; i < total; ++i) acc[i] += (*f)[i];
            }
        }
        return out;
    }

    /// Raw detector-plane intensity |F0|^2 + |F1|^2, before noise and gain.
    std::vector<double> intensity(const SlmChallenge& c) const {
        auto [f0, f1] = field(c);
        std::vector<double> raw(f0.size());
        for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = std::norm(f0[i]) + std::norm(f1[i]);
        return raw;
    }

    /// One acquisition: multiplicative + additive Gaussian noise scaled to
    /// the mean intensity, linear gain mapping the mean to gain_level, then
    /// ambient offset and 8-bit clipping. sigma = 0 reproduces the noiseless
    /// image for any noise seed.
    SpeckleImage render(const std::vector<double>& raw, std::uint64_t noise_seed,
                        double sigma) const {
        if (raw.size() != cfg_.pixel_count()) throw std::invalid_argument("render: size mismatch");
        double mean_raw = 0.0;
        for (double v : raw) mean_raw += v;
        mean_raw /= static_cast<double>(raw.size());
        const double gain = mean_raw > 0.0 ? cfg_.gain_level / mean_raw : 1.0;

        SpeckleImage img(cfg_.width, cfg_.height);
        if (sigma > 0.0) {
            Rng rng(stream_key(noise_seed, "acquisition"));
            for (std::size_t i = 0; i < raw.size(); ++i) {
                const double noisy =
                    raw[i] * (1.0 + sigma * rng.normal()) + sigma * mean_raw * rng.normal();
                img.data[i] = quantize_level(gain * noisy + cfg_.ambient);
            }
        } else {
            for (std::size_t i = 0; i < raw.size(); ++i)
                img.data[i] = quantize_level(gain * raw[i] + cfg_.ambient);
        }
        return img;
    }

    SpeckleImage respond(const SlmChallenge& c, std::uint64_t noise_seed) const {
        return render(intensity(c), noise_seed, cfg_.noise_sigma);
    }

    SpeckleImage respond(const SlmChallenge& c, std::uint64_t noise_seed, double sigma) const {
        return render(intensity(c), noise_seed, sigma);
    }

  private:
    static std::uint8_t quantize_level(double v) {
        const double r = std::round(v);
        if (r <= 0.0) return 0;
        if (r >= 255.0) return 255;
        return static_cast<std::uint8_t>(r);
    }

    void check_challenge(const SlmChallenge& c) const {
        if (c.size() != static_cast<std::size_t>(cfg_.slm_pixels))
            throw std::invalid_argument("challenge length does not match SLM pixel count");
    }

    /// White circular Gaussian noise shaped by a Gaussian spectral mask,
    /// inverse-transformed and normalized to unit mean power.
    ComplexField generate_field(int p, int q) const {
        return filtered_field(stream_key(seed_, "field", static_cast<std::uint64_t>(p),
                                         static_cast<std::uint64_t>(q)),
                              cfg_.width, cfg_.height, cutoff_);
    }

    static ComplexField filtered_field(std::uint64_t key, int width, int height, double cutoff) {
        const std::size_t total = static_cast<std::size_t>(width) * height;
        Rng rng(key);
        ComplexField f(total);
        for (auto& c : f) {
            const double re = rng.normal();
            const double im = rng.normal();
            c = {re, im};
        }
        const double inv2s2 = 1.0 / (2.0 * cutoff * cutoff);
        for (int y = 0; y < height; ++y) {
            const double fy = (y <= height / 2 ? y : y - height) / static_cast<double>(height);
            for (int x = 0; x < width; ++x) {
                const double fx = (x <= width / 2 ? x : x - width) / static_cast<double>(width);
                f[static_cast<std::size_t>(y) * width + x] *= std::exp(-(fx * fx + fy * fy) * inv2s2);
            }
        }
        fft2d(f, width, height, false);
        double power = 0.0;
        for (const auto& c : f) power += std::norm(c);
        power /= static_cast<double>(total);
        const double scale = 1.0 / std::sqrt(power);
        for (auto& c : f) c *= scale;
        return f;
    }

    /// Spectral cutoff giving the requested grain, found by bisection against
    /// the measured FWHM of a fixed probe field. Shared per (dims, grain).
    static double calibrated_cutoff(const PufConfig& cfg) {
        static std::mutex mtx;
        static std::map<std::tuple<int, int, double>, double> cache;
        const auto cache_key = std::make_tuple(cfg.width, cfg.height, cfg.grain_target);
        {
            std::lock_guard<std::mutex> lock(mtx);
            auto it = cache.find(cache_key);
            if (it != cache.end()) return it->second;
        }
        const std::uint64_t probe = stream_key(0x9E0C5EEDull, "grain-probe",
                                               static_cast<std::uint64_t>(cfg.width),
                                               static_cast<std::uint64_t>(cfg.height));
        auto measured = [&](double cutoff) {
            const ComplexField f = filtered_field(probe, cfg.width, cfg.height, cutoff);
            std::vector<double> intensity(f.size());
            for (std::size_t i = 0; i < f.size(); ++i) intensity[i] = std::norm(f[i]);
            return profile_fwhm(autocorr_radial_profile(intensity, cfg.width, cfg.height));
        };
        // FWHM ~ 0.375/cutoff for a Gaussian mask; bracket around that and
        // bisect (FWHM decreases with cutoff)
        double lo = std::max(1e-4, 0.375 / cfg.grain_target / 8.0);
        double hi = std::min(0.48, 0.375 / cfg.grain_target * 8.0);
        for (int i = 0; i < 8 && measured(lo) < cfg.grain_target; ++i) lo /= 2.0;
        double result = 0.5 * (lo + hi);
        for (int i = 0; i < 40; ++i) {
            result = 0.5 * (lo + hi);
            const double fwhm = measured(result);
            if (std::abs(fwhm - cfg.grain_target) <= 0.01 * cfg.grain_target) break;
            if (fwhm > cfg.grain_target)
                lo = result;
            else
                hi = result;
        }
        {
            std::lock_guard<std::mutex> lock(mtx);
            cache[cache_key] = result;
        }
        return result;
    }

    std::uint64_t seed_;
    PufConfig cfg_;
    double cutoff_;
    std::vector<ComplexField> cache_;
};

/// Hashing context used when calibrating acquisition noise against a target
/// bit-error rate.
struct CalibrationSetup {
    const ThetaMatrix* theta = nullptr;
    PixelSelection selection;
    SlmChallenge challenge;
    int acquisitions = 30;
    std::uint64_t noise_seed_base = 1;
};

/// Mean pairwise fractional Hamming distance among repeated acquisitions of
/// one challenge at a given noise level.
inline double measure_intra_ber(const PufInstance& puf, double sigma,
                                const CalibrationSetup& setup) {
    const auto raw = puf.intensity(setup.challenge);
    std::vector<BitVec> bits;
    bits.reserve(static_cast<std::size_t>(setup.acquisitions));
    for (int a = 0; a < setup.acquisitions; ++a) {
        const SpeckleImage img = puf.render(raw, setup.noise_seed_base + static_cast<std::uint64_t>(a), sigma);
        bits.push_back(hash_image(img, *setup.theta, setup.selection));
    }
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        for (std::size_t j = i + 1; j < bits.size(); ++j) {
            total += fractional_hamming(bits[i], bits[j]);
            ++pairs;
        }
    return total / static_cast<double>(pairs);
}

/// Bisection on the noise scale until the measured intra distance is within
/// 10% (relative) of target_ber. Throws when the search cannot converge.
inline double calibrate_noise(const PufInstance& puf, double target_ber,
                              const CalibrationSetup& setup) {
    if (target_ber < 0.0 || target_ber >= 0.5)
        throw std::invalid_argument("calibrate_noise: target must be in [0, 0.5)");
    if (target_ber == 0.0) return 0.0;
    if (setup.theta == nullptr) throw std::invalid_argument("calibrate_noise: theta required");
    if (setup.acquisitions < 2) throw std::invalid_argument("calibrate_noise: need >= 2 acquisitions");

    double lo = 0.0, hi = 0.5;
    int expand = 0;
    while (measure_intra_ber(puf, hi, setup) < target_ber) {
        hi *= 2.0;
        if (++expand > 4) throw std::runtime_error("calibrate_noise: target unreachable");
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double ber = measure_intra_ber(puf, mid, setup);
        if (std::abs(ber - target_ber) <= 0.1 * target_ber) return mid;
        if (ber < target_ber)
            lo = mid;
        else
            hi = mid;
    }
    throw std::runtime_error("calibrate_noise: no convergence");
}

}  // namespace wpuf

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "wpuf/autocorr.hpp"
#include "wpuf/bch.hpp"
#include "wpuf/bitvec.hpp"
#include "wpuf/fuzzy.hpp"
#include "wpuf/image.hpp"
#include "wpuf/stats.hpp"

namespace wpuf {

inline double euclidean(const SpeckleImage& a, const SpeckleImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("euclidean: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

struct DistanceStats {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> bin_edges;   // bins + 1 entries
    std::vector<std::size_t> bin_counts;
};

inline DistanceStats dist_stats(std::span<const double> values, std::size_t bins = 32) {
    if (values.empty()) throw std::invalid_argument("dist_stats: empty input");
    DistanceStats s;
    s.count = values.size();
    const Moments m = moments(values);
    s.mean = m.mean;
    s.stddev = std::sqrt(m.var);
    s.min = *std::min_element(values.begin(), values.end());
    s.max = *std::max_element(values.begin(), values.end());
    if (bins == 0) bins = 1;
    const double lo = s.min;
    const double span = s.max > s.min ? s.max - s.min : 1.0;
    s.bin_edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i)
        s.bin_edges[i] = lo + span * static_cast<double>(i) / static_cast<double>(bins);
    s.bin_counts.assign(bins, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / span * static_cast<double>(bins));
        if (b >= bins) b = bins - 1;
        ++s.bin_counts[b];
    }
    return s;
}

struct OverlapReport {
    double gap = 0.0;        // inter.min - intra.max; positive means disjoint
    double threshold = 0.0;  // midpoint decision threshold
    double false_accept = 0.0;
    double false_reject = 0.0;
};

/// Gaussian-tail error estimates at the midpoint between the intra and inter
/// distributions.
inline OverlapReport overlap_report(const DistanceStats& intra, const DistanceStats& inter) {
    OverlapReport r;
    r.gap = inter.min - intra.max;
    r.threshold = 0.5 * (intra.max + inter.min);
    r.false_accept = inter.stddev > 0.0
                         ? normal_cdf((r.threshold - inter.mean) / inter.stddev)
                         : (r.threshold >= inter.mean ? 1.0 : 0.0);
    r.false_reject = intra.stddev > 0.0
                         ? normal_cdf((intra.mean - r.threshold) / intra.stddev)
                         : (intra.mean > r.threshold ? 1.0 : 0.0);
    return r;
}

struct SpeckleStats {
    double grain = 0.0;          // autocorrelation FWHM, pixels
    double fit_residual = 0.0;   // relative RMS of the Lorentzian fit
    bool fit_ok = false;
    std::array<double, 256> histogram{};  // intensity level probabilities
};

namespace detail {

/// Least-squares Lorentzian A / (1 + (r/gamma)^2) on a radial profile,
/// damped Gauss-Newton. Returns {A, gamma, rms}.
inline bool lorentz_fit(const std::vector<double>& prof, std::size_t n_fit, double gamma0,
                        double& a_out, double& gamma_out, double& rms_out) {
    double a = 1.0, gamma = gamma0 > 0.1 ? gamma0 : 0.5;
    double lambda = 1e-3;
    auto sq_err = [&](double aa, double gg) {
        double e = 0.0;
        for (std::size_t r = 0; r < n_fit; ++r) {
            const double u = static_cast<double>(r) / gg;
            const double f = aa / (1.0 + u * u);
            e += (f - prof[r]) * (f - prof[r]);
        }
        return e;
    };
    double err = sq_err(a, gamma);
    for (int it = 0; it < 80; ++it) {
        double jtj00 = 0, jtj01 = 0, jtj11 = 0, jr0 = 0, jr1 = 0;
        for (std::size_t r = 0; r < n_fit; ++r) {
            const double u = static_cast<double>(r) / gamma;
            const double den = 1.0 + u * u;
            const double f = a / den;
            const double res = prof[r] - f;
            const double ja = 1.0 / den;
            const double jg = 2.0 * a * u * u / (gamma * den * den);
            jtj00 += ja * ja;
            jtj01 += ja * jg;
            jtj11 += jg * jg;
            jr0 += ja * res;
            jr1 += jg * res;
        }
        const double d00 = jtj00 * (1.0 + lambda);
        const double d11 = jtj11 * (1.0 + lambda);
        const double det = d00 * d11 - jtj01 * jtj01;
        if (std::abs(det) < 1e-30) return false;
        const double da = (d11 * jr0 - jtj01 * jr1) / det;
        const double dg = (d00 * jr1 - jtj01 * jr0) / det;
        const double a_new = a + da;
        const double g_new = gamma + dg;
        if (g_new <= 0.0 || a_new <= 0.0 || !std::isfinite(g_new) || !std::isfinite(a_new)) {
            lambda *= 10.0;
            if (lambda > 1e8) break;
            continue;
        }
        const double err_new = sq_err(a_new, g_new);
        if (err_new < err) {
            const bool converged = err - err_new < 1e-14 * (1.0 + err);
            a = a_new;
            gamma = g_new;
            err = err_new;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (converged) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e8) break;
        }
    }
    a_out = a;
    gamma_out = gamma;
    rms_out = std::sqrt(err / static_cast<double>(n_fit)) / a;
    return true;
}

}  // namespace detail

/// Mean speckle grain from the FWHM of the image autocorrelation, with a
/// Lorentzian profile fit; falls back to direct half-maximum interpolation
/// when the fit residual exceeds 5%.
inline SpeckleStats speckle_size(const SpeckleImage& img) {
    SpeckleStats out;
    const auto n = static_cast<double>(img.size());
    std::array<std::size_t, 256> counts{};
    for (auto v : img.data) ++counts[v];
    for (std::size_t i = 0; i < 256; ++i) out.histogram[i] = static_cast<double>(counts[i]) / n;

    std::vector<double> values(img.data.begin(), img.data.end());
    const auto prof = autocorr_radial_profile(values, img.width, img.height);  // throws on constant
    const double fwhm_direct = profile_fwhm(prof);

    // fit the core of the peak, out to where the profile drops under 0.1
    std::size_t n_fit = prof.size();
    for (std::size_t r = 1; r < prof.size(); ++r) {
        if (prof[r] < 0.1) {
            n_fit = r + 1;
            break;
        }
    }
    n_fit = std::max<std::size_t>(n_fit, 4);
    n_fit = std::min(n_fit, prof.size());

    double a = 0, gamma = 0, rms = 1.0;
    const bool solved = detail::lorentz_fit(prof, n_fit, fwhm_direct / 2.0, a, gamma, rms);
    out.fit_residual = rms;
    out.fit_ok = solved && rms <= 0.05;
    out.grain = out.fit_ok ? 2.0 * gamma : fwhm_direct;
    return out;
}

/// Per-image random-bit budget (X*Y/d) * H, with H the Shannon entropy of
/// the 8-bit intensity histogram.
inline double entropy_bits(const SpeckleImage& img, double grain) {
    if (grain < 1.0) throw std::invalid_argument("entropy_bits: grain must be >= 1 pixel");
    const auto n = static_cast<double>(img.size());
    std::array<std::size_t, 256> counts{};
    for (auto v : img.data) ++counts[v];
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return n / grain * h;
}

struct PredictionPoint {
    std::size_t ecc_bits = 0;
    std::size_t tau = 0;  // correctable flips per response
    double p_emp = 0.0;
    double p_gauss = 0.0;
};

/// Probability that two distinct challenges collide within the correction
/// radius, versus ECC redundancy. p_emp is the empirical pair fraction;
/// p_gauss the normal-tail estimate from the fitted distance distribution
/// (readable below the empirical resolution).
inline std::vector<PredictionPoint> prediction_curve(const std::vector<std::size_t>& inter_hd,
                                                     std::size_t key_bits,
                                                     const std::vector<const BchCode*>& codes) {
    if (inter_hd.empty()) throw std::invalid_argument("prediction_curve: empty distances");
    std::vector<double> hd(inter_hd.begin(), inter_hd.end());
    const Moments m = moments(hd);
    const double sd = std::sqrt(m.var);

    std::vector<PredictionPoint> out;
    out.reserve(codes.size());
    for (const BchCode* code : codes) {
        PredictionPoint pt;
        pt.ecc_bits = redundancy_bits(*code, key_bits);
        const std::size_t blocks = (key_bits + static_cast<std::size_t>(code->k()) - 1) /
                                   static_cast<std::size_t>(code->k());
        pt.tau = static_cast<std::size_t>(code->t()) * blocks;
        std::size_t hits = 0;
        for (auto d : inter_hd)
            if (d <= pt.tau) ++hits;
        pt.p_emp = static_cast<double>(hits) / static_cast<double>(inter_hd.size());
        if (pt.tau >= key_bits) {
            pt.p_emp = 1.0;
            pt.p_gauss = 1.0;
        } else if (sd > 0.0) {
            pt.p_gauss = normal_cdf((static_cast<double>(pt.tau) - m.mean) / sd);
        } else {
            pt.p_gauss = static_cast<double>(pt.tau) >= m.mean ? 1.0 : 0.0;
        }
        out.push_back(pt);
    }
    return out;
}

}  // namespace wpuf

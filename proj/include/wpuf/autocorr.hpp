#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "wpuf/fft.hpp"

namespace wpuf {

/// Radially averaged normalized autocorrelation of a mean-subtracted 2D
/// field, via the spectral method (so the estimate is circular). profile[0]
/// is 1 by construction; the radius axis is in pixels.
inline std::vector<double> autocorr_radial_profile(const std::vector<double>& data, int width,
                                                   int height) {
    const std::size_t total = static_cast<std::size_t>(width) * height;
    if (data.size() != total) throw std::invalid_argument("autocorr: size mismatch");
    double mean = 0.0;
    for (double v : data) mean += v;
    mean /= static_cast<double>(total);

    std::vector<std::complex<double>> buf(total);
    for (std::size_t i = 0; i < total; ++i) buf[i] = data[i] - mean;
    fft2d(buf, width, height, true);
    for (auto& c : buf) c = std::norm(c);
    fft2d(buf, width, height, false);

    const double c0 = buf[0].real();
    if (c0 <= 0.0) throw std::invalid_argument("autocorr: constant input");

    const int rmax = std::min(width, height) / 2;
    std::vector<double> sum(static_cast<std::size_t>(rmax) + 1, 0.0);
    std::vector<std::size_t> cnt(static_cast<std::size_t>(rmax) + 1, 0);
    for (int y = 0; y < height; ++y) {
        const int dy = std::min(y, height - y);
        for (int x = 0; x < width; ++x) {
            const int dx = std::min(x, width - x);
            const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy)));
            if (r > rmax) continue;
            sum[static_cast<std::size_t>(r)] += buf[static_cast<std::size_t>(y) * width + x].real() / c0;
            ++cnt[static_cast<std::size_t>(r)];
        }
    }
    std::vector<double> prof(sum.size(), 0.0);
    for (std::size_t r = 0; r < sum.size(); ++r)
        if (cnt[r]) prof[r] = sum[r] / static_cast<double>(cnt[r]);
    return prof;
}

/// Full width at half maximum of a peak-normalized profile, by linear
/// interpolation of the first 0.5 crossing.
inline double profile_fwhm(const std::vector<double>& prof) {
    for (std::size_t r = 1; r < prof.size(); ++r) {
        if (prof[r] < 0.5) {
            const double p0 = prof[r - 1];
            const double p1 = prof[r];
            const double frac = (p0 - 0.5) / (p0 - p1);
            return 2.0 * (static_cast<double>(r - 1) + frac);
        }
    }
    return 2.0 * static_cast<double>(prof.size() - 1);
}

}  // namespace wpuf

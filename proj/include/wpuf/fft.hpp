#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

namespace wpuf {

// Thin FFTW wrappers. FFTW's planner is not thread-safe, so plan creation is
// serialized; execution runs on the caller's buffer without locking.

namespace detail {
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

/// In-place 2D complex DFT over a row-major (width x height) buffer.
inline void fft2d(std::vector<std::complex<double>>& data, int width, int height, bool forward) {
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_2d(height, width, buf, buf, forward ? FFTW_FORWARD : FFTW_BACKWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
}

/// 1D real-to-complex DFT; returns n/2 + 1 bins.
inline std::vector<std::complex<double>> fft_r2c(std::vector<double>& data) {
    const int n = static_cast<int>(data.size());
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n) / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(n, data.data(), reinterpret_cast<fftw_complex*>(out.data()),
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

}  // namespace wpuf
